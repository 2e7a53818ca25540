#include "alm/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "alm/errors.hpp"
#include "alm/numeric.hpp"

namespace alm {

namespace {

double at(std::span<const double> v, int t) {
  const auto i = static_cast<std::size_t>(t);
  return i < v.size() ? v[i] : 0.0;
}

}  // namespace

void EstimatorInputs::validate() const {
  if (!(lp0 > 0.0)) throw ConfigError("estimator: LP_0 must be positive");
  if (!(gph > 0.0 && gph <= 1.0)) throw ConfigError("estimator: gph must lie in (0, 1]");
  // published components need no schedules
  if (fdb0_override && ii_override && iii_override && cog_override) return;
  if (horizon < 1) throw ConfigError("estimator: horizon must be at least 1");
  const auto n = static_cast<std::size_t>(horizon) + 1;
  if (discount.size() < n) throw DataError("estimator: discount curve shorter than horizon");
  if (discount[0] != 1.0) throw DataError("estimator: P(0,0) must be 1");
  for (double p : discount)
    if (!(p > 0.0)) throw DataError("estimator: discount factors must be positive");
  for (double v : iv)
    if (!(v >= 0.0)) throw DataError("estimator: implied vols must be non-negative");
  if (iv.size() < n && !cog_override) throw DataError("estimator: implied vol schedule shorter than horizon");
}

double decay(int t, double x, int horizon) {
  if (t >= horizon) return 0.0;
  return std::exp2(-static_cast<double>(t) / x);
}

Durations duration_h(std::span<const double> discount, std::span<const double> net_flows, double fdb0) {
  const int T = static_cast<int>(std::min(discount.size(), net_flows.size())) - 1;
  double num = 0.0, den = 0.0;
  for (int t = 1; t <= T; ++t) {
    num += t * at(discount, t) * at(net_flows, t);
    den += at(discount, t) * at(net_flows, t);
  }
  if (den == 0.0) throw DomainError("duration_h: discounted guaranteed flows sum to zero");
  Durations d;
  d.h0 = num / den;
  const double scale = std::max(fdb0, 0.0);
  if (scale == 0.0) {
    d.h = d.h0;
    return d;
  }
  for (int t = 1; t <= T; ++t) {
    const double bs = normal_pdf(t, 2.0 * d.h0, 0.5 * d.h0) * scale;
    num += t * at(discount, t) * bs;
    den += at(discount, t) * bs;
  }
  if (den == 0.0) throw DomainError("duration_h: augmented flows sum to zero");
  d.h = num / den;
  return d;
}

SigmaSchedule sigma_schedule(double db0_0, double lp0, double fdb0, double gb, double h, int horizon) {
  SigmaSchedule s;
  const double s0 = db0_0 / lp0;
  const double s1 = std::max(fdb0 / gb, 0.75 * s0);
  s.sigma.resize(static_cast<std::size_t>(horizon) + 1);
  s.sigma_db.resize(s.sigma.size());
  for (int t = 0; t <= horizon; ++t) {
    const double w = std::min(t / h, 1.0);
    s.sigma[static_cast<std::size_t>(t)] = s0 * std::max(h - t, 0.0) / h + s1 * w;
    s.sigma_db[static_cast<std::size_t>(t)] = s1 * w;
  }
  return s;
}

std::vector<double> gamma_hat(std::span<const double> rho, std::span<const double> lpg,
                              std::span<const double> premiums, std::span<const double> benefits,
                              std::span<const double> expenses, const SigmaSchedule& sigma, bool* runoff) {
  const int T = static_cast<int>(sigma.sigma.size()) - 1;
  std::vector<double> g(static_cast<std::size_t>(T) + 1, 0.0);
  for (int t = 1; t <= T; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const double base = (1.0 - (sigma.sigma[i] - sigma.sigma_db[i])) * at(lpg, t - 1);
    if (base == 0.0) {
      if (runoff) *runoff = true;
      continue;
    }
    const double net = -(at(lpg, t) - at(lpg, t - 1)) + at(premiums, t) - at(benefits, t) - at(expenses, t);
    g[static_cast<std::size_t>(t)] = at(rho, t) + net / base;
  }
  return g;
}

double bond_duration(std::span<const double> discount, std::span<const double> cash_flows) {
  double num = 0.0, den = 0.0;
  const int T = static_cast<int>(std::min(discount.size(), cash_flows.size())) - 1;
  for (int t = 1; t <= T; ++t) {
    num += t * at(discount, t) * at(cash_flows, t);
    den += at(discount, t) * at(cash_flows, t);
  }
  if (den == 0.0) throw DomainError("bond_duration: discounted bond flows sum to zero");
  return num / den;
}

double strike(int t, std::span<const double> discount, double ug0, double lp0, double theta, double sigma_t,
              double rho_t, double gamma_t, double h, double d, int horizon) {
  const double lh = decay(t - 1, h, horizon);
  if (!(lh > 0.0)) throw DomainError("strike: run-off factor must be positive");
  const double release = (decay(t - 1, d, horizon) - decay(t, d, horizon)) / lh;
  return -release / at(discount, t) * ug0 / ((1.0 + theta) * lp0) +
         (1.0 - sigma_t) * (rho_t - gamma_t) / (1.0 + theta);
}

double initial_forward(std::span<const double> discount, int t) {
  return at(discount, t - 1) / at(discount, t) - 1.0;
}

double floorlet_black(int t, double f0, double k, double iv, double p0t) {
  const double sd = iv * std::sqrt(static_cast<double>(t));
  if (!(sd > 0.0)) return p0t * positive_part(k - f0);
  const double kappa = (f0 - k) / sd;
  return p0t * (-(f0 - k) * normal_cdf(-kappa) + sd * normal_pdf(-kappa));
}

Bracket bracket(double lb, double ub) { return {0.5 * (lb + ub), 0.5 * (ub - lb)}; }

EstimatorResult bounds(const EstimatorInputs& in) {
  in.validate();
  const int T = in.horizon;
  EstimatorResult r;
  r.theta = in.theta.value_or(in.sf0 / in.lp0);

  const bool full = !(in.fdb0_override && in.ii_override && in.iii_override && in.cog_override);
  std::vector<double> net(static_cast<std::size_t>(T) + 1, 0.0);
  if (full) {
    for (int t = 1; t <= T; ++t)
      net[static_cast<std::size_t>(t)] = at(in.benefits, t) + at(in.expenses, t) - at(in.premiums, t);
    if (in.gb) {
      r.gb = *in.gb;
    } else {
      for (int t = 1; t <= T; ++t) r.gb += at(in.discount, t) * net[static_cast<std::size_t>(t)];
    }
  } else {
    r.gb = in.gb.value_or(0.0);
  }
  r.fdb0 = in.fdb0_override.value_or(in.sf0 + in.gph * (in.lp0 + in.ug0 - r.gb));

  if (full) {
    if (in.h) {
      r.h0 = r.h = *in.h;
    } else {
      const auto dur = duration_h(in.discount, net, r.fdb0);
      r.h0 = dur.h0;
      r.h = dur.h;
    }
    r.d = in.d ? *in.d : bond_duration(in.discount, in.bond_cash_flows);
    const auto sig = sigma_schedule(in.db0_0, in.lp0, r.fdb0, r.gb, r.h, T);
    r.sigma = sig.sigma;
    r.sigma_db = sig.sigma_db;
    r.gamma = in.gamma_override ? *in.gamma_override
                                : gamma_hat(in.rho, in.lpg, in.premiums, in.benefits, in.expenses, sig, &r.runoff);
    r.gamma.resize(static_cast<std::size_t>(T) + 1, 0.0);

    const auto n = static_cast<std::size_t>(T) + 1;
    r.lh.resize(n);
    r.ld.resize(n);
    r.strike.assign(n, 0.0);
    r.floorlet.assign(n, 0.0);
    for (int t = 0; t <= T; ++t) {
      r.lh[static_cast<std::size_t>(t)] = decay(t, r.h, T);
      r.ld[static_cast<std::size_t>(t)] = decay(t, r.d, T);
    }
    double ii = 0.0, iii = 0.0, cog = 0.0;
    for (int t = 1; t <= T; ++t) {
      const auto i = static_cast<std::size_t>(t);
      const double lh = r.lh[i - 1];
      const double p = at(in.discount, t);
      if (t >= 2) ii += p * positive_part(r.gamma[i]) * r.sigma_db[i] * lh;
      iii += (at(in.discount, t - 1) - p) * (r.sigma_db[i] + r.theta) * lh;
      r.strike[i] = strike(t, in.discount, in.ug0, in.lp0, r.theta, r.sigma[i], at(in.rho, t), r.gamma[i], r.h,
                           r.d, T);
      if (!in.cog_override) {
        r.floorlet[i] = floorlet_black(t, initial_forward(in.discount, t), r.strike[i], at(in.iv, t), p);
        cog += r.floorlet[i] * (1.0 + r.theta) * lh;
      }
    }
    r.ii_hat = (1.0 - in.gph) * ii * in.lp0;
    r.iii_hat = 2.0 * (1.0 - in.gph) * iii * in.lp0;
    r.cog_hat = cog * in.lp0;
  }
  if (in.ii_override) r.ii_hat = *in.ii_override;
  if (in.iii_override) r.iii_hat = *in.iii_override;
  if (in.cog_override) r.cog_hat = *in.cog_override;

  r.i_hat = 0.0;
  r.lb = r.fdb0 - r.i_hat - r.ii_hat - r.iii_hat;
  r.ub = r.fdb0 + in.gph * r.cog_hat;
  const Bracket b = bracket(r.lb, r.ub);
  r.fdb_hat = b.fdb_hat;
  r.eps = b.eps;
  return r;
}

double mc_floorlet(const ScenarioSet& scenarios, int t, double k) {
  if (t < 1 || t > scenarios.grid().count) throw DomainError("mc_floorlet: settlement outside the grid");
  std::vector<double> x(scenarios.size());
  for (std::size_t p = 0; p < x.size(); ++p)
    x[p] = positive_part(k - scenarios.forward(p, t - 1, t - 1)) / scenarios.numeraire(p, t);
  return sample_stats(x).mean;
}

std::vector<double> implied_normal_vols(const ScenarioSet& scenarios, int horizon) {
  horizon = std::min(horizon, scenarios.grid().count);
  std::vector<double> iv(static_cast<std::size_t>(horizon) + 1, 0.0);
  const std::size_t n = scenarios.size();
  for (int t = 1; t <= horizon; ++t) {
    double w = 0.0, m = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double wp = 1.0 / scenarios.numeraire(p, t);
      w += wp;
      m += wp * scenarios.forward(p, t - 1, t - 1);
    }
    m /= w;
    double v = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double e = scenarios.forward(p, t - 1, t - 1) - m;
      v += e * e / scenarios.numeraire(p, t);
    }
    iv[static_cast<std::size_t>(t)] = std::sqrt(v / w / t);
  }
  return iv;
}

std::string estimator_json(const EstimatorResult& r) {
  nlohmann::ordered_json j;
  j["FDB_0"] = r.fdb0;
  j["GB"] = r.gb;
  j["theta"] = r.theta;
  j["I_hat"] = r.i_hat;
  j["II_hat"] = r.ii_hat;
  j["III_hat"] = r.iii_hat;
  j["COG_hat"] = r.cog_hat;
  j["LB_hat"] = r.lb;
  j["UB_hat"] = r.ub;
  j["FDB_hat"] = r.fdb_hat;
  j["eps"] = r.eps;
  j["h0"] = r.h0;
  j["h"] = r.h;
  j["d"] = r.d;
  j["runoff"] = r.runoff;
  return j.dump(2);
}

}  // namespace alm
