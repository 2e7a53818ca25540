#include "alm/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "alm/errors.hpp"
#include "alm/numeric.hpp"

namespace alm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t idx(int t) { return static_cast<std::size_t>(t); }

template <class F>
std::vector<double> per_scenario(const ProjectionLedger& ledger, F f) {
  std::vector<double> x(ledger.scenarios());
  for (std::size_t p = 0; p < x.size(); ++p) x[p] = f(p);
  return x;
}

template <class F>
double mean_over(const ProjectionLedger& ledger, F f) {
  return sample_stats(per_scenario(ledger, f)).mean;
}

}  // namespace

std::vector<double>& EvidenceSeries::add(const std::string& name) {
  names.push_back(name);
  values.emplace_back(idx(horizon) + 1, kNaN);
  return values.back();
}

const std::vector<double>& EvidenceSeries::get(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return values[k];
  throw DataError("evidence: no series named " + name);
}

EvidenceSeries runoff_evidence(const ProjectionLedger& ledger, double h) {
  EvidenceSeries s{ledger.horizon(), {}, {}};
  const int T = ledger.horizon();
  const double lp0 = ledger.initial().lp();
  auto& lp = s.add("E_LP");
  auto& fit = s.add("lh_LP0");
  auto& lo = s.add("lh_minus_1_LP0");
  auto& hi = s.add("lh_plus_1_LP0");
  for (int t = 0; t <= T; ++t) {
    lp[idx(t)] = mean_over(ledger, [&](std::size_t p) { return ledger.balance(p, t).lp(); });
    fit[idx(t)] = decay(t, h, T) * lp0;
    lo[idx(t)] = h > 1.0 ? decay(t, h - 1.0, T) * lp0 : kNaN;
    hi[idx(t)] = decay(t, h + 1.0, T) * lp0;
  }
  return s;
}

EvidenceSeries sigma_evidence(const ProjectionLedger& ledger, const EstimatorResult& est) {
  EvidenceSeries s{ledger.horizon(), {}, {}};
  const int T = ledger.horizon();
  const double lp0 = ledger.initial().lp();
  auto& db = s.add("E_DB");
  auto& all = s.add("E_DB0_plus_DB");
  auto& db_hat = s.add("DB_hat");
  auto& all_hat = s.add("DB0_plus_DB_hat");
  for (int t = 0; t <= T; ++t) {
    db[idx(t)] = mean_over(ledger, [&](std::size_t p) { return ledger.balance(p, t).db; });
    all[idx(t)] = mean_over(ledger, [&](std::size_t p) {
      const auto b = ledger.balance(p, t);
      return b.db0 + b.db;
    });
    const double lp_hat = decay(t, est.h, T) * lp0;
    if (idx(t) < est.sigma.size()) {
      db_hat[idx(t)] = est.sigma_db[idx(t)] * lp_hat;
      all_hat[idx(t)] = est.sigma[idx(t)] * lp_hat;
    }
  }
  return s;
}

EvidenceSeries sf_evidence(const ProjectionLedger& ledger, double theta) {
  EvidenceSeries s{ledger.horizon(), {}, {}};
  auto& ratio = s.add("E_SF_over_E_LP");
  auto& th = s.add("theta");
  for (int t = 0; t <= ledger.horizon(); ++t) {
    const double sf = mean_over(ledger, [&](std::size_t p) { return ledger.balance(p, t).sf; });
    const double lp = mean_over(ledger, [&](std::size_t p) { return ledger.balance(p, t).lp(); });
    if (lp != 0.0) ratio[idx(t)] = sf / lp;
    th[idx(t)] = theta;
  }
  return s;
}

EvidenceSeries cov_evidence(const ProjectionLedger& ledger) {
  EvidenceSeries s{ledger.horizon(), {}, {}};
  auto& rel = s.add("rel_cov");
  auto& cv = s.add("cv_product");
  auto& omitted = s.add("omitted");
  const std::size_t n = ledger.scenarios();
  for (int t = 1; t <= ledger.horizon(); ++t) {
    const auto x = per_scenario(ledger, [&](std::size_t p) {
      const auto& r = ledger.row(p, t);
      return r.forward / r.numeraire;
    });
    const auto y = per_scenario(ledger, [&](std::size_t p) {
      const auto b = ledger.balance(p, t - 1);
      return b.db + b.sf;
    });
    const auto sx = sample_stats(x), sy = sample_stats(y);
    if (n < 2 || sx.mean == 0.0 || sy.mean == 0.0) {
      omitted[idx(t)] = 1.0;
      continue;
    }
    double c = 0.0;
    for (std::size_t p = 0; p < n; ++p) c += (x[p] - sx.mean) * (y[p] - sy.mean);
    c /= static_cast<double>(n - 1);
    rel[idx(t)] = c / (sx.mean * sy.mean);
    cv[idx(t)] = std::abs(sx.sd / sx.mean) * std::abs(sy.sd / sy.mean);
    omitted[idx(t)] = 0.0;
  }
  return s;
}

EvidenceSeries surrender_evidence(const ProjectionLedger& ledger, const EstimatorResult& est) {
  EvidenceSeries s{ledger.horizon(), {}, {}};
  const int T = ledger.horizon();
  const double lp0 = ledger.initial().lp();
  auto& sg = s.add("E_sg");
  auto& bound = s.add("gamma_plus_DB_hat");
  for (int t = 1; t <= T; ++t) {
    sg[idx(t)] = mean_over(ledger, [&](std::size_t p) { return ledger.row(p, t).sg; });
    if (idx(t) < est.gamma.size())
      bound[idx(t)] = positive_part(est.gamma[idx(t)]) * est.sigma_db[idx(t)] * decay(t, est.h, T) * lp0;
  }
  return s;
}

EvidenceSeries roa_evidence(const ProjectionLedger& ledger) {
  EvidenceSeries s{ledger.horizon(), {}, {}};
  auto& mean = s.add("mean");
  auto& sd = s.add("sd");
  auto& se = s.add("se");
  for (int t = 1; t <= ledger.horizon(); ++t) {
    const auto x = per_scenario(ledger, [&](std::size_t p) {
      const auto prev = ledger.balance(p, t - 1);
      const auto& r = ledger.row(p, t);
      return prev.bv != 0.0 ? (r.market_return - r.forward * prev.mv) / prev.bv : 0.0;
    });
    const auto st = sample_stats(x);
    mean[idx(t)] = st.mean;
    sd[idx(t)] = st.sd;
    se[idx(t)] = st.se;
  }
  return s;
}

EvidenceSeries ug_release_evidence(const ProjectionLedger& ledger, const EstimatorResult& est,
                                   std::span<const double> discount) {
  EvidenceSeries s{ledger.horizon(), {}, {}};
  const int T = ledger.horizon();
  const double ug0 = ledger.initial().ug;
  auto& release = s.add("E_release");
  auto& model = s.add("model_release");
  for (int t = 1; t <= T; ++t) {
    release[idx(t)] = mean_over(ledger, [&](std::size_t p) {
      const auto prev = ledger.balance(p, t - 1);
      const auto now = ledger.balance(p, t);
      return ledger.row(p, t).forward * prev.ug - (now.ug - prev.ug);
    });
    if (idx(t) < discount.size())
      model[idx(t)] = (decay(t - 1, est.d, T) - decay(t, est.d, T)) * ug0 / discount[idx(t)];
  }
  return s;
}

GsHatEvidence gs_hat_evidence(const ProjectionLedger& ledger, const EstimatorResult& est, double lp0) {
  GsHatEvidence out;
  const int T = ledger.horizon();
  const std::size_t n = ledger.scenarios();
  out.series.horizon = T;
  auto& gs_m = out.series.add("E_gs");
  auto& gs_sd = out.series.add("SD_gs");
  auto& hat_m = out.series.add("E_gs_hat");
  auto& hat_sd = out.series.add("SD_gs_hat");
  auto& dgs_m = out.series.add("E_disc_gs");
  auto& dgs_sd = out.series.add("SD_disc_gs");
  auto& dhat_m = out.series.add("E_disc_gs_hat");
  auto& dhat_sd = out.series.add("SD_disc_gs_hat");

  std::vector<double> cog(n, 0.0), cog_hat(n, 0.0);
  std::vector<double> g(n), gh(n), dg(n), dgh(n);
  for (int t = 1; t <= T; ++t) {
    const double scale = (1.0 + est.theta) * decay(t - 1, est.h, T) * lp0;
    const double k = idx(t) < est.strike.size() ? est.strike[idx(t)] : 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const auto& r = ledger.row(p, t);
      g[p] = r.gs;
      gh[p] = (r.forward - k) * scale;
      dg[p] = g[p] / r.numeraire;
      dgh[p] = gh[p] / r.numeraire;
      cog[p] += negative_part(g[p]) / r.numeraire;
      cog_hat[p] += negative_part(gh[p]) / r.numeraire;
    }
    const auto a = sample_stats(g), b = sample_stats(gh), c = sample_stats(dg), d = sample_stats(dgh);
    gs_m[idx(t)] = a.mean;
    gs_sd[idx(t)] = a.sd;
    hat_m[idx(t)] = b.mean;
    hat_sd[idx(t)] = b.sd;
    dgs_m[idx(t)] = c.mean;
    dgs_sd[idx(t)] = c.sd;
    dhat_m[idx(t)] = d.mean;
    dhat_sd[idx(t)] = d.sd;
  }
  const auto sc = sample_stats(cog), sh = sample_stats(cog_hat);
  out.cog = sc.mean;
  out.cog_se = sc.se;
  out.cog_hat_mc = sh.mean;
  out.cog_hat_mc_se = sh.se;
  return out;
}

std::string evidence_csv(const EvidenceSeries& series) {
  std::ostringstream os;
  os.precision(12);
  os << "t,statistic,value\n";
  for (int t = 0; t <= series.horizon; ++t)
    for (std::size_t k = 0; k < series.names.size(); ++k) {
      const double v = series.values[k][idx(t)];
      if (std::isnan(v)) continue;
      os << t << ',' << series.names[k] << ',' << v << '\n';
    }
  return os.str();
}

}  // namespace alm
