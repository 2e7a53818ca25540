#include "alm/liability_book.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alm/errors.hpp"

namespace alm {

double DecrementBasis::mortality(double age) const {
  return std::clamp(gompertz_a * std::exp(gompertz_b * age), 0.0, 1.0);
}

double ModelPoint::reserve_at(int t) const {
  if (t < 0 || t > maturity) return 0.0;
  return reserve[static_cast<std::size_t>(t)];
}

double ModelPoint::legacy_at(int t) const {
  if (t < 0 || t > maturity) return 0.0;
  return legacy[static_cast<std::size_t>(t)];
}

double ModelPoint::flow(const std::vector<double>& schedule, int t) const {
  if (t < 1 || t > maturity) return 0.0;
  return schedule[static_cast<std::size_t>(t)];
}

void ModelPoint::validate() const {
  const auto n = static_cast<std::size_t>(maturity) + 1;
  if (maturity < 1) throw DataError("model point " + id + ": maturity must be at least 1");
  for (const auto* s : {&reserve, &legacy, &in_force, &premiums, &benefits, &expenses, &death_rate,
                        &surrender_rate}) {
    if (s->size() != n) throw DataError("model point " + id + ": schedule length differs from T+1");
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (reserve[t] < -1e-9) throw DataError("model point " + id + ": negative reserve");
    if (legacy[t] < -1e-9) throw DataError("model point " + id + ": negative legacy bonus");
    if (death_rate[t] < 0.0 || death_rate[t] > 1.0 || surrender_rate[t] < 0.0 || surrender_rate[t] > 1.0)
      throw DataError("model point " + id + ": decrement rate outside [0,1]");
  }
  if (reserve[n - 1] > 1e-9 || legacy[n - 1] > 1e-9)
    throw DataError("model point " + id + ": reserves must run off at maturity");
}

namespace {

// Contract-year reserves w_0..w_{full} from inception.
std::vector<double> inception_reserves(const ContractTerms& terms, const DecrementBasis& basis,
                                       double premium) {
  const int full = terms.elapsed + terms.maturity;
  const double entry_age = terms.age - terms.elapsed;
  const double m = terms.sum_insured;
  std::vector<double> w(static_cast<std::size_t>(full) + 1, 0.0);
  for (int k = full; k >= 1; --k) {
    const double q = std::min(1.0, basis.first_order_loading * basis.mortality(entry_age + k - 1));
    const double end = w[static_cast<std::size_t>(k)] + (k == full ? m : -premium);
    w[static_cast<std::size_t>(k - 1)] =
        (basis.expense_first_order * m + q * m + (1.0 - q) * end) / (1.0 + terms.rho);
  }
  return w;
}

void check_terms(const ContractTerms& terms) {
  if (terms.maturity < 1) throw DataError("model point " + terms.id + ": maturity must be at least 1");
  if (terms.elapsed < 0) throw DataError("model point " + terms.id + ": negative elapsed term");
  if (!(terms.policies >= 0.0) || !(terms.sum_insured >= 0.0))
    throw DataError("model point " + terms.id + ": negative policy count or sum insured");
  if (!(terms.rho > -1.0)) throw DataError("model point " + terms.id + ": guarantee rate must exceed -1");
}

}  // namespace

std::vector<double> policy_reserves(const ContractTerms& terms, const DecrementBasis& basis,
                                    double premium) {
  check_terms(terms);
  const auto w = inception_reserves(terms, basis, premium);
  return {w.begin() + terms.elapsed, w.end()};
}

double equivalence_premium(const ContractTerms& terms, const DecrementBasis& basis) {
  check_terms(terms);
  const double free = inception_reserves(terms, basis, 0.0).front();
  const double unit = free - inception_reserves(terms, basis, 1.0).front();
  if (unit <= 0.0) return 0.0;
  return free / unit;
}

ModelPoint build_model_point(const ContractTerms& terms, const DecrementBasis& basis) {
  check_terms(terms);
  ModelPoint x;
  x.id = terms.id;
  x.maturity = terms.maturity;
  x.rho = terms.rho;
  x.premium = terms.premium ? *terms.premium : equivalence_premium(terms, basis);
  x.sum_insured = terms.sum_insured;

  const auto v = policy_reserves(terms, basis, x.premium);
  const auto n = static_cast<std::size_t>(terms.maturity) + 1;
  for (auto* s : {&x.reserve, &x.legacy, &x.in_force, &x.premiums, &x.benefits, &x.expenses,
                  &x.death_rate, &x.surrender_rate})
    s->assign(n, 0.0);

  const double m = terms.sum_insured;
  const double b0 = terms.legacy_bonus;
  double l = terms.policies;
  x.in_force[0] = l;
  x.reserve[0] = l * v[0];
  x.legacy[0] = l * b0;
  for (int t = 1; t <= terms.maturity; ++t) {
    const auto i = static_cast<std::size_t>(t);
    const bool last = t == terms.maturity;
    const double q = basis.mortality(terms.age + t - 1);
    const double w = last ? 0.0 : basis.surrender;
    const double deaths = l * q;
    const double survivors = l - deaths;
    const double surrenders = survivors * w;
    const double next = last ? 0.0 : survivors - surrenders;

    x.death_rate[i] = q;
    x.surrender_rate[i] = w;
    x.premiums[i] = last ? 0.0 : next * x.premium;
    x.expenses[i] = l * basis.expense_best_estimate * m;
    x.benefits[i] = deaths * (m + b0) + surrenders * x.kappa(t) * (v[i - 1] + b0) +
                    (last ? survivors * (m + b0) : 0.0);
    x.in_force[i] = next;
    x.reserve[i] = next * v[i];
    x.legacy[i] = next * b0;
    l = next;
  }
  x.validate();
  return x;
}

void scale_policies(std::vector<ModelPoint>& points, double factor) {
  if (!(factor > 0.0)) throw DomainError("scale_policies: factor must be positive");
  for (auto& x : points) {
    for (auto* s : {&x.reserve, &x.legacy, &x.in_force, &x.premiums, &x.benefits, &x.expenses})
      for (double& v : *s) v *= factor;
  }
}

void scale_premiums(std::vector<ModelPoint>& points, double factor) {
  if (!(factor >= 0.0)) throw DomainError("scale_premiums: factor must be non-negative");
  for (auto& x : points) {
    x.premium *= factor;
    for (double& v : x.premiums) v *= factor;
  }
}

LiabilitySchedules aggregate(std::span<const ModelPoint> points, int horizon) {
  LiabilitySchedules s;
  s.horizon = horizon;
  const auto n = static_cast<std::size_t>(horizon) + 1;
  for (auto* v : {&s.reserve, &s.legacy, &s.premiums, &s.benefits, &s.expenses, &s.rho, &s.rho_lpg})
    v->assign(n, 0.0);
  for (const auto& x : points) {
    if (x.maturity > horizon) throw DataError("model point " + x.id + " matures after the horizon");
    for (int t = 0; t <= x.maturity; ++t) {
      const auto i = static_cast<std::size_t>(t);
      s.reserve[i] += x.reserve[i];
      s.legacy[i] += x.legacy[i];
      s.premiums[i] += x.premiums[i];
      s.benefits[i] += x.benefits[i];
      s.expenses[i] += x.expenses[i];
    }
  }
  for (int t = 1; t <= horizon; ++t) {
    double rv = 0.0;
    double rl = 0.0;
    for (const auto& x : points) {
      rv += x.rho * x.reserve_at(t - 1);
      rl += x.rho * (x.reserve_at(t - 1) + x.legacy_at(t - 1));
    }
    const auto i = static_cast<std::size_t>(t);
    const double v = s.reserve[i - 1];
    const double lpg = v + s.legacy[i - 1];
    s.rho[i] = v > 0.0 ? rv / v : 0.0;
    s.rho_lpg[i] = lpg > 0.0 ? rl / lpg : 0.0;
  }
  return s;
}

double technical_rate(std::span<const ModelPoint> points, int t, bool* runoff) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& x : points) {
    num += x.rho * x.reserve_at(t - 1);
    den += x.reserve_at(t - 1);
  }
  if (runoff) *runoff = den <= 0.0;
  return den > 0.0 ? num / den : 0.0;
}

double technical_gains(double rho, double v_prev, double v_now, double pr, double abf, double expense,
                       double sg, bool* runoff) {
  if (runoff) *runoff = v_prev <= 0.0;
  if (v_prev <= 0.0) return 0.0;
  return (rho * v_prev - (v_now - v_prev) + pr - abf - expense + sg) / v_prev;
}

double ParticipationBase::min_rate() const {
  if (rho.empty()) return 0.0;
  return *std::min_element(rho.begin(), rho.end());
}

ParticipationBase participation_base(std::span<const ModelPoint> points, int t) {
  ParticipationBase base;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& x = points[k];
    const double v = x.reserve_at(t - 1);
    if (x.maturity > t && v > 0.0) {
      base.index.push_back(k);
      base.rho.push_back(x.rho);
      base.reserve.push_back(v);
    }
  }
  return base;
}

double participation_amount(const ParticipationBase& base, double tau) {
  double s = 0.0;
  for (std::size_t k = 0; k < base.rho.size(); ++k) s += std::max(tau - base.rho[k], 0.0) * base.reserve[k];
  return s;
}

double participation_rate(const ParticipationBase& base, double amount) {
  if (base.empty()) throw LedgerError("participation_rate: no eligible model point");
  if (amount <= 0.0) return base.min_rate();
  std::vector<std::size_t> order(base.rho.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return base.rho[a] < base.rho[b]; });
  double weight = 0.0;
  double weighted_rate = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    weight += base.reserve[order[k]];
    weighted_rate += base.rho[order[k]] * base.reserve[order[k]];
    const double tau = (amount + weighted_rate) / weight;
    if (k + 1 == order.size() || tau <= base.rho[order[k + 1]]) return tau;
  }
  return base.min_rate();
}

double BonusCohort::remaining() const {
  double s = 0.0;
  for (double b : balance) s += b;
  return s;
}

BonusLedger::BonusLedger(std::size_t points, bool track_cohorts)
    : balance_(points, 0.0), track_(track_cohorts) {}

Payout BonusLedger::payout(std::span<const ModelPoint> points, int t) {
  if (points.size() != balance_.size()) throw LedgerError("payout: model point count changed");
  Payout out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& x = points[k];
    double& b = balance_[k];
    if (b == 0.0) continue;
    if (b < 0.0) throw LedgerError("payout: negative bonus balance");
    if (t > x.maturity) throw LedgerError("payout: balance left after maturity of " + x.id);
    double full = 0.0;  // fraction released in full
    double surr = 0.0;  // fraction released at kappa
    if (t == x.maturity) {
      full = 1.0;
    } else {
      const double q = x.death_rate[static_cast<std::size_t>(t)];
      full = q;
      surr = (1.0 - q) * x.surrender_rate[static_cast<std::size_t>(t)];
    }
    const double kappa = x.kappa(t);
    if (full + surr > 1.0 + 1e-12) throw LedgerError("payout: release exceeds balance");
    out.ph += b * (full + kappa * surr);
    out.sg += b * (1.0 - kappa) * surr;
    b = t == x.maturity ? 0.0 : b * (1.0 - full - surr);

    if (track_) {
      for (auto& c : cohorts_) {
        double& cb = c.balance[k];
        if (cb == 0.0) continue;
        c.released_ph += cb * (full + kappa * surr);
        c.released_sg += cb * (1.0 - kappa) * surr;
        cb = t == x.maturity ? 0.0 : cb * (1.0 - full - surr);
      }
    }
  }
  return out;
}

double BonusLedger::declare(double ph_star, std::span<const ModelPoint> points, int t) {
  if (ph_star < 0.0) throw DomainError("declare: negative declaration");
  if (points.size() != balance_.size()) throw LedgerError("declare: model point count changed");
  const ParticipationBase base = participation_base(points, t);
  if (ph_star == 0.0) return base.min_rate();
  if (base.empty()) throw LedgerError("declare: no eligible model point for a positive declaration");
  const double tau = participation_rate(base, ph_star);

  std::vector<double> w(base.index.size());
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = std::max(tau - base.rho[k], 0.0) * base.reserve[k];
    total += w[k];
  }
  if (!(total > 0.0)) {
    // degenerate root; fall back to reserve weights
    total = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) total += (w[k] = base.reserve[k]);
  }
  BonusCohort cohort;
  if (track_) {
    cohort.year = t;
    cohort.declared = ph_star;
    cohort.balance.assign(balance_.size(), 0.0);
  }
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double share = ph_star * w[k] / total;
    balance_[base.index[k]] += share;
    if (track_) cohort.balance[base.index[k]] = share;
  }
  if (track_) cohorts_.push_back(std::move(cohort));
  return tau;
}

double BonusLedger::total() const {
  double s = 0.0;
  for (double b : balance_) s += b;
  return s;
}

LiabilityState roll_forward(const LiabilityState& prev, double v_now, double db0_now, double ph_star,
                            double ph, double sg, double gph_gs_plus, double tau) {
  LiabilityState next;
  next.v = v_now;
  next.db0 = db0_now;
  next.db = prev.db + ph_star - ph - sg;
  next.sf = prev.sf + gph_gs_plus - ph_star;
  next.tau = tau;
  const double scale = 1e-9 * std::max({1.0, prev.sf + gph_gs_plus, prev.db + ph_star});
  if (next.sf < -scale) throw RuleViolation("roll_forward: surplus fund over-drawn");
  if (next.db < -scale) throw LedgerError("roll_forward: declared bonus account negative");
  return next;
}

}  // namespace alm
