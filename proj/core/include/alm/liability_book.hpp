#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace alm {

// Gompertz best-estimate mortality with a first-order loading, a flat surrender
// rate and expense rates per unit of sum insured.
struct DecrementBasis {
  std::string id = "default";
  double gompertz_a = 5e-5;
  double gompertz_b = 0.09;
  double first_order_loading = 1.3;
  double surrender = 0.03;
  double expense_first_order = 0.004;
  double expense_best_estimate = 0.003;

  double mortality(double age) const;
};

// Compact model point before the actuarial pre-pass.
struct ContractTerms {
  std::string id;
  int maturity = 1;  // remaining term T^x in years
  double rho = 0.0;
  std::optional<double> premium;  // per policy and year; equivalence premium when empty
  double sum_insured = 1.0;       // M^x per policy
  double policies = 1.0;
  double age = 40.0;  // age at valuation
  int elapsed = 0;    // years since inception
  double legacy_bonus = 0.0;  // pre-valuation bonus per policy
  std::string table = "default";
};

struct ModelPoint {
  std::string id;
  int maturity = 1;
  double rho = 0.0;
  double premium = 0.0;
  double sum_insured = 0.0;

  // Schedules indexed t = 0..T^x; flows at t = 0 are zero.
  std::vector<double> reserve;     // V^x_t
  std::vector<double> legacy;      // (DB^x)^0_t
  std::vector<double> in_force;    // policies after decrements of year t
  std::vector<double> premiums;    // pr^x_t
  std::vector<double> benefits;    // gbf^x_t
  std::vector<double> expenses;    // exp^x_t
  std::vector<double> death_rate;  // q during year t
  std::vector<double> surrender_rate;  // w during year t, 0 at maturity

  double kappa(int t) const { return 0.9 + 0.1 * static_cast<double>(t) / maturity; }
  double reserve_at(int t) const;
  double legacy_at(int t) const;
  double flow(const std::vector<double>& schedule, int t) const;
  void validate() const;
};

// Per-policy first-order reserve path v_0..v_T at valuation time.
std::vector<double> policy_reserves(const ContractTerms& terms, const DecrementBasis& basis,
                                    double premium);
double equivalence_premium(const ContractTerms& terms, const DecrementBasis& basis);
ModelPoint build_model_point(const ContractTerms& terms, const DecrementBasis& basis);

void scale_policies(std::vector<ModelPoint>& points, double factor);
void scale_premiums(std::vector<ModelPoint>& points, double factor);

struct LiabilitySchedules {
  int horizon = 0;
  std::vector<double> reserve;   // V_t
  std::vector<double> legacy;    // DB^0_t
  std::vector<double> premiums;  // pr_t
  std::vector<double> benefits;  // gbf_t
  std::vector<double> expenses;  // exp_t
  std::vector<double> rho;       // V_{t-1}-weighted guarantee rate, index t >= 1
  std::vector<double> rho_lpg;   // LPG_{t-1}-weighted guarantee rate

  double lpg(int t) const { return reserve.at(static_cast<std::size_t>(t)) + legacy.at(static_cast<std::size_t>(t)); }
};

LiabilitySchedules aggregate(std::span<const ModelPoint> points, int horizon);

// Sum rho^x V^x_{t-1} / V_{t-1}; zero with run-off flag when V_{t-1} = 0.
double technical_rate(std::span<const ModelPoint> points, int t, bool* runoff = nullptr);
double technical_gains(double rho, double v_prev, double v_now, double pr, double abf, double expense,
                       double sg, bool* runoff = nullptr);

// Eligible points X_t = {x : T^x > t} with their opening reserves V^x_{t-1}.
struct ParticipationBase {
  std::vector<std::size_t> index;
  std::vector<double> rho;
  std::vector<double> reserve;

  bool empty() const { return index.empty(); }
  double min_rate() const;
};

ParticipationBase participation_base(std::span<const ModelPoint> points, int t);
double participation_amount(const ParticipationBase& base, double tau);
// Inverse of participation_amount on its increasing branch.
double participation_rate(const ParticipationBase& base, double amount);

struct BonusCohort {
  int year = 0;
  double declared = 0.0;
  double released_ph = 0.0;
  double released_sg = 0.0;
  std::vector<double> balance;  // per model point

  double remaining() const;
};

struct Payout {
  double ph = 0.0;
  double sg = 0.0;
};

// Declared bonuses DB per model point, with an optional per-cohort view.
class BonusLedger {
 public:
  BonusLedger() = default;
  BonusLedger(std::size_t points, bool track_cohorts);

  // Releases at t: deaths and maturities in full, surrenders at kappa_t.
  Payout payout(std::span<const ModelPoint> points, int t);
  // Books ph* at t and returns the implied participation rate.
  double declare(double ph_star, std::span<const ModelPoint> points, int t);

  double total() const;
  double balance(std::size_t point) const { return balance_.at(point); }
  const std::vector<double>& balances() const { return balance_; }
  const std::vector<BonusCohort>& cohorts() const { return cohorts_; }
  bool tracking() const { return track_; }

 private:
  std::vector<double> balance_;
  std::vector<BonusCohort> cohorts_;
  bool track_ = false;
};

struct LiabilityState {
  double v = 0.0;
  double db0 = 0.0;
  double db = 0.0;
  double sf = 0.0;
  double tau = 0.0;

  double lp() const { return v + db0 + db; }
  double lpg() const { return v + db0; }
};

// DB_t = DB_{t-1} + ph* - ph - sg*, SF_t = SF_{t-1} + gph gs+ - ph*.
LiabilityState roll_forward(const LiabilityState& prev, double v_now, double db0_now, double ph_star,
                            double ph, double sg, double gph_gs_plus, double tau);

}  // namespace alm
