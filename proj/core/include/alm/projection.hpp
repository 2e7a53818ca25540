#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alm/asset_book.hpp"
#include "alm/liability_book.hpp"
#include "alm/management.hpp"
#include "alm/scenario_engine.hpp"

namespace alm {

enum LedgerFlag : std::uint32_t {
  kFlagRunoff = 1u << 0,
  kFlagBlownUp = 1u << 1,
  kFlagNoEligible = 1u << 2,
  kFlagInjection = 1u << 3,
  kFlagThetaBreach = 1u << 4,
};

struct LedgerRow {
  double gs = 0.0;
  double cog = 0.0;
  double shg = 0.0;
  double tax = 0.0;
  double ph_star = 0.0;
  double ph = 0.0;
  double sg = 0.0;
  double pr = 0.0;
  double gbf = 0.0;
  double exp = 0.0;
  double roa = 0.0;
  double market_return = 0.0;  // MV change plus asset income before liability flows
  double bv = 0.0;
  double mv = 0.0;
  double ug = 0.0;
  double v = 0.0;
  double db0 = 0.0;
  double db = 0.0;
  double sf = 0.0;
  double nu = 0.0;
  double eta = 0.0;
  double tau = 0.0;
  double tau_target = 0.0;
  double forward = 0.0;    // F_{t-1}
  double numeraire = 0.0;  // B_t
  double equity_mv = 0.0;
  double property_mv = 0.0;
  double equity_ug = 0.0;
  double property_ug = 0.0;
  std::uint32_t flags = 0;

  double lp() const { return v + db0 + db; }
};

struct BalanceSnapshot {
  double bv = 0.0;
  double mv = 0.0;
  double ug = 0.0;
  double v = 0.0;
  double db0 = 0.0;
  double db = 0.0;
  double sf = 0.0;

  double lp() const { return v + db0 + db; }
};

class ProjectionLedger {
 public:
  ProjectionLedger() = default;
  ProjectionLedger(std::size_t scenarios, int horizon, BalanceSnapshot initial);

  std::size_t scenarios() const { return scenarios_; }
  int horizon() const { return horizon_; }
  const BalanceSnapshot& initial() const { return initial_; }

  // t = 1..T
  LedgerRow& row(std::size_t p, int t) { return rows_[index(p, t)]; }
  const LedgerRow& row(std::size_t p, int t) const { return rows_[index(p, t)]; }
  // Balance items at t = 0..T.
  BalanceSnapshot balance(std::size_t p, int t) const;

  std::vector<std::vector<double>>& cohort_mu() { return cohort_mu_; }
  const std::vector<std::vector<double>>& cohort_mu() const { return cohort_mu_; }

 private:
  std::size_t index(std::size_t p, int t) const {
    return p * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(t - 1);
  }

  std::size_t scenarios_ = 0;
  int horizon_ = 0;
  BalanceSnapshot initial_;
  std::vector<LedgerRow> rows_;
  std::vector<std::vector<double>> cohort_mu_;  // sum_t mu_t^s per cohort, when tracked
};

struct ProjectionConfig {
  ManagementConfig management;
  LcmRule bond_rule = LcmRule::augmented;
  bool track_cohorts = false;
  double parity_tolerance = 1e-6;  // relative to MV_0
  int equity_stream = 0;
  int property_stream = 1;
};

struct ProjectionInputs {
  PortfolioState portfolio;
  std::vector<ModelPoint> points;
  double sf0 = 0.0;
  int horizon = 0;
};

struct ScenarioState {
  PortfolioState portfolio;
  LiabilityState liability;
  BonusLedger bonus;
  double tau_prev = 0.0;  // last declared rate, carried through years without declaration
};

struct YearData {
  int t = 0;
  std::vector<double> disc;  // P(t, t+k)
  double forward = 0.0;      // F_{t-1}
  double l10 = 0.0;          // F_t^{t+9}
  double numeraire = 0.0;    // B_t
  double z_equity = 0.0;
  double z_property = 0.0;
};

YearData year_data(const ScenarioSet& scenarios, std::size_t p, int t);

ScenarioState initial_scenario_state(const ProjectionInputs& inputs, const ProjectionConfig& config,
                                     double tau0);

// One accounting year in rule order; throws ParityError on a parity breach.
LedgerRow project_year(ScenarioState& state, const YearData& data, std::span<const ModelPoint> points,
                       const LiabilitySchedules& schedules, const ProjectionConfig& config, double theta,
                       double mv0);

double default_theta(const ProjectionInputs& inputs);
double default_tau0(const ScenarioSet& scenarios);

ProjectionLedger run_projection(const ScenarioSet& scenarios, const ProjectionInputs& inputs,
                                const ProjectionConfig& config);

std::string ledger_csv(const ProjectionLedger& ledger);

}  // namespace alm
