#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alm/scenario_engine.hpp"

namespace alm {

// Schedules are indexed by year t; entry 0 is unused for flows.
struct EstimatorInputs {
  double lp0 = 0.0;
  double sf0 = 0.0;
  double ug0 = 0.0;
  double db0_0 = 0.0;  // DB^0 at time 0
  double gph = 0.755;
  std::optional<double> theta;  // SF_0 / LP_0 when empty
  std::optional<double> gb;     // sum P(0,t)(gbf + exp - pr) when empty
  int horizon = 0;
  std::vector<double> discount;  // P(0,t), t = 0..T
  std::vector<double> iv;        // IV_t, t = 1..T at index t
  std::vector<double> premiums;
  std::vector<double> benefits;
  std::vector<double> expenses;
  std::vector<double> lpg;  // LPG_t, t = 0..T
  std::vector<double> rho;  // LPG-weighted guarantee rate, index t >= 1
  std::vector<double> bond_cash_flows;  // initial bond portfolio, index t >= 1
  std::optional<double> h;
  std::optional<double> d;
  std::optional<std::vector<double>> gamma_override;  // replaces gamma-hat

  // Published component values; each replaces the computed term when present.
  std::optional<double> fdb0_override;
  std::optional<double> ii_override;
  std::optional<double> iii_override;
  std::optional<double> cog_override;

  void validate() const;
};

struct EstimatorResult {
  double fdb0 = 0.0;
  double gb = 0.0;
  double theta = 0.0;
  double i_hat = 0.0;
  double ii_hat = 0.0;
  double iii_hat = 0.0;
  double cog_hat = 0.0;
  double lb = 0.0;
  double ub = 0.0;
  double fdb_hat = 0.0;
  double eps = 0.0;
  double h0 = 0.0;
  double h = 0.0;
  double d = 0.0;
  bool runoff = false;  // some LPG_{t-1} = 0

  std::vector<double> sigma, sigma_db, gamma, strike, floorlet, lh, ld;
};

struct Durations {
  double h0 = 0.0;
  double h = 0.0;
};

// l_t = 2^{-t/x} for t < T and 0 at T
double decay(int t, double x, int horizon);

Durations duration_h(std::span<const double> discount, std::span<const double> net_flows, double fdb0);

struct SigmaSchedule {
  std::vector<double> sigma;
  std::vector<double> sigma_db;
};

SigmaSchedule sigma_schedule(double db0_0, double lp0, double fdb0, double gb, double h, int horizon);

std::vector<double> gamma_hat(std::span<const double> rho, std::span<const double> lpg,
                              std::span<const double> premiums, std::span<const double> benefits,
                              std::span<const double> expenses, const SigmaSchedule& sigma, bool* runoff = nullptr);

double bond_duration(std::span<const double> discount, std::span<const double> cash_flows);

double strike(int t, std::span<const double> discount, double ug0, double lp0, double theta, double sigma_t,
              double rho_t, double gamma_t, double h, double d, int horizon);

// F^0_{t-1} over [t-1, t]
double initial_forward(std::span<const double> discount, int t);

// Bachelier floorlet on F_{t-1} with payment at t
double floorlet_black(int t, double f0, double k, double iv, double p0t);

struct Bracket {
  double fdb_hat = 0.0;
  double eps = 0.0;
};

// Midpoint and half-width of [lb, ub]
Bracket bracket(double lb, double ub);

EstimatorResult bounds(const EstimatorInputs& in);

// Monte Carlo floorlet E[B_t^{-1}(k - F_{t-1})^+]
double mc_floorlet(const ScenarioSet& scenarios, int t, double k);
// Normal vols matched to the dispersion of F_{t-1} under the t-forward measure, index t = 1..T
std::vector<double> implied_normal_vols(const ScenarioSet& scenarios, int horizon);

std::string estimator_json(const EstimatorResult& r);

}  // namespace alm
