#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "alm/projection.hpp"

namespace alm {

struct Estimate {
  double value = 0.0;
  double mce = 0.0;  // Monte Carlo standard error
};

struct ValuationResult {
  Estimate gb;     // sum P(0,t)(gbf + exp - pr) when a curve is supplied
  Estimate gb_mc;  // E[sum B_t^{-1}(gbf + exp - pr)]
  Estimate fdb_cf;
  Estimate fdb_rep;
  Estimate shg;
  Estimate cog;
  Estimate tax;
  Estimate vif;
  Estimate mvt;  // E[B_T^{-1} MV_T]
  Estimate term_i;
  Estimate term_ii;
  Estimate term_iii;
  double fdb0 = 0.0;
  double mv0 = 0.0;
  double lp0 = 0.0;
  double ug0 = 0.0;
  double sf0 = 0.0;
  double gph = 0.0;
  double lt_cf = 0.0;
  double lt_rep = 0.0;
  std::size_t scenarios = 0;
  std::size_t blown_up = 0;
};

// Deflated per-scenario sums; one entry per scenario.
struct ScenarioValues {
  std::vector<double> gb, fdb, shg, cog, tax, mvt, term_i, term_ii, term_iii;
};

ScenarioValues scenario_values(const ProjectionLedger& ledger, double gph);

// GB = E[sum B_t^{-1}(gbf + exp - pr)]
Estimate gb_value(const ProjectionLedger& ledger);
// E[sum B_t^{-1} ph_t]
Estimate fdb_cf(const ProjectionLedger& ledger);

double fdb_seed(double sf0, double lp0, double ug0, double gb, double gph);

double leakage(double mv0, double gb, double fdb, double shg, double cog, double tax, double mvt);

// GB sum P(0,t)(gbf + exp - pr) when a curve is supplied; the guaranteed flows are
// scenario independent and E[B_t^{-1}] = P(0,t).
double gb_deterministic(const ProjectionLedger& ledger, std::span<const double> discount);

ValuationResult value_ledger(const ProjectionLedger& ledger, double gph, std::span<const double> discount = {},
                             std::size_t blown_up = 0);

std::string valuation_json(const ValuationResult& r);

}  // namespace alm
