#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "alm/diagnostics.hpp"
#include "alm/estimator.hpp"
#include "alm/management.hpp"
#include "alm/projection.hpp"
#include "alm/scenario_engine.hpp"
#include "alm/valuation.hpp"

namespace alm {

struct EsgSettings {
  double a = 0.1;
  double b = 0.5;
  double c = 0.12;
  double d = 0.05;
  std::vector<double> angles;  // per label m; linear in m when empty
  double angle_step = 0.03;
  double v0 = 4e-4;  // non-positive or absent in the file disables taming
  double stretch = 2.0;
  double forward_cap = 10.0;
  bool antithetic = false;
  int extra_tenors = 10;  // grid count = horizon + extra_tenors
};

struct RunConfig {
  std::filesystem::path base_dir;
  std::string curve_file;
  std::string model_points_file;
  std::string assets_file;
  std::string decrements_file;
  EsgSettings esg;
  ManagementConfig management;
  LcmRule bond_rule = LcmRule::augmented;
  std::size_t scenarios = 5000;
  std::uint64_t seed = 1;
  int horizon = 60;
  std::optional<double> lp0;  // policies rescaled to this LP_0
  double sf0 = 20.0;
  std::vector<double> ug_ratios{-0.10, 0.05, 0.20};
  std::vector<double> pi0s{0.95, 1.0, 1.05};
  double base_ug_ratio = 0.05;
  double base_pi0 = 1.0;
  std::optional<double> iv;  // flat normal vol; model-implied when empty
  std::string out_dir = "results";

  static RunConfig parse(const std::string& json_text, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);
  void validate() const;
  std::filesystem::path resolve(const std::string& file) const;
};

struct Books {
  InitialCurve curve;
  PortfolioState portfolio;
  std::vector<ModelPoint> points;
  double sf0 = 0.0;

  double lp0() const;
  double ug_ratio() const { return portfolio.ug() / portfolio.bv(); }
};

InitialCurve load_curve(const std::filesystem::path& path, int count);
std::vector<ModelPoint> load_model_points(const std::filesystem::path& path,
                                          const std::filesystem::path& decrements);
PortfolioState load_assets(const std::filesystem::path& path, const InitialCurve& curve);
Books load_books(const RunConfig& config);

// Shifts the coupons of initial bonds (book values fixed) to reach UG_0/BV_0 = ratio,
// and scales every premium by pi0.
Books perturb_initial_state(const Books& books, double ug_ratio, double pi0);

EsgConfig esg_config(const RunConfig& config, const InitialCurve& curve);

// Coupon and redemption flows of the bonds held, index t = 0..horizon.
std::vector<double> bond_cash_flows(const PortfolioState& portfolio, int horizon);

EstimatorInputs estimator_inputs(const Books& books, int horizon, double gph, std::optional<double> theta,
                                 std::vector<double> iv);

struct CellResult {
  double ug_ratio = 0.0;
  double pi0 = 1.0;
  ValuationResult valuation;
  EstimatorResult estimate;
  GsHatEvidence gs_hat;
  double fdb_mc = 0.0;  // FDB_CF
  double delta = 0.0;   // FDB-hat - FDB_rep
  std::size_t theta_breaches = 0;
  std::vector<std::pair<std::string, EvidenceSeries>> evidence;
};

CellResult run_cell(const RunConfig& config, const Books& base, const ScenarioSet& scenarios,
                    const std::vector<double>& iv, double ug_ratio, double pi0,
                    ProjectionLedger* ledger_out = nullptr);

std::string results_table(const std::vector<CellResult>& cells);
std::string results_csv(const std::vector<CellResult>& cells);
std::string cell_json(const CellResult& cell);

struct PublicDataFlags {
  bool gc_adjust = true;
  bool ug_scale = true;
  bool deduct_sf = false;
};

struct PublicData {
  std::string year;
  double l0 = 0.0;
  double mv0 = 0.0;
  std::optional<double> fdb_co;
  EstimatorInputs inputs;
};

// Two-column field,value file; see data/allianz2022.csv.
PublicData ingest_public_data(const std::filesystem::path& path, const PublicDataFlags& flags);
std::string public_estimate_table(const PublicData& data, const EstimatorResult& result);

struct RunSummary {
  std::vector<CellResult> cells;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Runs the grid (or only the base cell) and writes tables, per-cell JSON and evidence CSVs to out.
RunSummary run(const RunConfig& config, bool full_grid, const std::filesystem::path& out);

}  // namespace alm
