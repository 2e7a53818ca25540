#include "alm/runner_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "alm/csv.hpp"
#include "alm/errors.hpp"

namespace alm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

std::string fmt(double v, int precision = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string cell_tag(double ug_ratio, double pi0) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "ug%+.2f_pi%.2f", ug_ratio, pi0);
  return buf;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig c;
  c.base_dir = base_dir;
  try {
    read_opt(j, "scenarios", c.scenarios);
    read_opt(j, "seed", c.seed);
    read_opt(j, "horizon", c.horizon);
    read_opt(j, "out", c.out_dir);
    if (j.contains("data")) {
      const json& d = j.at("data");
      read_opt(d, "curve", c.curve_file);
      read_opt(d, "model_points", c.model_points_file);
      read_opt(d, "assets", c.assets_file);
      read_opt(d, "decrements", c.decrements_file);
    }
    if (j.contains("esg")) {
      const json& e = j.at("esg");
      read_opt(e, "a", c.esg.a);
      read_opt(e, "b", c.esg.b);
      read_opt(e, "c", c.esg.c);
      read_opt(e, "d", c.esg.d);
      read_opt(e, "angles", c.esg.angles);
      read_opt(e, "angle_step", c.esg.angle_step);
      if (e.contains("v0")) c.esg.v0 = e.at("v0").is_null() ? 0.0 : e.at("v0").get<double>();
      read_opt(e, "f", c.esg.stretch);
      read_opt(e, "forward_cap", c.esg.forward_cap);
      read_opt(e, "antithetic", c.esg.antithetic);
      read_opt(e, "extra_tenors", c.esg.extra_tenors);
    }
    if (j.contains("management")) {
      const json& m = j.at("management");
      read_opt(m, "saa_band", c.management.saa_band);
      read_opt(m, "theta", c.management.theta);
      read_opt(m, "step_cap", c.management.step_cap);
      read_opt(m, "gph", c.management.gph);
      read_opt(m, "gsh", c.management.gsh);
      read_opt(m, "gtax", c.management.gtax);
      read_opt(m, "tau0", c.management.tau0);
      read_opt(m, "reinvest_term", c.management.reinvest_term);
      read_opt(m, "suppress_declarations", c.management.suppress_declarations);
      std::string rule = "augmented";
      read_opt(m, "bond_rule", rule);
      if (rule == "augmented") c.bond_rule = LcmRule::augmented;
      else if (rule == "strict") c.bond_rule = LcmRule::strict;
      else throw ConfigError("config: bond_rule must be augmented or strict");
    }
    if (j.contains("balance")) {
      const json& b = j.at("balance");
      read_opt(b, "lp0", c.lp0);
      read_opt(b, "sf0", c.sf0);
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      read_opt(g, "ug_ratios", c.ug_ratios);
      read_opt(g, "pi0", c.pi0s);
      read_opt(g, "base_ug_ratio", c.base_ug_ratio);
      read_opt(g, "base_pi0", c.base_pi0);
    }
    if (j.contains("estimator")) {
      const json& e = j.at("estimator");
      if (e.contains("iv") && e.at("iv").is_number()) c.iv = e.at("iv").get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.parent_path());
}

void RunConfig::validate() const {
  if (horizon < 2 || horizon % 2 != 0) throw ConfigError("config: horizon must be even and at least 2");
  if (scenarios < 1) throw ConfigError("config: scenarios must be positive");
  if (esg.extra_tenors < 0 || (horizon + esg.extra_tenors) % 2 != 0)
    throw ConfigError("config: extra_tenors must keep the tenor count even");
  if (curve_file.empty()) throw ConfigError("config: data.curve is required");
  if (model_points_file.empty()) throw ConfigError("config: data.model_points is required");
  if (assets_file.empty()) throw ConfigError("config: data.assets is required");
  for (const auto* f : {&curve_file, &model_points_file, &assets_file})
    if (!fs::exists(resolve(*f))) throw ConfigError("config: file not found: " + resolve(*f).string());
  if (!decrements_file.empty() && !fs::exists(resolve(decrements_file)))
    throw ConfigError("config: file not found: " + resolve(decrements_file).string());
  if (ug_ratios.empty() || pi0s.empty()) throw ConfigError("config: grid lists must not be empty");
  management.validate();
}

fs::path RunConfig::resolve(const std::string& file) const {
  const fs::path p(file);
  return p.is_absolute() ? p : base_dir / p;
}

double Books::lp0() const {
  double lp = 0.0;
  for (const auto& x : points) lp += x.reserve_at(0) + x.legacy_at(0);
  return lp;
}

InitialCurve load_curve(const fs::path& path, int count) {
  const CsvTable t = CsvTable::read(path.string());
  std::vector<double> mats, vals;
  const bool prices = t.has("discount");
  for (std::size_t r = 0; r < t.rows(); ++r) {
    mats.push_back(t.number(r, "maturity"));
    vals.push_back(t.number(r, prices ? "discount" : "zero_rate"));
  }
  return prices ? InitialCurve::from_zero_prices(mats, vals, count) : InitialCurve::from_zero_rates(mats, vals, count);
}

std::vector<ModelPoint> load_model_points(const fs::path& path, const fs::path& decrements) {
  std::map<std::string, DecrementBasis> tables;
  tables["default"] = DecrementBasis{};
  if (!decrements.empty()) {
    const CsvTable d = CsvTable::read(decrements.string());
    for (std::size_t r = 0; r < d.rows(); ++r) {
      DecrementBasis b;
      b.id = d.text(r, "id");
      b.gompertz_a = d.number(r, "gompertz_a");
      b.gompertz_b = d.number(r, "gompertz_b");
      b.first_order_loading = d.number(r, "first_order_loading");
      b.surrender = d.number(r, "surrender");
      b.expense_first_order = d.number(r, "expense_first_order");
      b.expense_best_estimate = d.number(r, "expense_best_estimate");
      tables[b.id] = b;
    }
  }
  const CsvTable t = CsvTable::read(path.string());
  std::vector<ModelPoint> points;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    ContractTerms c;
    c.id = t.text(r, "id");
    c.maturity = static_cast<int>(t.number(r, "maturity"));
    c.rho = t.number(r, "rho");
    c.premium = t.optional_number(r, "premium");
    c.sum_insured = t.number(r, "sum_insured");
    c.policies = t.number(r, "policies");
    c.age = t.number(r, "age");
    c.elapsed = static_cast<int>(t.optional_number(r, "elapsed").value_or(0.0));
    c.legacy_bonus = t.optional_number(r, "legacy_bonus").value_or(0.0);
    if (t.has("table") && !t.text(r, "table").empty()) c.table = t.text(r, "table");
    const auto it = tables.find(c.table);
    if (it == tables.end()) throw DataError(path.string() + ": unknown decrement table '" + c.table + "'");
    points.push_back(build_model_point(c, it->second));
  }
  if (points.empty()) throw DataError(path.string() + ": no model points");
  return points;
}

PortfolioState load_assets(const fs::path& path, const InitialCurve& curve) {
  const CsvTable t = CsvTable::read(path.string());
  PortfolioState pf;
  const auto& disc = curve.discounts();
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const std::string& cls = t.text(r, "class");
    if (cls == "cash") {
      pf.cash.amount += t.number(r, "book_value");
    } else if (cls == "bond") {
      BondPosition b;
      b.maturity = static_cast<int>(t.number(r, "maturity"));
      b.nominal = t.number(r, "nominal");
      b.coupon = t.number(r, "coupon");
      b.bv = t.optional_number(r, "book_value").value_or(b.nominal);
      if (b.maturity < 1 || b.maturity > curve.size())
        throw DataError(path.string() + ": bond maturity outside the curve");
      b.mv = bond_market_value(b, 0, disc);
      pf.bonds.push_back(b);
    } else if (cls == "equity") {
      EquityPosition e;
      e.bv = t.number(r, "book_value");
      e.mv = t.optional_number(r, "market_value").value_or(e.bv);
      e.sigma = t.number(r, "sigma");
      e.yield = t.number(r, "yield");
      pf.equities.push_back(e);
    } else if (cls == "property") {
      PropertyPosition p;
      const double bv = t.number(r, "book_value");
      const double mv = t.optional_number(r, "market_value").value_or(bv);
      const double land = t.number(r, "land_share");
      p.bv_land = land * bv;
      p.bv_building = bv - p.bv_land;
      p.mv_land = land * mv;
      p.mv_building = mv - p.mv_land;
      p.horizon = static_cast<int>(t.optional_number(r, "horizon").value_or(30.0));
      p.sigma = t.number(r, "sigma");
      p.yield = t.number(r, "yield");
      pf.properties.push_back(p);
    } else {
      throw DataError(path.string() + ": unknown asset class '" + cls + "'");
    }
  }
  pf.set_targets_from_market_values();
  return pf;
}

namespace {

void scale_assets(PortfolioState& pf, double f, const InitialCurve& curve) {
  pf.cash.amount *= f;
  for (auto& b : pf.bonds) {
    b.nominal *= f;
    b.bv *= f;
    b.mv = bond_market_value(b, 0, curve.discounts());
  }
  for (auto& e : pf.equities) {
    e.bv *= f;
    e.mv *= f;
  }
  for (auto& p : pf.properties) {
    p.bv_building *= f;
    p.bv_land *= f;
    p.mv_building *= f;
    p.mv_land *= f;
  }
}

}  // namespace

Books load_books(const RunConfig& config) {
  Books b;
  b.curve = load_curve(config.resolve(config.curve_file), config.horizon + config.esg.extra_tenors);
  b.points = load_model_points(config.resolve(config.model_points_file),
                               config.decrements_file.empty() ? fs::path{} : config.resolve(config.decrements_file));
  for (const auto& x : b.points)
    if (x.maturity > config.horizon) throw DataError("model point " + x.id + " matures after the horizon");
  if (config.lp0) {
    const double lp = b.lp0();
    if (!(lp > 0.0)) throw DataError("model points carry no reserve at t = 0");
    scale_policies(b.points, *config.lp0 / lp);
  }
  b.sf0 = config.sf0;
  b.portfolio = load_assets(config.resolve(config.assets_file), b.curve);
  const double bv = b.portfolio.bv();
  if (!(bv > 0.0)) throw DataError("asset book value must be positive");
  scale_assets(b.portfolio, (b.lp0() + b.sf0) / bv, b.curve);
  b.portfolio.set_targets_from_market_values();
  return b;
}

Books perturb_initial_state(const Books& books, double ug_ratio, double pi0) {
  if (!(pi0 > 0.0)) throw ConfigError("perturb: pi0 must be positive");
  Books out = books;
  PortfolioState& pf = out.portfolio;
  const auto& disc = out.curve.discounts();
  const double target = ug_ratio * pf.bv();
  const double gap = target - pf.ug();
  if (std::abs(gap) > 1e-12 * pf.bv()) {
    double annuity = 0.0;
    for (const auto& b : pf.bonds)
      for (int k = 1; k <= b.maturity; ++k) annuity += b.nominal * disc[static_cast<std::size_t>(k)];
    if (!(annuity > 0.0)) throw ConfigError("perturb: no bonds to carry the unrealized gains");
    const double shift = gap / annuity;
    for (auto& b : pf.bonds) {
      b.coupon += shift;
      if (b.coupon < 0.0) throw ConfigError("perturb: UG_0/BV_0 target needs negative coupons");
      b.mv = bond_market_value(b, 0, disc);
    }
  }
  if (!(pf.mv() > 0.0)) throw ConfigError("perturb: market value is not positive");
  pf.set_targets_from_market_values();
  if (pi0 != 1.0) scale_premiums(out.points, pi0);
  return out;
}

EsgConfig esg_config(const RunConfig& config, const InitialCurve& curve) {
  EsgConfig e;
  const int count = config.horizon + config.esg.extra_tenors;
  e.grid = TenorGrid(count, 1.0);
  e.curve = curve;
  e.vol.a = config.esg.a;
  e.vol.b = config.esg.b;
  e.vol.c = config.esg.c;
  e.vol.d = config.esg.d;
  e.vol.angles = config.esg.angles.empty() ? MfVolParams::linear_angles(count, 0.0, config.esg.angle_step)
                                           : config.esg.angles;
  if (static_cast<int>(e.vol.angles.size()) < count) throw ConfigError("config: fewer angles than tenors");
  e.vol.v0 = config.esg.v0 > 0.0 ? config.esg.v0 : kTamingOff;
  e.vol.stretch = config.esg.stretch;
  e.scenarios = config.scenarios;
  e.seed = config.seed;
  e.forward_cap = config.esg.forward_cap;
  e.antithetic = config.esg.antithetic;
  return e;
}

std::vector<double> bond_cash_flows(const PortfolioState& portfolio, int horizon) {
  std::vector<double> cf(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (const auto& b : portfolio.bonds)
    for (int t = 1; t <= std::min(b.maturity, horizon); ++t) cf[static_cast<std::size_t>(t)] += bond_cash_flow(b, t);
  return cf;
}

EstimatorInputs estimator_inputs(const Books& books, int horizon, double gph, std::optional<double> theta,
                                 std::vector<double> iv) {
  const LiabilitySchedules s = aggregate(books.points, horizon);
  EstimatorInputs in;
  in.horizon = horizon;
  in.lp0 = books.lp0();
  in.sf0 = books.sf0;
  in.ug0 = books.portfolio.ug();
  in.db0_0 = s.legacy[0];
  in.gph = gph;
  in.theta = theta;
  in.discount.assign(books.curve.discounts().begin(), books.curve.discounts().begin() + horizon + 1);
  in.iv = std::move(iv);
  in.premiums = s.premiums;
  in.benefits = s.benefits;
  in.expenses = s.expenses;
  in.lpg.resize(static_cast<std::size_t>(horizon) + 1);
  for (int t = 0; t <= horizon; ++t) in.lpg[static_cast<std::size_t>(t)] = s.lpg(t);
  in.rho = s.rho_lpg;
  in.bond_cash_flows = bond_cash_flows(books.portfolio, horizon);
  return in;
}

CellResult run_cell(const RunConfig& config, const Books& base, const ScenarioSet& scenarios,
                    const std::vector<double>& iv, double ug_ratio, double pi0, ProjectionLedger* ledger_out) {
  CellResult cell;
  cell.ug_ratio = ug_ratio;
  cell.pi0 = pi0;
  const Books books = perturb_initial_state(base, ug_ratio, pi0);

  ProjectionInputs inputs{books.portfolio, books.points, books.sf0, config.horizon};
  ProjectionConfig pc;
  pc.management = config.management;
  pc.bond_rule = config.bond_rule;
  ProjectionLedger ledger = run_projection(scenarios, inputs, pc);

  const double theta = config.management.theta.value_or(default_theta(inputs));
  EstimatorInputs ei = estimator_inputs(books, config.horizon, config.management.gph, theta, iv);
  cell.valuation = value_ledger(ledger, config.management.gph, ei.discount, scenarios.blown_up_count());
  cell.estimate = bounds(ei);
  cell.gs_hat = gs_hat_evidence(ledger, cell.estimate, books.lp0());
  cell.fdb_mc = cell.valuation.fdb_cf.value;
  cell.delta = cell.estimate.fdb_hat - cell.valuation.fdb_rep.value;
  for (std::size_t p = 0; p < ledger.scenarios(); ++p)
    for (int t = 1; t <= ledger.horizon(); ++t)
      if (ledger.row(p, t).flags & kFlagThetaBreach) ++cell.theta_breaches;

  cell.evidence.emplace_back("runoff", runoff_evidence(ledger, cell.estimate.h));
  cell.evidence.emplace_back("sigma", sigma_evidence(ledger, cell.estimate));
  cell.evidence.emplace_back("surplus_fund", sf_evidence(ledger, theta));
  cell.evidence.emplace_back("covariance", cov_evidence(ledger));
  cell.evidence.emplace_back("surrender", surrender_evidence(ledger, cell.estimate));
  cell.evidence.emplace_back("roa_residual", roa_evidence(ledger));
  cell.evidence.emplace_back("ug_release", ug_release_evidence(ledger, cell.estimate, ei.discount));
  cell.evidence.emplace_back("gross_surplus", cell.gs_hat.series);
  if (ledger_out) *ledger_out = std::move(ledger);
  return cell;
}

namespace {

struct TableRow {
  std::string label;
  std::vector<std::string> cells;
};

std::vector<TableRow> table_rows(const std::vector<CellResult>& cells) {
  std::vector<TableRow> rows;
  auto add = [&](const std::string& label, auto get) {
    TableRow r{label, {}};
    for (const auto& c : cells) r.cells.push_back(get(c));
    rows.push_back(std::move(r));
  };
  auto num = [&](const std::string& label, auto get) { add(label, [&](const CellResult& c) { return fmt(get(c)); }); };
  auto pct = [&](const std::string& label, auto get) {
    add(label, [&](const CellResult& c) { return fmt(100.0 * get(c)) + "%"; });
  };
  num("pi_0", [](const CellResult& c) { return c.pi0; });
  num("UG_0/BV_0", [](const CellResult& c) { return c.ug_ratio; });
  num("LP_0", [](const CellResult& c) { return c.valuation.lp0; });
  num("SF_0", [](const CellResult& c) { return c.valuation.sf0; });
  num("MV_0", [](const CellResult& c) { return c.valuation.mv0; });
  num("UG_0", [](const CellResult& c) { return c.valuation.ug0; });
  num("FDB_0", [](const CellResult& c) { return c.estimate.fdb0; });
  num("GB", [](const CellResult& c) { return c.estimate.gb; });
  num("GB_MC", [](const CellResult& c) { return c.valuation.gb_mc.value; });
  num("E[B_T^-1 MV_T]", [](const CellResult& c) { return c.valuation.mvt.value; });
  num("TAX", [](const CellResult& c) { return c.valuation.tax.value; });
  num("VIF", [](const CellResult& c) { return c.valuation.vif.value; });
  num("SHG", [](const CellResult& c) { return c.valuation.shg.value; });
  num("COG", [](const CellResult& c) { return c.valuation.cog.value; });
  num("COG_hat_MC", [](const CellResult& c) { return c.gs_hat.cog_hat_mc; });
  num("COG_hat", [](const CellResult& c) { return c.estimate.cog_hat; });
  num("I", [](const CellResult& c) { return c.valuation.term_i.value; });
  num("I_hat", [](const CellResult& c) { return c.estimate.i_hat; });
  num("II", [](const CellResult& c) { return c.valuation.term_ii.value; });
  num("II_hat", [](const CellResult& c) { return c.estimate.ii_hat; });
  num("III", [](const CellResult& c) { return c.valuation.term_iii.value; });
  num("III_hat", [](const CellResult& c) { return c.estimate.iii_hat; });
  num("LT_CF", [](const CellResult& c) { return c.valuation.lt_cf; });
  num("LT_rep", [](const CellResult& c) { return c.valuation.lt_rep; });
  num("FDB_CF_mce", [](const CellResult& c) { return c.valuation.fdb_cf.mce; });
  num("FDB_rep_mce", [](const CellResult& c) { return c.valuation.fdb_rep.mce; });
  num("FDB_CF", [](const CellResult& c) { return c.valuation.fdb_cf.value; });
  num("FDB_rep", [](const CellResult& c) { return c.valuation.fdb_rep.value; });
  num("FDB_hat", [](const CellResult& c) { return c.estimate.fdb_hat; });
  num("LB_hat", [](const CellResult& c) { return c.estimate.lb; });
  num("UB_hat", [](const CellResult& c) { return c.estimate.ub; });
  pct("delta/MV_0", [](const CellResult& c) { return c.delta / c.valuation.mv0; });
  pct("eps/MV_0", [](const CellResult& c) { return c.estimate.eps / c.valuation.mv0; });
  num("h", [](const CellResult& c) { return c.estimate.h; });
  num("d", [](const CellResult& c) { return c.estimate.d; });
  return rows;
}

}  // namespace

std::string results_table(const std::vector<CellResult>& cells) {
  const auto rows = table_rows(cells);
  std::size_t label_w = 0, cell_w = 8;
  for (const auto& r : rows) {
    label_w = std::max(label_w, r.label.size());
    for (const auto& c : r.cells) cell_w = std::max(cell_w, c.size());
  }
  std::ostringstream os;
  os << "Values in 10^6 units of currency\n";
  for (const auto& r : rows) {
    os << r.label << std::string(label_w - r.label.size(), ' ');
    for (const auto& c : r.cells) os << "  " << std::string(cell_w - c.size(), ' ') << c;
    os << '\n';
  }
  return os.str();
}

std::string results_csv(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os << "quantity";
  for (const auto& c : cells) os << ',' << cell_tag(c.ug_ratio, c.pi0);
  os << '\n';
  for (const auto& r : table_rows(cells)) {
    os << r.label;
    for (const auto& c : r.cells) os << ',' << c;
    os << '\n';
  }
  return os.str();
}

std::string cell_json(const CellResult& cell) {
  nlohmann::ordered_json j;
  j["ug_ratio"] = cell.ug_ratio;
  j["pi0"] = cell.pi0;
  j["valuation"] = json::parse(valuation_json(cell.valuation));
  j["estimator"] = json::parse(estimator_json(cell.estimate));
  j["COG_hat_MC"] = {{"value", cell.gs_hat.cog_hat_mc}, {"mce", cell.gs_hat.cog_hat_mc_se}};
  j["delta"] = cell.delta;
  j["theta_breaches"] = cell.theta_breaches;
  return j.dump(2);
}

PublicData ingest_public_data(const fs::path& path, const PublicDataFlags& flags) {
  const CsvTable t = CsvTable::read(path.string());
  std::map<std::string, std::string> f;
  for (std::size_t r = 0; r < t.rows(); ++r) f[t.text(r, "field")] = t.text(r, "value");
  auto has = [&](const std::string& k) { return f.contains(k) && !f.at(k).empty(); };
  auto num = [&](const std::string& k) {
    if (!has(k)) throw DataError(path.string() + ": missing field '" + k + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(f.at(k), &used);
      if (used != f.at(k).size()) throw std::invalid_argument(k);
      return v;
    } catch (const std::logic_error&) {
      throw DataError(path.string() + ": field '" + k + "' is not a number");
    }
  };
  auto opt = [&](const std::string& k) -> std::optional<double> {
    if (!has(k)) return std::nullopt;
    return num(k);
  };

  PublicData d;
  d.year = has("year") ? f.at("year") : "";
  d.l0 = num("L_0");
  const double ug0 = num("UG_0");
  const double sf0 = num("SF_0");
  const double gb = num("GB");
  const double gc = num("GC");
  const double gph = num("gph");
  d.mv0 = d.l0 + ug0;
  d.fdb_co = opt("FDB_CO");

  EstimatorInputs& in = d.inputs;
  in.lp0 = d.l0 - sf0;
  in.sf0 = sf0;
  in.gph = gph;
  in.ug0 = ug0;
  if (flags.ug_scale) in.ug0 = ug0 * d.l0 / opt("UG_base").value_or(d.l0);
  in.gb = flags.gc_adjust ? gb + gc : gb;
  in.theta = opt("theta");

  in.fdb0_override = opt("FDB_0");
  if (!in.fdb0_override) {
    const double fdb0 = in.sf0 + gph * (in.lp0 + in.ug0 - *in.gb);
    in.fdb0_override = flags.deduct_sf ? fdb0 - sf0 : fdb0;
  }
  in.ii_override = opt("II_hat");
  in.iii_override = opt("III_hat");
  in.cog_override = opt("COG_hat");

  if (!(in.ii_override && in.iii_override && in.cog_override)) {
    // schedule mode: flat rates on a geometric run-off
    in.horizon = static_cast<int>(num("horizon"));
    in.h = num("h");
    in.d = num("d");
    const double rate = num("rate");
    const double iv = num("iv");
    const double rho = num("rho");
    const double gamma = num("gamma");
    in.db0_0 = num("sigma0") * in.lp0;
    const auto n = static_cast<std::size_t>(in.horizon) + 1;
    in.discount.resize(n);
    in.iv.assign(n, iv);
    in.rho.assign(n, rho);
    in.lpg.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      in.discount[t] = std::pow(1.0 + rate, -static_cast<double>(t));
      in.lpg[t] = decay(static_cast<int>(t), *in.h, in.horizon) * in.lp0;
    }
    in.premiums.assign(n, 0.0);
    in.benefits.assign(n, 0.0);
    in.expenses.assign(n, 0.0);
    in.gamma_override = std::vector<double>(n, gamma);
  }
  return d;
}

std::string public_estimate_table(const PublicData& data, const EstimatorResult& r) {
  std::ostringstream os;
  os << "Values in 10^9 units of currency";
  if (!data.year.empty()) os << " (" << data.year << ")";
  os << '\n';
  auto line = [&](const char* label, double v) { os << label << ' ' << fmt(v) << '\n'; };
  if (data.fdb_co) line("FDB_CO ", *data.fdb_co);
  line("FDB_hat", r.fdb_hat);
  line("LB_hat ", r.lb);
  line("UB_hat ", r.ub);
  line("eps    ", r.eps);
  if (data.fdb_co) line("delta  ", r.fdb_hat - *data.fdb_co);
  line("FDB_0  ", r.fdb0);
  line("II_hat ", r.ii_hat);
  line("III_hat", r.iii_hat);
  line("COG_hat", r.cog_hat);
  if (data.fdb_co) os << "success " << (std::abs(r.fdb_hat - *data.fdb_co) < r.eps ? "yes" : "no") << '\n';
  return os.str();
}

RunSummary run(const RunConfig& config, bool full_grid, const fs::path& out) {
  RunSummary summary;
  fs::create_directories(out);
  const Books base = load_books(config);
  const EsgConfig esg = esg_config(config, base.curve);
  const ScenarioSet scenarios = generate_scenarios(esg);
  const std::vector<double> iv =
      config.iv ? std::vector<double>(static_cast<std::size_t>(config.horizon) + 1, *config.iv)
                : implied_normal_vols(scenarios, config.horizon);

  std::vector<std::pair<double, double>> cells;
  if (full_grid) {
    for (double pi0 : config.pi0s)
      for (double ug : config.ug_ratios) cells.emplace_back(ug, pi0);
  } else {
    cells.emplace_back(config.base_ug_ratio, config.base_pi0);
  }

  for (const auto& [ug, pi0] : cells) {
    const std::string tag = cell_tag(ug, pi0);
    try {
      CellResult cell = run_cell(config, base, scenarios, iv, ug, pi0);
      const double tol = 0.005 * cell.valuation.mv0;
      if (std::abs(cell.valuation.lt_cf) > tol) summary.failures.push_back(tag + ": LT_CF outside 0.5% of MV_0");
      if (std::abs(cell.valuation.lt_rep) > tol) summary.failures.push_back(tag + ": LT_rep outside 0.5% of MV_0");
      write_file(out / (tag + ".json"), cell_json(cell));
      for (const auto& [name, series] : cell.evidence)
        write_file(out / (tag + "_" + name + ".csv"), evidence_csv(series));
      summary.cells.push_back(std::move(cell));
    } catch (const std::exception& e) {
      summary.failures.push_back(tag + ": " + e.what());
    }
  }
  write_file(out / "results.txt", results_table(summary.cells));
  write_file(out / "results.csv", results_csv(summary.cells));
  std::ostringstream report;
  for (const auto& f : summary.failures) report << f << '\n';
  write_file(out / "failures.txt", report.str());
  return summary;
}

}  // namespace alm
