#include "alm/valuation.hpp"

#include <json.hpp>

#include "alm/errors.hpp"
#include "alm/numeric.hpp"

namespace alm {

namespace {

Estimate estimate(const std::vector<double>& x) {
  const auto s = sample_stats(x);
  return {s.mean, s.se};
}

}  // namespace

ScenarioValues scenario_values(const ProjectionLedger& ledger, double gph) {
  const std::size_t n = ledger.scenarios();
  const int T = ledger.horizon();
  ScenarioValues out;
  for (auto* v : {&out.gb, &out.fdb, &out.shg, &out.cog, &out.tax, &out.mvt, &out.term_i, &out.term_ii,
                  &out.term_iii})
    v->assign(n, 0.0);

  for (std::size_t p = 0; p < n; ++p) {
    double gb = 0.0, fdb = 0.0, shg = 0.0, cog = 0.0, tax = 0.0, ii = 0.0, iii = 0.0;
    for (int t = 1; t <= T; ++t) {
      const LedgerRow& r = ledger.row(p, t);
      const double df = 1.0 / r.numeraire;
      gb += df * (r.gbf + r.exp - r.pr);
      fdb += df * r.ph;
      shg += df * r.shg;
      cog += df * r.cog;
      tax += df * r.tax;
      if (t >= 2) ii += df * r.sg;
      const BalanceSnapshot prev = ledger.balance(p, t - 1);
      iii += r.forward * df * (prev.db + prev.sf);
    }
    const LedgerRow& last = ledger.row(p, T);
    const double dT = 1.0 / last.numeraire;
    out.gb[p] = gb;
    out.fdb[p] = fdb;
    out.shg[p] = shg;
    out.cog[p] = cog;
    out.tax[p] = tax;
    out.mvt[p] = dT * last.mv;
    out.term_i[p] = dT * (last.db + last.sf + gph * (last.ug + last.v + last.db0));
    out.term_ii[p] = (1.0 - gph) * ii;
    out.term_iii[p] = (1.0 - gph) * iii;
  }
  return out;
}

Estimate gb_value(const ProjectionLedger& ledger) { return estimate(scenario_values(ledger, 0.0).gb); }

Estimate fdb_cf(const ProjectionLedger& ledger) { return estimate(scenario_values(ledger, 0.0).fdb); }

double fdb_seed(double sf0, double lp0, double ug0, double gb, double gph) {
  return sf0 + gph * (lp0 + ug0 - gb);
}

double leakage(double mv0, double gb, double fdb, double shg, double cog, double tax, double mvt) {
  return mv0 - (gb + fdb + shg - cog + tax + mvt);
}

double gb_deterministic(const ProjectionLedger& ledger, std::span<const double> discount) {
  if (discount.size() < static_cast<std::size_t>(ledger.horizon()) + 1)
    throw DataError("valuation: discount curve shorter than the horizon");
  if (ledger.scenarios() == 0) return 0.0;
  double gb = 0.0;
  for (int t = 1; t <= ledger.horizon(); ++t) {
    const LedgerRow& r = ledger.row(0, t);
    gb += discount[static_cast<std::size_t>(t)] * (r.gbf + r.exp - r.pr);
  }
  return gb;
}

ValuationResult value_ledger(const ProjectionLedger& ledger, double gph, std::span<const double> discount,
                             std::size_t blown_up) {
  const ScenarioValues sv = scenario_values(ledger, gph);
  const BalanceSnapshot& b0 = ledger.initial();
  ValuationResult r;
  r.scenarios = ledger.scenarios();
  r.blown_up = blown_up;
  r.gph = gph;
  r.mv0 = b0.mv;
  r.lp0 = b0.lp();
  r.ug0 = b0.ug;
  r.sf0 = b0.sf;

  r.gb_mc = estimate(sv.gb);
  r.gb = discount.empty() ? r.gb_mc : Estimate{gb_deterministic(ledger, discount), 0.0};
  r.fdb_cf = estimate(sv.fdb);
  r.shg = estimate(sv.shg);
  r.cog = estimate(sv.cog);
  r.tax = estimate(sv.tax);
  r.mvt = estimate(sv.mvt);
  r.term_i = estimate(sv.term_i);
  r.term_ii = estimate(sv.term_ii);
  r.term_iii = estimate(sv.term_iii);

  std::vector<double> vif(sv.shg.size()), rep(sv.shg.size());
  for (std::size_t p = 0; p < vif.size(); ++p) {
    vif[p] = sv.shg[p] - sv.cog[p];
    // FDB_0 is known at time 0; only the remaining terms carry sampling error
    rep[p] = gph * sv.cog[p] - sv.term_i[p] - sv.term_ii[p] - sv.term_iii[p];
    if (discount.empty()) rep[p] -= gph * sv.gb[p];
  }
  r.vif = estimate(vif);
  r.fdb0 = fdb_seed(r.sf0, r.lp0, r.ug0, r.gb.value, gph);
  r.fdb_rep.value = r.fdb0 + gph * r.cog.value - r.term_i.value - r.term_ii.value - r.term_iii.value;
  r.fdb_rep.mce = sample_stats(rep).se;

  r.lt_cf = leakage(r.mv0, r.gb.value, r.fdb_cf.value, r.shg.value, r.cog.value, r.tax.value, r.mvt.value);
  r.lt_rep = leakage(r.mv0, r.gb.value, r.fdb_rep.value, r.shg.value, r.cog.value, r.tax.value, r.mvt.value);
  return r;
}

std::string valuation_json(const ValuationResult& r) {
  nlohmann::ordered_json j;
  auto put = [&](const char* key, const Estimate& e) { j[key] = {{"value", e.value}, {"mce", e.mce}}; };
  j["scenarios"] = r.scenarios;
  j["blown_up"] = r.blown_up;
  j["MV_0"] = r.mv0;
  j["LP_0"] = r.lp0;
  j["UG_0"] = r.ug0;
  j["SF_0"] = r.sf0;
  j["gph"] = r.gph;
  put("GB", r.gb);
  put("GB_MC", r.gb_mc);
  put("FDB_CF", r.fdb_cf);
  put("FDB_rep", r.fdb_rep);
  put("SHG", r.shg);
  put("COG", r.cog);
  put("TAX", r.tax);
  put("VIF", r.vif);
  put("MVT", r.mvt);
  j["FDB_0"] = r.fdb0;
  put("I", r.term_i);
  put("II", r.term_ii);
  put("III", r.term_iii);
  j["LT_CF"] = r.lt_cf;
  j["LT_rep"] = r.lt_rep;
  return j.dump(2);
}

}  // namespace alm
