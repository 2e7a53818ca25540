#include "alm/projection.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "alm/errors.hpp"
#include "alm/numeric.hpp"

namespace alm {

ProjectionLedger::ProjectionLedger(std::size_t scenarios, int horizon, BalanceSnapshot initial)
    : scenarios_(scenarios),
      horizon_(horizon),
      initial_(initial),
      rows_(scenarios * static_cast<std::size_t>(horizon)) {}

BalanceSnapshot ProjectionLedger::balance(std::size_t p, int t) const {
  if (t == 0) return initial_;
  const LedgerRow& r = row(p, t);
  return {r.bv, r.mv, r.ug, r.v, r.db0, r.db, r.sf};
}

YearData year_data(const ScenarioSet& scenarios, std::size_t p, int t) {
  const TenorGrid& g = scenarios.grid();
  if (t < 1 || t >= g.count) throw DomainError("year_data: year outside the tenor grid");
  YearData d;
  d.t = t;
  const auto row = scenarios.curve_row(p, t);
  d.disc.resize(row.size() + 1);
  d.disc[0] = 1.0;
  for (std::size_t k = 0; k < row.size(); ++k) d.disc[k + 1] = d.disc[k] / (1.0 + g.delta * row[k]);
  d.forward = scenarios.forward(p, t - 1, t - 1);
  d.l10 = scenarios.forward(p, t, std::min(t + 9, g.count - 1));
  d.numeraire = scenarios.numeraire(p, t);
  return d;
}

ScenarioState initial_scenario_state(const ProjectionInputs& inputs, const ProjectionConfig& config,
                                     double tau0) {
  ScenarioState s;
  s.portfolio = inputs.portfolio;
  double v = 0.0;
  double db0 = 0.0;
  for (const auto& x : inputs.points) {
    v += x.reserve_at(0);
    db0 += x.legacy_at(0);
  }
  s.liability.v = v;
  s.liability.db0 = db0;
  s.liability.db = 0.0;
  s.liability.sf = inputs.sf0;
  s.liability.tau = tau0;
  s.bonus = BonusLedger(inputs.points.size(), config.track_cohorts);
  s.tau_prev = tau0;
  return s;
}

namespace {

std::string dump(const ScenarioState& s, const LedgerRow& r, int t, double residual) {
  std::ostringstream os;
  os << "balance parity broken at t=" << t << " residual=" << residual << " BV=" << r.bv << " V=" << r.v
     << " DB0=" << r.db0 << " DB=" << r.db << " SF=" << r.sf << " gs=" << r.gs << " roa=" << r.roa
     << " cash=" << s.portfolio.cash.amount << " bonds=" << s.portfolio.bonds.size();
  return os.str();
}

}  // namespace

LedgerRow project_year(ScenarioState& state, const YearData& data, std::span<const ModelPoint> points,
                       const LiabilitySchedules& schedules, const ProjectionConfig& config, double theta,
                       double mv0) {
  const int t = data.t;
  const auto ti = static_cast<std::size_t>(t);
  const ManagementConfig& mc = config.management;
  PortfolioState& pf = state.portfolio;
  LedgerRow row;
  row.forward = data.forward;
  row.numeraire = data.numeraire;

  const double bv_prev = pf.bv();
  const double mv_prev = pf.mv();

  // asset income on opening positions
  pf.cash.amount += data.forward * pf.cash.amount;
  for (auto& b : pf.bonds) {
    pf.cash.amount += bond_cash_flow(b, t);
    if (t >= b.maturity) {
      b.nominal = 0.0;
      b.bv = 0.0;
      b.mv = 0.0;
    }
  }
  pf.drop_empty_bonds();
  double income = 0.0;
  for (const auto& e : pf.equities) income += e.yield * e.mv;
  for (const auto& p : pf.properties) income += p.yield * p.mv();
  pf.cash.amount += income;

  // mark to market
  for (auto& b : pf.bonds) mark_bond(b, t, data.disc, config.bond_rule);
  for (auto& e : pf.equities) mark_equity(e, data.forward, data.z_equity);
  for (auto& p : pf.properties) depreciate_and_mark_property(p, t, data.forward, data.z_property);
  row.market_return = pf.mv() - mv_prev;

  row.pr = schedules.premiums[ti];
  row.gbf = schedules.benefits[ti];
  row.exp = schedules.expenses[ti];
  pf.cash.amount += row.pr - row.gbf - row.exp;

  const Payout out = state.bonus.payout(points, t);
  row.ph = out.ph;
  row.sg = out.sg;
  pf.cash.amount -= row.ph;

  // collect flows and reinvest; nothing is reinvested once the run-off is complete
  if (t < schedules.horizon && pf.mv() > 0.0) rebalance_saa(pf, mc.saa_band, data.disc, t, mc.reinvest_term);

  const double v_now = schedules.reserve[ti];
  const double db0_now = schedules.legacy[ti];
  const LiabilityState& lprev = state.liability;
  row.roa = pf.bv() - bv_prev - (row.pr - row.gbf - row.exp - row.ph);
  double gs = row.roa - (v_now - lprev.v) - (db0_now - lprev.db0) + row.pr - row.gbf - row.exp + row.sg;

  bool runoff = false;
  technical_rate(points, t, &runoff);
  if (runoff) row.flags |= kFlagRunoff;

  const ParticipationBase base = participation_base(points, t);
  row.tau_target = target_rate(state.tau_prev, data.l10, mc.step_cap);
  DeclarationDecision decision;
  DeclarationInputs din;
  din.sf_prev = lprev.sf;
  din.theta = theta;
  din.lp_before = v_now + db0_now + lprev.db - row.ph - row.sg;
  din.target_amount = base.empty() ? 0.0 : participation_amount(base, row.tau_target);

  if (gs < 0.0) {
    // realize gains to cover a negative surplus
    const RealizationResult r = cover_negative_gs(pf, gs);
    row.roa += r.realized;
    gs = r.gs;
  } else if (gs > 0.0) {
    // trim the participation base
    const RealizationResult r = trim_participation(pf, gs, mc.gph, base, row.tau_target);
    row.roa += r.realized;
    gs = r.gs;
  }
  row.gs = gs;
  const double gs_plus = positive_part(gs);
  row.cog = negative_part(gs);
  row.shg = mc.gsh * gs_plus;
  row.tax = mc.gtax * gs_plus;
  din.gph_gs_plus = mc.gph * gs_plus;

  if (!mc.suppress_declarations && !base.empty()) {
    // declare bonuses
    decision = gs_plus > 0.0 ? nu_eta(din) : theta_release(din);
  }
  if (base.empty() && gs_plus > 0.0) row.flags |= kFlagNoEligible;
  row.nu = decision.nu;
  row.eta = decision.eta;
  row.ph_star = decision.ph_star;

  double tau = base.min_rate();
  if (row.ph_star > 0.0) {
    tau = state.bonus.declare(row.ph_star, points, t);
    state.tau_prev = tau;
  }
  row.tau = tau;

  pf.cash.amount += row.cog - row.shg - row.tax;
  if (row.cog > 0.0) row.flags |= kFlagInjection;

  state.liability = roll_forward(lprev, v_now, db0_now, row.ph_star, row.ph, row.sg, din.gph_gs_plus, tau);
  const LiabilityState& ls = state.liability;

  row.bv = pf.bv();
  row.mv = pf.mv();
  row.ug = row.mv - row.bv;
  row.v = ls.v;
  row.db0 = ls.db0;
  row.db = ls.db;
  row.sf = ls.sf;
  row.equity_mv = pf.class_mv(AssetClass::equity);
  row.property_mv = pf.class_mv(AssetClass::property);
  row.equity_ug = row.equity_mv - pf.class_bv(AssetClass::equity);
  row.property_ug = row.property_mv - pf.class_bv(AssetClass::property);

  if (!mc.suppress_declarations && !base.empty() && ls.sf > theta * ls.lp() + 1e-9 * mv0)
    row.flags |= kFlagThetaBreach;

  const double residual = row.bv - (ls.v + ls.db0 + ls.db + ls.sf);
  if (!(std::abs(residual) <= config.parity_tolerance * mv0)) throw ParityError(dump(state, row, t, residual));
  return row;
}

double default_theta(const ProjectionInputs& inputs) {
  double lp = 0.0;
  for (const auto& x : inputs.points) lp += x.reserve_at(0) + x.legacy_at(0);
  if (!(lp > 0.0)) throw ConfigError("theta: LP_0 must be positive");
  return inputs.sf0 / lp;
}

double default_tau0(const ScenarioSet& scenarios) {
  return scenarios.forward(0, 0, std::min(9, scenarios.grid().count - 1));
}

ProjectionLedger run_projection(const ScenarioSet& scenarios, const ProjectionInputs& inputs,
                                const ProjectionConfig& config) {
  config.management.validate();
  const int horizon = inputs.horizon;
  if (horizon < 1 || horizon >= scenarios.grid().count)
    throw ConfigError("run_projection: horizon must lie inside the tenor grid");
  if (std::abs(inputs.portfolio.bv() - (inputs.sf0 + [&] {
        double lp = 0.0;
        for (const auto& x : inputs.points) lp += x.reserve_at(0) + x.legacy_at(0);
        return lp;
      }())) > config.parity_tolerance * std::max(1.0, inputs.portfolio.mv()))
    throw ParityError("run_projection: initial book value differs from LP_0 + SF_0");

  const LiabilitySchedules schedules = aggregate(inputs.points, horizon);
  const double theta = config.management.theta ? *config.management.theta : default_theta(inputs);
  const double tau0 = config.management.tau0 ? *config.management.tau0 : default_tau0(scenarios);
  const double mv0 = inputs.portfolio.mv();

  BalanceSnapshot init;
  init.bv = inputs.portfolio.bv();
  init.mv = mv0;
  init.ug = mv0 - init.bv;
  init.v = schedules.reserve[0];
  init.db0 = schedules.legacy[0];
  init.sf = inputs.sf0;
  ProjectionLedger ledger(scenarios.size(), horizon, init);
  if (config.track_cohorts) ledger.cohort_mu().resize(scenarios.size());

  const std::span<const ModelPoint> points(inputs.points);
  const auto n = static_cast<std::ptrdiff_t>(scenarios.size());
  std::exception_ptr failure;
  std::size_t failed = 0;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t pp = 0; pp < n; ++pp) {
    const auto p = static_cast<std::size_t>(pp);
    try {
      ScenarioState state = initial_scenario_state(inputs, config, tau0);
      for (int t = 1; t <= horizon; ++t) {
        YearData d = year_data(scenarios, p, t);
        d.z_equity = scenarios.market_normal(p, t, config.equity_stream);
        d.z_property = scenarios.market_normal(p, t, config.property_stream);
        LedgerRow r = project_year(state, d, points, schedules, config, theta, mv0);
        if (scenarios.blown_up(p)) r.flags |= kFlagBlownUp;
        ledger.row(p, t) = r;
      }
      if (config.track_cohorts) {
        auto& mu = ledger.cohort_mu()[p];
        for (const auto& c : state.bonus.cohorts())
          mu.push_back(c.declared > 0.0 ? (c.released_ph + c.released_sg) / c.declared : 0.0);
      }
    } catch (...) {
#pragma omp critical
      {
        if (!failure || p < failed) {
          failure = std::current_exception();
          failed = p;
        }
      }
    }
  }
  if (failure) {
    const std::string where = "scenario " + std::to_string(failed) + ": ";
    try {
      std::rethrow_exception(failure);
    } catch (const ParityError& e) {
      throw ParityError(where + e.what());
    } catch (const RuleViolation& e) {
      throw RuleViolation(where + e.what());
    } catch (const LedgerError& e) {
      throw LedgerError(where + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    } catch (const DomainError& e) {
      throw DomainError(where + e.what());
    }
  }
  return ledger;
}

std::string ledger_csv(const ProjectionLedger& ledger) {
  std::ostringstream os;
  os.precision(10);
  os << "scenario,t,gs,cog,shg,tax,ph_star,ph,sg,pr,gbf,exp,roa,bv,mv,ug,v,db0,db,sf,nu,eta,tau,forward,"
        "numeraire,flags\n";
  for (std::size_t p = 0; p < ledger.scenarios(); ++p) {
    for (int t = 1; t <= ledger.horizon(); ++t) {
      const LedgerRow& r = ledger.row(p, t);
      os << p << ',' << t << ',' << r.gs << ',' << r.cog << ',' << r.shg << ',' << r.tax << ',' << r.ph_star
         << ',' << r.ph << ',' << r.sg << ',' << r.pr << ',' << r.gbf << ',' << r.exp << ',' << r.roa << ','
         << r.bv << ',' << r.mv << ',' << r.ug << ',' << r.v << ',' << r.db0 << ',' << r.db << ',' << r.sf
         << ',' << r.nu << ',' << r.eta << ',' << r.tau << ',' << r.forward << ',' << r.numeraire << ','
         << r.flags << '\n';
    }
  }
  return os.str();
}

}  // namespace alm
