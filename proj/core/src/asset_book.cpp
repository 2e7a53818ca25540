#include "alm/asset_book.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "alm/errors.hpp"
#include "alm/scenario_engine.hpp"

namespace alm {

double PortfolioState::class_bv(AssetClass c) const {
  double s = 0.0;
  switch (c) {
    case AssetClass::cash:
      return cash.amount;
    case AssetClass::bond:
      for (const auto& b : bonds) s += b.bv;
      return s;
    case AssetClass::equity:
      for (const auto& e : equities) s += e.bv;
      return s;
    case AssetClass::property:
      for (const auto& p : properties) s += p.bv();
      return s;
  }
  return s;
}

double PortfolioState::class_mv(AssetClass c) const {
  double s = 0.0;
  switch (c) {
    case AssetClass::cash:
      return cash.amount;
    case AssetClass::bond:
      for (const auto& b : bonds) s += b.mv;
      return s;
    case AssetClass::equity:
      for (const auto& e : equities) s += e.mv;
      return s;
    case AssetClass::property:
      for (const auto& p : properties) s += p.mv();
      return s;
  }
  return s;
}

double PortfolioState::bv() const {
  double s = 0.0;
  for (int c = 0; c < kAssetClasses; ++c) s += class_bv(static_cast<AssetClass>(c));
  return s;
}

double PortfolioState::mv() const {
  double s = 0.0;
  for (int c = 0; c < kAssetClasses; ++c) s += class_mv(static_cast<AssetClass>(c));
  return s;
}

std::array<double, kAssetClasses> PortfolioState::weights() const {
  std::array<double, kAssetClasses> w{};
  const double total = mv();
  if (!(total > 0.0)) return w;
  for (int c = 0; c < kAssetClasses; ++c) w[static_cast<std::size_t>(c)] = class_mv(static_cast<AssetClass>(c)) / total;
  return w;
}

void PortfolioState::set_targets_from_market_values() { targets = weights(); }

void PortfolioState::drop_empty_bonds() {
  std::erase_if(bonds, [](const BondPosition& b) { return b.nominal <= 0.0 && b.bv == 0.0; });
}

double par_coupon(std::span<const double> disc, int term) {
  if (term < 1 || static_cast<std::size_t>(term) >= disc.size())
    throw DomainError("par_coupon: curve does not reach maturity");
  double annuity = 0.0;
  for (int s = 1; s <= term; ++s) annuity += disc[static_cast<std::size_t>(s)];
  if (annuity == 0.0) throw DomainError("par_coupon: degenerate curve");
  return (1.0 - disc[static_cast<std::size_t>(term)]) / annuity;
}

BondPosition buy_bond_at_par(std::span<const double> disc, int t, int maturity, double nominal) {
  if (maturity <= t) throw DomainError("buy_bond_at_par: maturity must lie after t");
  BondPosition b;
  b.maturity = maturity;
  b.nominal = nominal;
  b.coupon = par_coupon(disc, maturity - t);
  b.bv = nominal;
  b.mv = nominal;
  return b;
}

double bond_market_value(const BondPosition& bond, int t, std::span<const double> disc) {
  if (t >= bond.maturity) return 0.0;
  const int term = bond.maturity - t;
  if (static_cast<std::size_t>(term) >= disc.size())
    throw DomainError("bond_market_value: curve does not reach maturity");
  double annuity = 0.0;
  for (int s = 1; s <= term; ++s) annuity += disc[static_cast<std::size_t>(s)];
  return bond.nominal * (bond.coupon * annuity + disc[static_cast<std::size_t>(term)]);
}

void mark_bond(BondPosition& bond, int t, std::span<const double> disc, LcmRule rule) {
  bond.mv = bond_market_value(bond, t, disc);
  if (rule == LcmRule::strict) bond.bv = std::min(bond.bv, bond.mv);
}

double bond_cash_flow(const BondPosition& bond, int t) {
  if (t > bond.maturity) return 0.0;
  return bond.nominal * bond.coupon + (t == bond.maturity ? bond.nominal : 0.0);
}

void mark_equity(EquityPosition& equity, double forward, double z) {
  equity.mv = gbm_step(equity.mv, forward, {equity.sigma, equity.yield}, z);
  equity.bv = std::min(equity.bv, equity.mv);
}

void depreciate_and_mark_property(PropertyPosition& property, int t, double forward, double z) {
  const GbmParams params{property.sigma, property.yield};
  property.mv_building = gbm_step(property.mv_building, forward, params, z);
  property.mv_land = gbm_step(property.mv_land, forward, params, z);
  double building = 0.0;
  if (t < property.horizon) {
    building = (1.0 - 1.0 / static_cast<double>(property.horizon - t + 1)) * property.bv_building;
  }
  property.bv_building = std::min(building, property.mv_building);
  property.bv_land = std::min(property.bv_land, property.mv_land);
}

double realize(double& bv, double mv, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("realize: fraction outside [0,1]");
  const double gain = u * (mv - bv);
  bv = u == 1.0 ? mv : bv + gain;
  return gain;
}

double realize(BondPosition& bond, double u) { return realize(bond.bv, bond.mv, u); }

double realize(EquityPosition& equity, double u) { return realize(equity.bv, equity.mv, u); }

double realize(PropertyPosition& property, double u) {
  return realize(property.bv_building, property.mv_building, u) +
         realize(property.bv_land, property.mv_land, u);
}

namespace {

void check_fraction(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("sell: fraction outside [0,1]");
}

}  // namespace

double sell(BondPosition& bond, double u, double* bv_out) {
  check_fraction(u);
  const double proceeds = u * bond.mv;
  if (bv_out) *bv_out = u * bond.bv;
  const double keep = 1.0 - u;
  bond.nominal *= keep;
  bond.bv *= keep;
  bond.mv *= keep;
  return proceeds;
}

double sell(EquityPosition& equity, double u, double* bv_out) {
  check_fraction(u);
  const double proceeds = u * equity.mv;
  if (bv_out) *bv_out = u * equity.bv;
  equity.bv *= 1.0 - u;
  equity.mv *= 1.0 - u;
  return proceeds;
}

double sell(PropertyPosition& property, double u, double* bv_out) {
  check_fraction(u);
  const double proceeds = u * property.mv();
  if (bv_out) *bv_out = u * property.bv();
  const double keep = 1.0 - u;
  property.bv_building *= keep;
  property.bv_land *= keep;
  property.mv_building *= keep;
  property.mv_land *= keep;
  return proceeds;
}

double roa(std::span<const PositionSnapshot> before, std::span<const PositionSnapshot> after,
           std::span<const PositionFlow> flows, double forward, double cash_before) {
  std::map<int, double> opening;
  for (const auto& s : before) opening[s.id] += s.bv;
  std::map<int, double> closing;
  for (const auto& s : after) closing[s.id] += s.bv;
  if (opening.size() != closing.size()) throw LedgerError("roa: snapshots cover different positions");
  double total = forward * cash_before;
  for (const auto& [id, bv] : opening) {
    const auto it = closing.find(id);
    if (it == closing.end()) throw LedgerError("roa: position missing after the step");
    total += it->second - bv;
  }
  for (const auto& f : flows) {
    if (!opening.contains(f.id)) throw LedgerError("roa: cash flow for unknown position");
    total += f.cash_flow;
  }
  return total;
}

}  // namespace alm
