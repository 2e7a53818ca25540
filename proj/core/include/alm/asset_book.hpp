#pragma once

#include <array>
#include <span>
#include <vector>

namespace alm {

enum class LcmRule { augmented, strict };

enum class AssetClass { cash = 0, bond = 1, equity = 2, property = 3 };
inline constexpr int kAssetClasses = 4;

struct BondPosition {
  int maturity = 0;  // absolute tenor index T^b
  double nominal = 0.0;
  double coupon = 0.0;  // K^b
  double bv = 0.0;
  double mv = 0.0;

  double ug() const { return mv - bv; }
};

struct EquityPosition {
  double mv = 0.0;
  double bv = 0.0;
  double sigma = 0.0;
  double yield = 0.0;  // dividend yield d

  double ug() const { return mv - bv; }
};

struct PropertyPosition {
  double bv_building = 0.0;
  double bv_land = 0.0;
  double mv_building = 0.0;
  double mv_land = 0.0;
  int horizon = 30;  // T^p, building fully depreciated at t = T^p
  double sigma = 0.0;
  double yield = 0.0;  // rental yield d

  double bv() const { return bv_building + bv_land; }
  double mv() const { return mv_building + mv_land; }
  double ug() const { return mv() - bv(); }
};

struct CashAccount {
  double amount = 0.0;
};

struct PortfolioState {
  CashAccount cash;
  std::vector<BondPosition> bonds;
  std::vector<EquityPosition> equities;
  std::vector<PropertyPosition> properties;
  std::array<double, kAssetClasses> targets{};  // market value weights at t = 0

  double class_bv(AssetClass c) const;
  double class_mv(AssetClass c) const;
  double bv() const;
  double mv() const;
  double ug() const { return mv() - bv(); }
  std::array<double, kAssetClasses> weights() const;
  void set_targets_from_market_values();
  void drop_empty_bonds();
};

// disc[k] = P(t, t+k) for k = 0..; every bond helper reads it relative to t.
double par_coupon(std::span<const double> disc, int term);
BondPosition buy_bond_at_par(std::span<const double> disc, int t, int maturity, double nominal);
double bond_market_value(const BondPosition& bond, int t, std::span<const double> disc);
void mark_bond(BondPosition& bond, int t, std::span<const double> disc,
               LcmRule rule = LcmRule::augmented);
// Coupon plus nominal falling due at t.
double bond_cash_flow(const BondPosition& bond, int t);

void mark_equity(EquityPosition& equity, double forward, double z);
void depreciate_and_mark_property(PropertyPosition& property, int t, double forward, double z);

// Realizes u of the unrealized gain; returns the realized amount.
double realize(double& bv, double mv, double u);
double realize(BondPosition& bond, double u);
double realize(EquityPosition& equity, double u);
double realize(PropertyPosition& property, double u);

// Sells fraction u at market; returns the proceeds, book value removed goes to *bv_out.
double sell(BondPosition& bond, double u, double* bv_out = nullptr);
double sell(EquityPosition& equity, double u, double* bv_out = nullptr);
double sell(PropertyPosition& property, double u, double* bv_out = nullptr);

struct PositionSnapshot {
  int id = 0;
  double bv = 0.0;
};

struct PositionFlow {
  int id = 0;
  double cash_flow = 0.0;  // coupons, nominal, dividends, rent, sale proceeds
};

// sum_a (cf^a + dBV^a) + F_{t-1} C_{t-1}; sold positions appear in after with bv = 0.
double roa(std::span<const PositionSnapshot> before, std::span<const PositionSnapshot> after,
           std::span<const PositionFlow> flows, double forward, double cash_before);

}  // namespace alm
