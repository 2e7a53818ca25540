#include "alm/management.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alm/errors.hpp"

namespace alm {

void ManagementConfig::validate() const {
  if (gph < 0.0 || gsh < 0.0 || gtax < 0.0) throw ConfigError("management: split factors must be non-negative");
  if (std::abs(gph + gsh + gtax - 1.0) > 1e-12) throw ConfigError("management: gph + gsh + gtax must be 1");
  if (theta && !(*theta > 0.0)) throw ConfigError("management: theta must be positive");
  if (!(step_cap > 0.0)) throw ConfigError("management: participation step cap must be positive");
  if (!(saa_band >= 0.0)) throw ConfigError("management: SAA band must be non-negative");
  if (reinvest_term < 1) throw ConfigError("management: reinvestment term must be at least 1");
}

double target_rate(double tau_prev, double l10, double step_cap) {
  return std::min(0.5 * (tau_prev + l10), tau_prev + step_cap);
}

namespace {

template <class Range, class Key>
std::vector<std::size_t> order_by(const Range& items, Key key) {
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(items[a]) < key(items[b]); });
  return idx;
}

// Realizes positive UG within one class, largest first, until need is met.
template <class Positions>
void realize_gains(Positions& positions, AssetClass cls, double& need, RealizationResult& out) {
  const auto idx = order_by(positions, [](const auto& p) { return -p.ug(); });
  for (std::size_t k : idx) {
    if (need <= 0.0) return;
    auto& p = positions[k];
    const double ug = p.ug();
    if (ug <= 0.0) continue;
    const double u = std::min(1.0, need / ug);
    const double gain = realize(p, u);
    need -= gain;
    out.realized += gain;
    out.log.push_back({cls, k, gain});
  }
}

}  // namespace

RealizationResult cover_negative_gs(PortfolioState& portfolio, double gs) {
  RealizationResult out;
  out.gs = gs;
  if (gs >= 0.0) return out;
  double need = -gs;
  realize_gains(portfolio.bonds, AssetClass::bond, need, out);
  realize_gains(portfolio.equities, AssetClass::equity, need, out);
  realize_gains(portfolio.properties, AssetClass::property, need, out);
  out.gs = gs + out.realized;
  if (std::abs(out.gs) < 1e-12 * std::max(1.0, -gs)) out.gs = 0.0;
  return out;
}

RealizationResult trim_participation(PortfolioState& portfolio, double gs, double gph,
                                     const ParticipationBase& base, double tau_target) {
  RealizationResult out;
  out.gs = gs;
  if (gs <= 0.0 || gph <= 0.0 || base.empty()) return out;
  const double tau = participation_rate(base, gph * gs);
  if (tau <= tau_target) return out;
  double need = gs - participation_amount(base, tau_target) / gph;
  const auto idx = order_by(portfolio.bonds, [](const BondPosition& b) { return b.ug(); });
  for (std::size_t k : idx) {
    if (need <= 0.0) break;
    auto& b = portfolio.bonds[k];
    const double loss = -b.ug();
    if (loss <= 0.0) continue;
    const double u = std::min(1.0, need / loss);
    const double realized = realize(b, u);
    need += realized;
    out.realized += realized;
    out.log.push_back({AssetClass::bond, k, realized});
  }
  out.gs = gs + out.realized;
  return out;
}

namespace {

double eta_cap(const DeclarationInputs& in, double nu) {
  const double s = in.sf_prev;
  if (!(s > 0.0)) return 0.0;
  const double th = in.theta;
  return ((1.0 - nu - th * nu) * in.gph_gs_plus + s - th * in.lp_before) / ((1.0 + th) * s);
}

void finish(DeclarationDecision& d, const DeclarationInputs& in) {
  d.ph_star = d.nu * in.gph_gs_plus + d.eta * in.sf_prev;
  d.target_amount = in.target_amount;
}

}  // namespace

DeclarationDecision nu_eta(const DeclarationInputs& in) {
  DeclarationDecision d;
  const double g = in.gph_gs_plus;
  const double s = in.sf_prev;
  double eta1 = 0.0;
  if (g >= in.target_amount) {
    d.nu = g > 0.0 ? std::min(1.0, in.target_amount / g) : 0.0;
  } else {
    d.nu = 1.0;
    if (s > 0.0) eta1 = std::min(0.5, std::max(in.target_amount - g, 0.0) / s);
  }
  const double eta2 = eta_cap(in, d.nu);
  d.eta = std::clamp(std::max(eta1, eta2), 0.0, 1.0);

  // eta alone cannot hold the cap once eta2 > 1; retain less of gph gs+ instead
  if (g > 0.0) {
    const double ph = d.nu * g + d.eta * s;
    const double sf = s + g - ph;
    const double lp = in.lp_before + ph;
    if (sf > in.theta * lp) {
      const double nu = ((1.0 - d.eta) * s + g - in.theta * (in.lp_before + d.eta * s)) / (g * (1.0 + in.theta));
      d.nu = std::clamp(std::max(d.nu, nu), 0.0, 1.0);
    }
  }
  finish(d, in);
  return d;
}

DeclarationDecision theta_release(const DeclarationInputs& in) {
  DeclarationDecision d;
  DeclarationInputs zero = in;
  zero.gph_gs_plus = 0.0;
  d.nu = 0.0;
  d.eta = std::clamp(eta_cap(zero, 0.0), 0.0, 1.0);
  finish(d, zero);
  return d;
}

bool saa_breached(const PortfolioState& portfolio, double band) {
  const auto w = portfolio.weights();
  for (int c = 0; c < kAssetClasses; ++c) {
    const double target = portfolio.targets[static_cast<std::size_t>(c)];
    const double weight = w[static_cast<std::size_t>(c)];
    if (target > 0.0) {
      if (std::abs(weight - target) > band * target) return true;
    } else if (std::abs(weight) > 1e-12) {
      return true;
    }
  }
  return false;
}

namespace {

// Sells amount of market value from one class; returns the book gain.
double sell_class(PortfolioState& pf, AssetClass cls, double amount) {
  double gain = 0.0;
  double bv = 0.0;
  if (cls == AssetClass::bond) {
    const auto idx = order_by(pf.bonds, [](const BondPosition& b) { return std::abs(b.ug()); });
    for (std::size_t k : idx) {
      if (amount <= 0.0) break;
      auto& b = pf.bonds[k];
      if (b.mv <= 0.0) continue;
      const double u = std::min(1.0, amount / b.mv);
      const double proceeds = sell(b, u, &bv);
      amount -= proceeds;
      gain += proceeds - bv;
      pf.cash.amount += proceeds;
    }
    pf.drop_empty_bonds();
    return gain;
  }
  const double total = pf.class_mv(cls);
  if (total <= 0.0) return 0.0;
  const double u = std::min(1.0, amount / total);
  auto sell_all = [&](auto& positions) {
    for (auto& p : positions) {
      const double proceeds = sell(p, u, &bv);
      gain += proceeds - bv;
      pf.cash.amount += proceeds;
    }
  };
  if (cls == AssetClass::equity) sell_all(pf.equities);
  if (cls == AssetClass::property) sell_all(pf.properties);
  return gain;
}

void buy_class(PortfolioState& pf, AssetClass cls, double amount, std::span<const double> disc, int t,
               int term) {
  if (amount <= 0.0) return;
  switch (cls) {
    case AssetClass::bond:
      pf.bonds.push_back(buy_bond_at_par(disc, t, t + term, amount));
      break;
    case AssetClass::equity:
      if (pf.equities.empty()) throw ConfigError("rebalance: equity target without an equity position");
      pf.equities.front().mv += amount;
      pf.equities.front().bv += amount;
      break;
    case AssetClass::property:
      if (pf.properties.empty()) throw ConfigError("rebalance: property target without a property position");
      pf.properties.front().mv_land += amount;
      pf.properties.front().bv_land += amount;
      break;
    case AssetClass::cash:
      return;
  }
  pf.cash.amount -= amount;
}

}  // namespace

std::vector<Trade> rebalance_saa(PortfolioState& portfolio, double band, std::span<const double> disc,
                                 int t, int term) {
  std::vector<Trade> trades;
  const double total = portfolio.mv();
  if (!(total > 0.0)) throw ConfigError("rebalance: total market value is not positive");
  if (!saa_breached(portfolio, band)) return trades;

  const AssetClass risky[] = {AssetClass::bond, AssetClass::equity, AssetClass::property};
  for (AssetClass c : risky) {
    const double excess = portfolio.class_mv(c) - portfolio.targets[static_cast<std::size_t>(c)] * total;
    if (excess > 0.0) {
      const double gain = sell_class(portfolio, c, excess);
      trades.push_back({c, -excess, gain});
    }
  }
  for (AssetClass c : risky) {
    const double shortfall = portfolio.targets[static_cast<std::size_t>(c)] * total - portfolio.class_mv(c);
    if (shortfall > 0.0) {
      buy_class(portfolio, c, shortfall, disc, t, term);
      trades.push_back({c, shortfall, 0.0});
    }
  }
  return trades;
}

}  // namespace alm
