#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "alm/asset_book.hpp"
#include "alm/liability_book.hpp"

namespace alm {

struct ManagementConfig {
  double saa_band = 0.10;        // relative deviation per class weight
  std::optional<double> theta;   // SF cap ratio; SF_0/LP_0 when empty
  double step_cap = 0.01;        // v
  double gph = 0.81;
  double gsh = 0.14;
  double gtax = 0.05;
  std::optional<double> tau0;    // initial 10Y forward when empty
  int reinvest_term = 10;
  bool suppress_declarations = false;  // nu = eta = 0 in every year

  void validate() const;
};

struct DeclarationDecision {
  double nu = 0.0;
  double eta = 0.0;
  double tau_target = 0.0;
  double target_amount = 0.0;
  double ph_star = 0.0;
};

double target_rate(double tau_prev, double l10, double step_cap);

struct Realization {
  AssetClass cls = AssetClass::bond;
  std::size_t index = 0;
  double amount = 0.0;  // realized gain (negative for realized losses)
};

struct RealizationResult {
  double realized = 0.0;
  double gs = 0.0;
  std::vector<Realization> log;
};

// Realizes positive UG, bonds before equity before property, largest first.
RealizationResult cover_negative_gs(PortfolioState& portfolio, double gs);

// Realizes bond losses, largest first, until gph * gs meets the target amount.
RealizationResult trim_participation(PortfolioState& portfolio, double gs, double gph,
                                     const ParticipationBase& base, double tau_target);

struct DeclarationInputs {
  double gph_gs_plus = 0.0;
  double target_amount = 0.0;
  double sf_prev = 0.0;
  double theta = 0.0;
  double lp_before = 0.0;  // V_t + DB0_t + DB_{t-1} - ph_t - sg*_t
};

DeclarationDecision nu_eta(const DeclarationInputs& in);
// Years without positive surplus: only the surplus fund cap may force a release.
DeclarationDecision theta_release(const DeclarationInputs& in);

struct Trade {
  AssetClass cls = AssetClass::cash;
  double amount = 0.0;  // market value bought (+) or sold (-)
  double book_gain = 0.0;
};

bool saa_breached(const PortfolioState& portfolio, double band);
// disc[k] = P(t, t+k); new bonds mature at t + term.
std::vector<Trade> rebalance_saa(PortfolioState& portfolio, double band, std::span<const double> disc,
                                 int t, int term);

}  // namespace alm
