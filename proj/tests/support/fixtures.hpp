#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "alm/liability_book.hpp"
#include "alm/scenario_engine.hpp"

namespace alm::testing {

// P(t, t+k) for k = 0..n under a flat annual rate.
inline std::vector<double> flat_disc(double rate, int n) {
  std::vector<double> d(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) d[static_cast<std::size_t>(k)] = std::pow(1.0 + rate, -k);
  return d;
}

// Single-premium endowment whose reserve rolls at rho and pays out in full at maturity.
inline ModelPoint fair_point(const std::string& id, int maturity, double rho, double v0) {
  ModelPoint x;
  x.id = id;
  x.maturity = maturity;
  x.rho = rho;
  x.sum_insured = v0 * std::pow(1.0 + rho, maturity);
  const auto n = static_cast<std::size_t>(maturity) + 1;
  for (auto* s : {&x.reserve, &x.legacy, &x.in_force, &x.premiums, &x.benefits, &x.expenses, &x.death_rate,
                  &x.surrender_rate})
    s->assign(n, 0.0);
  for (int t = 0; t < maturity; ++t) {
    x.reserve[static_cast<std::size_t>(t)] = v0 * std::pow(1.0 + rho, t);
    x.in_force[static_cast<std::size_t>(t)] = 1.0;
  }
  x.benefits[n - 1] = x.sum_insured;
  return x;
}

inline MfVolParams vol(double a, double b, double c, double d, int count, double v0 = kTamingOff,
                       double stretch = 1.0) {
  MfVolParams p;
  p.a = a;
  p.b = b;
  p.c = c;
  p.d = d;
  p.angles = MfVolParams::linear_angles(count, 0.0, 0.03);
  p.v0 = v0;
  p.stretch = stretch;
  return p;
}

inline EsgConfig esg(double rate, int count, const MfVolParams& v, std::size_t n, std::uint64_t seed) {
  EsgConfig c;
  c.grid = TenorGrid(count);
  c.curve = InitialCurve::flat(rate, count);
  c.vol = v;
  c.scenarios = n;
  c.seed = seed;
  return c;
}

}  // namespace alm::testing
