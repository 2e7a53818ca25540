#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "alm/errors.hpp"
#include "alm/estimator.hpp"
#include "alm/numeric.hpp"
#include "fixtures.hpp"

using namespace alm;
using alm::testing::flat_disc;

TEST(Duration, TwoFlows) {
  const std::vector<double> one(9, 1.0);
  std::vector<double> net(9, 0.0);
  net[2] = 50.0;
  net[8] = 50.0;
  const auto d = duration_h(one, net, 0.0);
  EXPECT_DOUBLE_EQ(d.h0, 5.0);
  EXPECT_DOUBLE_EQ(d.h, 5.0);
  EXPECT_DOUBLE_EQ(duration_h(one, net, -3.0).h, 5.0);
}

TEST(Duration, BonusMassLengthens) {
  const std::vector<double> one(31, 1.0);
  std::vector<double> net(31, 0.0);
  net[5] = 100.0;
  const auto d = duration_h(one, net, 50.0);
  EXPECT_DOUBLE_EQ(d.h0, 5.0);
  EXPECT_GT(d.h, 5.0);
  EXPECT_LT(d.h, 10.0);
  std::vector<double> zero(31, 0.0);
  EXPECT_THROW(duration_h(one, zero, 0.0), DomainError);
}

TEST(Decay, Halving) {
  EXPECT_DOUBLE_EQ(decay(0, 8.0, 20), 1.0);
  EXPECT_DOUBLE_EQ(decay(8, 8.0, 20), 0.5);
  EXPECT_EQ(decay(20, 8.0, 20), 0.0);
}

TEST(SigmaSchedule, Interpolates) {
  const auto s = sigma_schedule(20.0, 100.0, 30.0, 100.0, 10.0, 15);
  EXPECT_DOUBLE_EQ(s.sigma[0], 0.2);
  EXPECT_DOUBLE_EQ(s.sigma_db[0], 0.0);
  EXPECT_NEAR(s.sigma[5], 0.25, 1e-15);
  EXPECT_NEAR(s.sigma_db[5], 0.15, 1e-15);
  EXPECT_DOUBLE_EQ(s.sigma[10], 0.3);
  EXPECT_DOUBLE_EQ(s.sigma[15], 0.3);
  const auto floor = sigma_schedule(20.0, 100.0, 1.0, 100.0, 10.0, 15);
  EXPECT_DOUBLE_EQ(floor.sigma_db[10], 0.15);
}

TEST(Gamma, FairScheduleHasNoExcess) {
  const int T = 5;
  std::vector<double> rho(T + 1, 0.03), lpg(T + 1), zero(T + 1, 0.0);
  for (int t = 0; t <= T; ++t) lpg[static_cast<std::size_t>(t)] = 100.0 * std::pow(1.03, t);
  SigmaSchedule s;
  s.sigma.assign(T + 1, 0.0);
  s.sigma_db.assign(T + 1, 0.0);
  const auto g = gamma_hat(rho, lpg, zero, zero, zero, s);
  for (int t = 1; t <= T; ++t) EXPECT_NEAR(g[static_cast<std::size_t>(t)], 0.0, 1e-14);
}

TEST(Gamma, OutflowPerturbation) {
  const int T = 2;
  std::vector<double> rho(T + 1, 0.02), lpg{100.0, 100.0, 100.0}, zero(T + 1, 0.0), ben(T + 1, 0.0);
  ben[1] = 4.0;
  SigmaSchedule s;
  s.sigma.assign(T + 1, 0.2);
  s.sigma_db.assign(T + 1, 0.0);
  const auto g = gamma_hat(rho, lpg, zero, ben, zero, s);
  EXPECT_NEAR(g[1], 0.02 - 4.0 / (0.8 * 100.0), 1e-15);
  EXPECT_NEAR(g[2], 0.02, 1e-15);
  bool runoff = false;
  std::vector<double> gone{100.0, 0.0, 0.0};
  gamma_hat(rho, gone, zero, zero, zero, s, &runoff);
  EXPECT_TRUE(runoff);
}

TEST(BondDuration, Examples) {
  const std::vector<double> one(11, 1.0);
  std::vector<double> cf(11, 0.0);
  cf[1] = cf[3] = 10.0;
  EXPECT_DOUBLE_EQ(bond_duration(one, cf), 2.0);
  std::fill(cf.begin(), cf.end(), 0.0);
  cf[10] = 100.0;
  EXPECT_DOUBLE_EQ(bond_duration(flat_disc(0.03, 10), cf), 10.0);
  for (int t = 1; t < 10; ++t) cf[static_cast<std::size_t>(t)] = 3.0;
  cf[10] = 103.0;
  EXPECT_LT(bond_duration(flat_disc(0.03, 10), cf), 10.0);
}

TEST(Strike, Cases) {
  const auto disc = flat_disc(0.02, 10);
  EXPECT_NEAR(strike(3, disc, 0.0, 100.0, 0.05, 0.2, 0.03, 0.01, 5.0, 4.0, 10), 0.8 * 0.02 / 1.05, 1e-15);
  const double release = 1.0 - std::exp2(-0.25);
  EXPECT_NEAR(strike(1, disc, 10.0, 100.0, 0.0, 0.0, 0.0, 0.0, 5.0, 4.0, 10), -release * 1.02 * 0.1, 1e-15);
  EXPECT_GT(strike(1, disc, -10.0, 100.0, 0.0, 0.0, 0.0, 0.0, 5.0, 4.0, 10), 0.0);
  EXPECT_THROW(strike(12, disc, 0.0, 100.0, 0.0, 0.0, 0.0, 0.0, 5.0, 4.0, 10), DomainError);
}

TEST(Floorlet, IntrinsicAndAtm) {
  EXPECT_DOUBLE_EQ(floorlet_black(3, 0.01, 0.02, 0.0, 0.9), 0.9 * 0.01);
  EXPECT_EQ(floorlet_black(3, 0.03, 0.02, 0.0, 0.9), 0.0);
  const double atm = floorlet_black(4, 0.02, 0.02, 0.01, 0.9);
  EXPECT_NEAR(atm, 0.9 * 0.01 * 2.0 / std::sqrt(2.0 * std::numbers::pi), 1e-16);
}

TEST(Floorlet, MatchesQuadrature) {
  const double f0 = 0.015, k = 0.01, iv = 0.008, p = 0.95;
  const int t = 9;
  const double sd = iv * 3.0;
  const int n = 200000;
  const double lo = f0 - 12.0 * sd, hi = k, dx = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * dx;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * (k - x) * normal_pdf(x, f0, sd);
  }
  EXPECT_NEAR(floorlet_black(t, f0, k, iv, p), p * sum * dx, 1e-10);
}

TEST(InitialForward, FromDiscount) {
  EXPECT_NEAR(initial_forward(flat_disc(0.04, 5), 3), 0.04, 1e-14);
}

TEST(Bracket, PublishedBounds) {
  const auto b = bracket(34.06, 68.08);
  EXPECT_NEAR(b.fdb_hat, 51.07, 1e-9);
  EXPECT_NEAR(b.eps, 17.01, 1e-9);
}

TEST(Bounds, PublishedComponents) {
  EXPECT_NEAR(153.54 - 0.77 - 14.94, 137.83, 0.02);
  EstimatorInputs in;
  in.lp0 = 247.6;
  in.sf0 = 11.6;
  in.gph = 0.755;
  in.fdb0_override = 39.12;
  in.ii_override = 1.88;
  in.iii_override = 3.17;
  in.cog_override = 38.62;
  const auto r = bounds(in);
  EXPECT_NEAR(r.lb, 34.07, 0.02);
  EXPECT_NEAR(r.ub, 39.12 + 0.755 * 38.62, 1e-12);
  EXPECT_NEAR(r.fdb_hat, 0.5 * (r.lb + r.ub), 1e-12);
}

namespace {

EstimatorInputs small_inputs(double gph) {
  EstimatorInputs in;
  in.horizon = 5;
  in.lp0 = 100.0;
  in.sf0 = 4.0;
  in.ug0 = 5.0;
  in.db0_0 = 10.0;
  in.gph = gph;
  in.discount = flat_disc(0.02, 5);
  in.iv.assign(6, 0.01);
  in.premiums.assign(6, 0.0);
  in.expenses.assign(6, 0.0);
  in.benefits = {0.0, 20.0, 20.0, 20.0, 20.0, 20.0};
  in.lpg = {90.0, 72.0, 54.0, 36.0, 18.0, 0.0};
  in.rho.assign(6, 0.02);
  in.bond_cash_flows = {0.0, 3.0, 3.0, 103.0, 0.0, 0.0};
  return in;
}

}  // namespace

TEST(Bounds, FullParticipationCollapsesLowerBound) {
  const auto r = bounds(small_inputs(1.0));
  EXPECT_DOUBLE_EQ(r.lb, r.fdb0);
  EXPECT_GE(r.ub, r.fdb0);
  EXPECT_GE(r.cog_hat, 0.0);
}

TEST(Bounds, Ordering) {
  const auto r = bounds(small_inputs(0.8));
  EXPECT_LE(r.lb, r.fdb_hat);
  EXPECT_LE(r.fdb_hat, r.ub);
  EXPECT_NEAR(r.eps, 0.5 * (r.ub - r.lb), 1e-12);
  EXPECT_GT(r.ii_hat + r.iii_hat, 0.0);
}

TEST(Bounds, Validation) {
  auto in = small_inputs(0.8);
  in.lp0 = 0.0;
  EXPECT_THROW(bounds(in), ConfigError);
  in = small_inputs(0.8);
  in.discount.resize(3);
  EXPECT_THROW(bounds(in), DataError);
}
