#include <gtest/gtest.h>

#include <cmath>

#include "alm/errors.hpp"
#include "alm/liability_book.hpp"
#include "fixtures.hpp"

using namespace alm;
using alm::testing::fair_point;

namespace {

ContractTerms endowment(int maturity, double rho) {
  ContractTerms c;
  c.id = "x";
  c.maturity = maturity;
  c.rho = rho;
  c.sum_insured = 100.0;
  c.policies = 1.0;
  c.age = 45.0;
  return c;
}

}  // namespace

TEST(TechnicalRate, Examples) {
  const std::vector<ModelPoint> one{fair_point("a", 5, 0.03, 100.0)};
  EXPECT_DOUBLE_EQ(technical_rate(one, 1), 0.03);

  const std::vector<ModelPoint> two{fair_point("a", 5, 0.02, 100.0), fair_point("b", 5, 0.04, 300.0)};
  EXPECT_NEAR(technical_rate(two, 1), 0.035, 1e-15);

  bool runoff = false;
  EXPECT_EQ(technical_rate(one, 7, &runoff), 0.0);
  EXPECT_TRUE(runoff);
}

TEST(TechnicalGains, FairRoll) {
  const auto x = fair_point("a", 5, 0.03, 100.0);
  for (int t = 1; t < 5; ++t) {
    EXPECT_NEAR(technical_gains(0.03, x.reserve[t - 1], x.reserve[t], 0.0, 0.0, 0.0, 0.0), 0.0, 1e-15);
  }
}

TEST(TechnicalGains, ExpenseLoadingAndSurrenderGain) {
  const double v0 = 100.0, v1 = 103.0;
  EXPECT_NEAR(technical_gains(0.03, v0, v1, 2.0, 0.0, 0.0, 0.0) * v0, 2.0, 1e-12);
  const double base = technical_gains(0.03, v0, v1, 0.0, 0.0, 0.0, 0.0);
  EXPECT_NEAR(technical_gains(0.03, v0, v1, 0.0, 0.0, 0.0, 0.7) - base, 0.7 / v0, 1e-15);
  bool runoff = false;
  EXPECT_EQ(technical_gains(0.03, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, &runoff), 0.0);
  EXPECT_TRUE(runoff);
}

TEST(Declare, NothingDeclared) {
  const std::vector<ModelPoint> pts{fair_point("a", 5, 0.02, 100.0), fair_point("b", 5, 0.04, 100.0)};
  BonusLedger ledger(2, true);
  EXPECT_DOUBLE_EQ(ledger.declare(0.0, pts, 1), 0.02);
  EXPECT_TRUE(ledger.cohorts().empty());
  EXPECT_EQ(ledger.total(), 0.0);
}

TEST(Declare, OnePointInversion) {
  const std::vector<ModelPoint> pts{fair_point("a", 5, 0.02, 1000.0)};
  BonusLedger ledger(1, true);
  EXPECT_NEAR(ledger.declare(10.0, pts, 1), 0.03, 1e-15);
  EXPECT_DOUBLE_EQ(ledger.total(), 10.0);
  ASSERT_EQ(ledger.cohorts().size(), 1u);
  EXPECT_EQ(ledger.cohorts()[0].year, 1);
}

TEST(Declare, PiecewiseLinearRoot) {
  const std::vector<ModelPoint> pts{fair_point("a", 5, 0.02, 100.0), fair_point("b", 5, 0.04, 100.0)};
  BonusLedger ledger(2, false);
  const double tau = ledger.declare(1.0, pts, 1);
  EXPECT_NEAR(tau, 0.03, 1e-15);
  EXPECT_NEAR(std::max(tau - 0.02, 0.0) * 100 + std::max(tau - 0.04, 0.0) * 100, 1.0, 1e-12);
  EXPECT_NEAR(ledger.balance(0), 1.0, 1e-12);
  EXPECT_EQ(ledger.balance(1), 0.0);
}

TEST(Declare, MaturingPointsAreNotEligible) {
  const std::vector<ModelPoint> pts{fair_point("a", 2, 0.02, 100.0)};
  BonusLedger ledger(1, false);
  EXPECT_THROW(ledger.declare(1.0, pts, 2), LedgerError);
  EXPECT_THROW(ledger.declare(-1.0, pts, 1), DomainError);
}

TEST(Payout, NoDecrementsNoPayout) {
  const std::vector<ModelPoint> pts{fair_point("a", 5, 0.02, 1000.0)};
  BonusLedger ledger(1, false);
  ledger.declare(10.0, pts, 1);
  const auto out = ledger.payout(pts, 2);
  EXPECT_EQ(out.ph, 0.0);
  EXPECT_EQ(out.sg, 0.0);
}

TEST(Payout, MaturityReleasesCohort) {
  std::vector<ModelPoint> pts{fair_point("a", 3, 0.02, 1000.0)};
  BonusLedger ledger(1, true);
  ledger.declare(100.0 * 1000.0 * 0.01 / 10.0, pts, 1);
  const double declared = ledger.total();
  const auto out = ledger.payout(pts, 3);
  EXPECT_DOUBLE_EQ(out.ph, declared);
  EXPECT_EQ(out.sg, 0.0);
  EXPECT_EQ(ledger.total(), 0.0);
  const auto& c = ledger.cohorts()[0];
  EXPECT_DOUBLE_EQ((c.released_ph + c.released_sg) / c.declared, 1.0);
}

TEST(Payout, SurrenderSplitAtKappa) {
  std::vector<ModelPoint> pts{fair_point("a", 10, 0.02, 10000.0)};
  pts[0].surrender_rate[5] = 0.1;
  ASSERT_DOUBLE_EQ(pts[0].kappa(5), 0.95);
  BonusLedger ledger(1, false);
  ledger.declare(100.0, pts, 1);
  const auto out = ledger.payout(pts, 5);
  EXPECT_NEAR(out.ph, 9.5, 1e-12);
  EXPECT_NEAR(out.sg, 0.5, 1e-12);
  EXPECT_NEAR(ledger.total(), 90.0, 1e-12);
}

TEST(RollForward, FullPassThrough) {
  LiabilityState prev{1000.0, 10.0, 50.0, 20.0, 0.03};
  const auto next = roll_forward(prev, 990.0, 9.0, 8.0, 0.0, 0.0, 8.0, 0.03);
  EXPECT_DOUBLE_EQ(next.sf, 20.0);
  EXPECT_DOUBLE_EQ(next.db, 58.0);
}

TEST(RollForward, NoDeclaration) {
  LiabilityState prev{1000.0, 10.0, 50.0, 20.0, 0.03};
  const auto next = roll_forward(prev, 990.0, 9.0, 0.0, 4.0, 1.0, 8.0, 0.03);
  EXPECT_DOUBLE_EQ(next.db, 45.0);
  EXPECT_DOUBLE_EQ(next.sf, 28.0);
}

TEST(RollForward, PotIdentity) {
  LiabilityState prev{1000.0, 10.0, 50.0, 20.0, 0.03};
  const double ph_star = 7.25, ph = 3.5, sg = 0.125, g = 9.0;
  const auto next = roll_forward(prev, 990.0, 9.0, ph_star, ph, sg, g, 0.03);
  EXPECT_EQ((next.db + next.sf) - (prev.db + prev.sf) - (g - ph - sg), 0.0);
  EXPECT_THROW(roll_forward(prev, 990.0, 9.0, 40.0, 0.0, 0.0, 1.0, 0.03), RuleViolation);
}

TEST(ModelPoints, EquivalencePremiumRunsReservesOff) {
  DecrementBasis basis;
  const auto terms = endowment(10, 0.025);
  const auto x = build_model_point(terms, basis);
  EXPECT_NO_THROW(x.validate());
  EXPECT_GT(x.premium, 0.0);
  EXPECT_NEAR(x.reserve.back(), 0.0, 1e-9);
  EXPECT_GT(x.benefits.back(), 0.0);
}

TEST(ModelPoints, AggregateAndScaling) {
  std::vector<ModelPoint> pts{fair_point("a", 3, 0.02, 100.0), fair_point("b", 5, 0.04, 300.0)};
  const auto s = aggregate(pts, 6);
  EXPECT_DOUBLE_EQ(s.reserve[0], 400.0);
  EXPECT_NEAR(s.rho[1], 0.035, 1e-15);
  EXPECT_EQ(s.reserve[6], 0.0);
  scale_policies(pts, 2.0);
  EXPECT_DOUBLE_EQ(aggregate(pts, 6).reserve[0], 800.0);
  EXPECT_THROW(aggregate(pts, 4), DataError);
}
