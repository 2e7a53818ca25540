#include <gtest/gtest.h>

#include "alm/errors.hpp"
#include "alm/management.hpp"
#include "fixtures.hpp"

using namespace alm;
using alm::testing::fair_point;
using alm::testing::flat_disc;

TEST(TargetRate, Examples) {
  EXPECT_DOUBLE_EQ(target_rate(0.025, 0.025, 0.01), 0.025);
  EXPECT_NEAR(target_rate(0.02, 0.06, 0.01), 0.03, 1e-15);
  EXPECT_DOUBLE_EQ(target_rate(0.02, 0.0, 0.01), 0.01);
}

TEST(CoverNegativeGs, NoGainsLeavesGs) {
  PortfolioState pf;
  pf.bonds.push_back({5, 100.0, 0.02, 100.0, 95.0});
  const auto r = cover_negative_gs(pf, -10.0);
  EXPECT_EQ(r.gs, -10.0);
  EXPECT_EQ(r.realized, 0.0);
}

TEST(CoverNegativeGs, SinglePositionOffset) {
  PortfolioState pf;
  pf.bonds.push_back({5, 100.0, 0.02, 100.0, 125.0});
  const auto r = cover_negative_gs(pf, -10.0);
  EXPECT_NEAR(r.realized, 10.0, 1e-12);
  EXPECT_EQ(r.gs, 0.0);
  EXPECT_NEAR(pf.bonds[0].ug(), 15.0, 1e-12);
}

TEST(CoverNegativeGs, OrderedGreedy) {
  PortfolioState pf;
  pf.bonds.push_back({5, 100.0, 0.02, 100.0, 104.0});
  pf.equities.push_back({54.0, 50.0, 0.2, 0.0});
  PropertyPosition p;
  p.bv_land = 50.0;
  p.mv_land = 54.0;
  pf.properties.push_back(p);
  const auto r = cover_negative_gs(pf, -10.0);
  ASSERT_EQ(r.log.size(), 3u);
  EXPECT_NEAR(r.log[0].amount, 4.0, 1e-12);
  EXPECT_EQ(r.log[0].cls, AssetClass::bond);
  EXPECT_NEAR(r.log[1].amount, 4.0, 1e-12);
  EXPECT_EQ(r.log[1].cls, AssetClass::equity);
  EXPECT_NEAR(r.log[2].amount, 2.0, 1e-12);
  EXPECT_EQ(r.log[2].cls, AssetClass::property);
  EXPECT_EQ(r.gs, 0.0);
}

TEST(TrimParticipation, NoLossesNoAction) {
  const std::vector<ModelPoint> pts{fair_point("a", 5, 0.02, 1000.0)};
  PortfolioState pf;
  pf.bonds.push_back({5, 100.0, 0.02, 100.0, 110.0});
  const auto r = trim_participation(pf, 20.0, 1.0, participation_base(pts, 1), 0.03);
  EXPECT_EQ(r.realized, 0.0);
  EXPECT_EQ(r.gs, 20.0);
}

TEST(TrimParticipation, GapMatchingLoss) {
  const std::vector<ModelPoint> pts{fair_point("a", 5, 0.02, 1000.0)};
  const auto base = participation_base(pts, 1);
  ASSERT_NEAR(participation_rate(base, 20.0), 0.04, 1e-15);
  PortfolioState pf;
  pf.bonds.push_back({5, 100.0, 0.02, 100.0, 90.0});
  const auto r = trim_participation(pf, 20.0, 1.0, base, 0.03);
  EXPECT_NEAR(r.realized, -10.0, 1e-12);
  EXPECT_NEAR(r.gs, 10.0, 1e-12);
  EXPECT_NEAR(participation_rate(base, r.gs), 0.03, 1e-15);
  EXPECT_NEAR(pf.bonds[0].ug(), 0.0, 1e-12);
}

TEST(TrimParticipation, InsufficientLosses) {
  const std::vector<ModelPoint> pts{fair_point("a", 5, 0.02, 1000.0)};
  const auto base = participation_base(pts, 1);
  PortfolioState pf;
  pf.bonds.push_back({5, 100.0, 0.02, 100.0, 96.0});
  const auto r = trim_participation(pf, 20.0, 1.0, base, 0.03);
  EXPECT_NEAR(r.realized, -4.0, 1e-12);
  EXPECT_GT(participation_rate(base, r.gs), 0.03);
}

TEST(NuEta, EmptyFundFullPassThrough) {
  DeclarationInputs in{5.0, 10.0, 0.0, 0.02, 1000.0};
  const auto d = nu_eta(in);
  EXPECT_EQ(d.nu, 1.0);
  EXPECT_EQ(d.eta, 0.0);
  EXPECT_DOUBLE_EQ(d.ph_star, 5.0);
}

TEST(NuEta, CaseOneRatio) {
  DeclarationInputs in{20.0, 10.0, 10.0, 0.02, 1000.0};
  const auto d = nu_eta(in);
  EXPECT_DOUBLE_EQ(d.nu, 0.5);
  EXPECT_EQ(d.eta, 0.0);
}

TEST(NuEta, CaseTwoArithmetic) {
  DeclarationInputs in{5.0, 10.0, 20.0, 0.02, 1000.0};
  const auto d = nu_eta(in);
  EXPECT_EQ(d.nu, 1.0);
  EXPECT_DOUBLE_EQ(d.eta, 0.25);
  EXPECT_DOUBLE_EQ(d.ph_star, 10.0);
}

TEST(NuEta, CapForcesRelease) {
  DeclarationInputs in{5.0, 1.0, 30.0, 0.02, 1000.0};
  const auto d = nu_eta(in);
  const double sf = in.sf_prev + in.gph_gs_plus - d.ph_star;
  EXPECT_LE(sf, in.theta * (in.lp_before + d.ph_star) + 1e-12);
  EXPECT_GT(d.eta, 0.0);
}

TEST(NuEta, ThetaReleaseWithoutSurplus) {
  DeclarationInputs in{0.0, 5.0, 30.0, 0.02, 1000.0};
  const auto d = theta_release(in);
  EXPECT_EQ(d.nu, 0.0);
  const double sf = in.sf_prev - d.ph_star;
  EXPECT_NEAR(sf, in.theta * (in.lp_before + d.ph_star), 1e-12);
  DeclarationInputs calm{0.0, 5.0, 10.0, 0.02, 1000.0};
  EXPECT_EQ(theta_release(calm).ph_star, 0.0);
}

namespace {

PortfolioState toy_book() {
  PortfolioState pf;
  pf.cash.amount = 10.0;
  pf.bonds.push_back({10, 60.0, 0.03, 60.0, 60.0});
  pf.equities.push_back({30.0, 30.0, 0.2, 0.0});
  pf.set_targets_from_market_values();
  return pf;
}

}  // namespace

TEST(Rebalance, InsideBandNoTrades) {
  auto pf = toy_book();
  pf.equities[0].mv = 31.0;
  EXPECT_TRUE(rebalance_saa(pf, 0.10, flat_disc(0.03, 20), 1, 10).empty());
}

TEST(Rebalance, EquityBreachRestoresWeights) {
  auto pf = toy_book();
  const auto targets = pf.targets;
  pf.equities[0].mv = 60.0;
  const auto trades = rebalance_saa(pf, 0.10, flat_disc(0.03, 20), 1, 10);
  ASSERT_FALSE(trades.empty());
  EXPECT_EQ(trades[0].cls, AssetClass::equity);
  EXPECT_LT(trades[0].amount, 0.0);
  EXPECT_NEAR(trades[0].book_gain, -trades[0].amount * (1.0 - 30.0 / 60.0), 1e-9);
  const auto w = pf.weights();
  for (int c = 0; c < kAssetClasses; ++c)
    EXPECT_NEAR(w[static_cast<std::size_t>(c)], targets[static_cast<std::size_t>(c)], 1e-12);
  EXPECT_NEAR(pf.mv(), 130.0, 1e-9);
}

TEST(Rebalance, ZeroGainBondSoldFirst) {
  PortfolioState pf;
  pf.cash.amount = 0.0;
  pf.bonds.push_back({10, 50.0, 0.03, 45.0, 50.0});
  pf.bonds.push_back({10, 50.0, 0.03, 50.0, 50.0});
  pf.equities.push_back({100.0, 100.0, 0.2, 0.0});
  pf.set_targets_from_market_values();
  pf.equities[0].mv = 50.0;
  pf.equities[0].bv = 50.0;
  rebalance_saa(pf, 0.10, flat_disc(0.03, 20), 1, 10);
  EXPECT_DOUBLE_EQ(pf.bonds[0].mv, 50.0);
  EXPECT_LT(pf.bonds[1].mv, 50.0);
}

TEST(Rebalance, NonPositiveMarketValue) {
  PortfolioState pf;
  EXPECT_THROW(rebalance_saa(pf, 0.1, flat_disc(0.03, 20), 1, 10), ConfigError);
}

TEST(ManagementConfig, Validation) {
  ManagementConfig m;
  EXPECT_NO_THROW(m.validate());
  m.gph = 0.9;
  EXPECT_THROW(m.validate(), ConfigError);
}
