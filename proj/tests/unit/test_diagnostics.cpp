#include <gtest/gtest.h>

#include <cmath>

#include "alm/diagnostics.hpp"
#include "alm/errors.hpp"
#include "fixtures.hpp"

using namespace alm;

namespace {

// Identical scenarios: LP halves every four years, flat 2% forward.
ProjectionLedger deterministic(std::size_t n, int horizon) {
  BalanceSnapshot b0{110.0, 115.0, 5.0, 100.0, 0.0, 0.0, 10.0};
  ProjectionLedger l(n, horizon, b0);
  for (std::size_t p = 0; p < n; ++p)
    for (int t = 1; t <= horizon; ++t) {
      auto& r = l.row(p, t);
      r.forward = 0.02;
      r.numeraire = std::pow(1.02, t);
      r.v = 100.0 * std::exp2(-t / 4.0);
      r.sf = 10.0;
      r.db = 1.0;
      r.gs = 1.0;
    }
  return l;
}

}  // namespace

TEST(RunoffEvidence, AnchorsAtInitialLp) {
  const auto l = deterministic(3, 12);
  const auto s = runoff_evidence(l, 4.0);
  EXPECT_DOUBLE_EQ(s.get("E_LP")[0], 100.0);
  EXPECT_DOUBLE_EQ(s.get("lh_LP0")[0], 100.0);
  EXPECT_DOUBLE_EQ(s.get("lh_LP0")[4], 50.0);
  EXPECT_NEAR(s.get("E_LP")[4], 51.0, 1e-12);
  EXPECT_THROW(s.get("missing"), DataError);
}

TEST(CovEvidence, ZeroForIdenticalScenarios) {
  const auto s = cov_evidence(deterministic(4, 6));
  for (int t = 1; t <= 6; ++t) {
    EXPECT_NEAR(s.get("rel_cov")[static_cast<std::size_t>(t)], 0.0, 1e-15);
    EXPECT_EQ(s.get("omitted")[static_cast<std::size_t>(t)], 0.0);
  }
  EXPECT_EQ(cov_evidence(deterministic(1, 6)).get("omitted")[1], 1.0);
}

TEST(SfEvidence, Ratio) {
  const auto s = sf_evidence(deterministic(2, 4), 0.1);
  EXPECT_DOUBLE_EQ(s.get("E_SF_over_E_LP")[0], 0.1);
  EXPECT_DOUBLE_EQ(s.get("theta")[3], 0.1);
}

TEST(GsHatEvidence, DeterministicForward) {
  const auto l = deterministic(2, 6);
  EstimatorResult est;
  est.theta = 0.1;
  est.h = 4.0;
  est.strike.assign(7, 0.0);
  const auto g = gs_hat_evidence(l, est, 100.0);
  for (int t = 1; t <= 6; ++t)
    EXPECT_NEAR(g.series.get("E_gs_hat")[static_cast<std::size_t>(t)],
                0.02 * 1.1 * decay(t - 1, 4.0, 6) * 100.0, 1e-12);
  EXPECT_EQ(g.cog, 0.0);
  EXPECT_EQ(g.cog_hat_mc, 0.0);

  est.strike.assign(7, 0.03);
  const auto neg = gs_hat_evidence(l, est, 100.0);
  double expected = 0.0;
  for (int t = 1; t <= 6; ++t) expected += 0.01 * 1.1 * decay(t - 1, 4.0, 6) * 100.0 / std::pow(1.02, t);
  EXPECT_NEAR(neg.cog_hat_mc, expected, 1e-12);
  EXPECT_NEAR(neg.cog_hat_mc_se, 0.0, 1e-12);
}

TEST(RoaEvidence, ZeroExcessReturn) {
  auto l = deterministic(3, 2);
  for (std::size_t p = 0; p < 3; ++p) {
    l.row(p, 1).market_return = 0.02 * 115.0;
    l.row(p, 1).bv = 110.0;
  }
  const auto s = roa_evidence(l);
  EXPECT_NEAR(s.get("mean")[1], 0.0, 1e-15);
  EXPECT_NEAR(s.get("se")[1], 0.0, 1e-15);
}

TEST(EvidenceCsv, SkipsMissing) {
  EvidenceSeries s{2, {}, {}};
  auto& a = s.add("a");
  a[1] = 3.5;
  EXPECT_EQ(evidence_csv(s), "t,statistic,value\n1,a,3.5\n");
}
