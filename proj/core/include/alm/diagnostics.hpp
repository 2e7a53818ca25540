#pragma once

#include <deque>
#include <span>
#include <string>
#include <vector>

#include "alm/estimator.hpp"
#include "alm/projection.hpp"

namespace alm {

// Named yearly series; values[k][t] for t = 0..T. Points that cannot be computed are NaN.
struct EvidenceSeries {
  int horizon = 0;
  std::vector<std::string> names;
  std::deque<std::vector<double>> values;  // references from add() stay valid

  std::vector<double>& add(const std::string& name);
  const std::vector<double>& get(const std::string& name) const;
};

// E[LP_t] against 2^{-t/h} LP_0 and the h -/+ 1 envelope
EvidenceSeries runoff_evidence(const ProjectionLedger& ledger, double h);

// E[DB_t], E[DB^0_t + DB_t] against the sigma-schedule approximations
EvidenceSeries sigma_evidence(const ProjectionLedger& ledger, const EstimatorResult& est);

// E[SF_t] / E[LP_t]
EvidenceSeries sf_evidence(const ProjectionLedger& ledger, double theta);

// Relative covariance of (B_t^{-1} F_{t-1}, DB_{t-1} + SF_{t-1}) and the CV product
EvidenceSeries cov_evidence(const ProjectionLedger& ledger);

// E[sg*_t] against gamma_t^+ DB-hat_t
EvidenceSeries surrender_evidence(const ProjectionLedger& ledger, const EstimatorResult& est);

// (R_t - F_{t-1} MV_{t-1}) / BV_{t-1}: mean, sd, se
EvidenceSeries roa_evidence(const ProjectionLedger& ledger);

// E[F_{t-1} UG_{t-1} - dUG_t] against P(0,t)^{-1}(l^d_{t-1} - l^d_t) UG_0
EvidenceSeries ug_release_evidence(const ProjectionLedger& ledger, const EstimatorResult& est,
                                   std::span<const double> discount);

struct GsHatEvidence {
  EvidenceSeries series;
  double cog = 0.0;  // E[sum B^{-1} gs^-]
  double cog_se = 0.0;
  double cog_hat_mc = 0.0;  // E[sum B^{-1} gs-hat^-]
  double cog_hat_mc_se = 0.0;
};

// gs-hat_t = (F_{t-1} - k_t)(1 + theta) l^h_{t-1} LP_0 on the ledger's own forwards
GsHatEvidence gs_hat_evidence(const ProjectionLedger& ledger, const EstimatorResult& est, double lp0);

// Long format: t,statistic,value
std::string evidence_csv(const EvidenceSeries& series);

}  // namespace alm
