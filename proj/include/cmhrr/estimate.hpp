#pragma once

#include <span>

#include "cmhrr/stratify.hpp"
#include "cmhrr/types.hpp"

namespace cmhrr {

// Mantel-Haenszel point estimate of the marginal risk ratio.
struct MhEstimate {
    double numerator = 0.0;    // sum_j Z_1j N_0j / N_j
    double denominator = 0.0;  // sum_j Z_0j N_1j / N_j
    double rr_hat = 0.0;
};

// MH risk ratio over a stratified panel. Strata with N_j = 0 contribute
// nothing. Throws NumericError when either sum is zero; no continuity
// correction is applied.
MhEstimate mh_risk_ratio(const ContingencyPanel& panel);

// Greenland-Robins estimator of the sampling variance of log(rr_hat).
double gr_variance(const ContingencyPanel& panel);

// Wald confidence interval and two-sided p-value on the log scale.
AnalysisResult wald_inference(const MhEstimate& est, double var_log, double alpha);

// Builds the per-stratum 2x2 panel from complete-case records.
// Records with missing outcomes are skipped; missing_excluded reports how
// many were dropped.
ContingencyPanel build_panel(std::span<const TrialRecord> records, const StrataSpec& spec,
                             long* missing_excluded = nullptr);

// Complete-case stratified analysis: panel -> MH -> GR -> Wald. The
// unadjusted analysis is the same pipeline with a single-stratum spec.
AnalysisResult analyze_trial(std::span<const TrialRecord> records, const StrataSpec& spec,
                             double alpha);

}  // namespace cmhrr
