#pragma once

#include <span>
#include <vector>

#include "cmhrr/types.hpp"

namespace cmhrr {

// Sample parameters extracted from a stratified historical dataset
// (Procedure 1 output): stratum propensities, stratum and marginal control
// event probabilities, and the rank correlation between stratum and outcome.
struct HistoricalSummary {
    int strata_count = 0;
    std::vector<double> phi_hat;        // stratum propensities, sums to 1
    std::vector<double> mu0j_hat;       // stratum control event probabilities
    std::vector<double> mean_score;     // observed mean prognostic score per stratum
    double mu0_hat = 0.0;               // marginal control event probability
    double r_xy = 0.0;                  // Spearman correlation (stratum, outcome)
    long n_historical = 0;
};

// Midranks (average ranks for ties), 1-based.
std::vector<double> midranks(std::span<const double> values);

// Tie-corrected Spearman correlation: Pearson correlation of midranks.
// Throws NumericError("zero variance ...") if either input is constant.
double spearman(std::span<const double> x, std::span<const double> y);

// Empirical-quantile cutpoints (linear interpolation of order statistics,
// the type-7 rule). Outer cutpoints are pinned to 0 and 1 so trial scores
// outside the historical range still map to the edge strata.
StrataSpec quantile_cutpoints(std::span<const PrognosticScore> scores, int strata_count);

// Step-function stratum assignment: returns j in 1..J with
// v_{j-1} <= score < v_j for j < J and v_{J-1} <= score <= v_max for j = J.
int assign_stratum(PrognosticScore score, const StrataSpec& spec);

// Procedure 1 step 7: stratum propensities, event probabilities, marginal
// event probability and Spearman correlation. Every stratum must receive at
// least one record.
HistoricalSummary summarize_historical(std::span<const HistoricalRecord> records,
                                       const StrataSpec& spec);

}  // namespace cmhrr
