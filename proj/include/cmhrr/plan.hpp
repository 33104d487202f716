#pragma once

#include <string>
#include <vector>

#include "cmhrr/stratify.hpp"
#include "cmhrr/types.hpp"

namespace cmhrr {

// Population (or estimated) strata parameters feeding the asymptotic
// variance of sqrt(n) * log(rr_hat).
struct StratumProfile {
    std::vector<double> phi;   // propensities, sum to 1
    std::vector<double> mu0;   // control event probabilities
    std::vector<double> mu1;   // treatment event probabilities
    double pi1 = 0.5;
    double psi = 1.0;          // marginal risk ratio

    void validate() const;
};

// Affine-in-stratum-index event probabilities built from a marginal mean and
// a rank correlation (the modeled estimator's per-arm inputs).
struct ModeledProbabilities {
    double beta0 = 0.0;
    double beta1 = 0.0;
    std::vector<double> mu_tilde;      // mu_tilde_j = beta0 + beta1 * j
    double mu_tilde_marginal = 0.0;    // (1/J) * sum_j mu_tilde_j
    double sigma_y = 0.0;
    double sigma_x = 0.0;
    double x_bar = 0.0;
};

enum class VarianceMethod { exact, plug_in, modeled, unadjusted };

std::string to_string(VarianceMethod m);

// Asymptotic variance of sqrt(n) * log(rr_hat); per-trial value for a given
// sample size is sigma2_inf / (n - 1).
struct VarianceEstimate {
    double sigma2_inf = 0.0;
    VarianceMethod method = VarianceMethod::exact;

    double per_trial(long n) const;
};

struct PowerSpec {
    double tau = 0.0;    // log risk ratio
    double sigma = 1.0;  // sqrt of the asymptotic variance
    double alpha = 0.05;
    long n = 2;

    void validate() const;
};

// The asymptotic variance of the stratified log-RR estimator, with
// per-stratum risk ratios psi_j = mu1_j / mu0_j.
VarianceEstimate asymptotic_variance(const StratumProfile& profile);

// Plug-in estimator: historical stratum estimates with mu1_j = psi * mu0_j
// (common risk ratio across strata).
VarianceEstimate plug_in_variance(const HistoricalSummary& summary, const DesignParams& design);

// Affine model mu_tilde_j = beta0 + beta1 * j over j = 1..J with
// beta1 = r * sigma_Y / sigma_X and beta0 = arm_mean - beta1 * x_bar.
// Fails rather than clamping if any modeled probability leaves (0,1).
ModeledProbabilities modeled_probabilities(const HistoricalSummary& summary, double arm_mean,
                                           double r_xy);

// Modeled estimator: both arms replaced by their affine models; the
// treatment arm uses mu1 = psi * mu0 and the correlation given by
// design.r1 (defaults to the control-arm value).
VarianceEstimate modeled_variance(const HistoricalSummary& summary, const DesignParams& design);

// Single-stratum (unstratified) asymptotic variance.
VarianceEstimate unadjusted_variance(double mu0, const DesignParams& design);

// gamma = 1 - adjusted / unadjusted.
double variance_reduction(const VarianceEstimate& adjusted, const VarianceEstimate& unadjusted);

// Two-sided asymptotic power at sample size n.
double power_at_n(const PowerSpec& spec);

// Smallest n whose power reaches the design's target (closed-form seed plus
// linear scan, so the threshold crossing is exact).
long required_sample_size(const DesignParams& design, const VarianceEstimate& variance);

}  // namespace cmhrr
