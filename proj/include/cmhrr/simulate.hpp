#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cmhrr/plan.hpp"
#include "cmhrr/rng.hpp"
#include "cmhrr/truncnorm.hpp"
#include "cmhrr/types.hpp"

namespace cmhrr {

// How treatment-arm stratum probabilities are built from the control arm:
//   common_rr        mu1_j = psi * mu0_j; fails if any product reaches 1.
//   common_rr_capped mu1_j = min(psi * mu0_j, 1). Keeps large risk ratios
//                    runnable when the top stratum would exceed 1; the
//                    realized marginal risk ratio then falls below psi and
//                    is reported alongside the design value.
//   rederived        treatment strata repeat the control construction with
//                    target mean psi * mu0.
enum class RiskRatioMode { common_rr, common_rr_capped, rederived };

std::string to_string(RiskRatioMode m);
RiskRatioMode risk_ratio_mode_from_string(const std::string& s);

// Population strata: score law, quantile bounds, per-stratum outcome
// probabilities for both arms.
struct PopulationSpec {
    TruncatedNormal score_law;
    std::vector<double> cutpoints;  // J+1 bounds, outer pinned to 0 and 1
    std::vector<double> phi;        // stratum masses (1/J for quantile strata)
    std::vector<double> mu0;
    std::vector<double> mu1;
    double psi = 1.0;   // design risk ratio
    double pi1 = 0.5;
    int capped_strata = 0;

    int strata_count() const { return static_cast<int>(phi.size()); }
    double mu0_marginal() const;
    double mu1_marginal() const;  // realized, equals psi * mu0 unless capped
};

PopulationSpec build_population(double mu0, double scale, double psi, double pi1, int strata_count,
                                RiskRatioMode mode);

// Draws n subjects: stratum ~ Cat(phi), score from the conditional score law
// inside the stratum interval (so stratum assignment from the score is
// exact), potential outcomes Bern(mu0_j) / Bern(mu1_j), arm
// Bern(arm_probability), observed outcome from the assigned arm.
// Fixed seed gives a byte-identical dataset.
std::vector<TrialRecord> generate_dataset(const PopulationSpec& pop, long n,
                                          double arm_probability, std::uint64_t seed);

// One simulation scenario: historical and trial populations, design
// constants and replication controls.
struct ScenarioConfig {
    std::string name;
    int strata_count = 5;
    double mu0_hist = 0.5;
    double mu0_trial = 0.5;
    double sd_hist = 0.29;
    double sd_trial = 0.29;
    double pi1 = 0.5;
    std::vector<double> psi_values;
    long n_hist = 10000;
    long n_trial = 800;
    int n_reps = 1000;
    std::uint64_t base_seed = 0;
    double alpha = 0.05;
    RiskRatioMode rr_mode = RiskRatioMode::common_rr_capped;

    void validate() const;
};

// Per-replicate estimates for one analysis method.
struct EstimateSeries {
    std::vector<double> log_rr;
    std::vector<double> se_log;
    std::vector<double> p_value;
};

struct SeriesMetrics {
    double mse = 0.0;
    double coverage = 0.0;
    double rejection_rate = 0.0;
    double empirical_variance = 0.0;
};

// Standard summaries of a replicate series against the true log risk ratio.
SeriesMetrics metrics(const EstimateSeries& series, double truth_log_rr, double alpha);

// mean(per-trial prospective estimate) - empirical sampling variance.
double estimator_bias(std::span<const double> prospective_per_trial, double empirical_variance);

struct MethodMetrics {
    SeriesMetrics series;
    double prospective_plugin_mean = 0.0;
    double prospective_modeled_mean = 0.0;
    double bias_plugin = 0.0;
    double bias_modeled = 0.0;
};

// Aggregated result for one (scenario, psi) pair.
struct PsiResult {
    double psi = 1.0;
    double psi_realized = 1.0;     // marginal mu1 / mu0 of the generator
    int capped_strata = 0;
    long n_reps_done = 0;
    long n_failed = 0;
    bool flagged = false;          // > 1% replicate failures
    MethodMetrics cmh;
    MethodMetrics unadjusted;
    double gamma_observed = 0.0;
    double gamma_plugin_mean = 0.0;
    double gamma_modeled_mean = 0.0;
    double gamma_bias_plugin = 0.0;
    double gamma_bias_modeled = 0.0;
    double r2_hist = 0.0;
    double r2_trial_control = 0.0;
    double r2_trial_treatment = 0.0;
    double r2_trial_mean = 0.0;
};

struct ScenarioResult {
    std::string name;
    std::vector<PsiResult> per_psi;
};

// Runs the full pipeline per replicate: historical generation, quantile
// strata, historical summary, prospective estimators, trial generation,
// stratified and unadjusted analyses; then aggregates. Replicate i of
// psi_values[k] draws its generator from (base_seed, k * n_reps + i) only,
// so results are independent of the thread count.
ScenarioResult run_scenario(const ScenarioConfig& config, int threads = 1);

}  // namespace cmhrr
