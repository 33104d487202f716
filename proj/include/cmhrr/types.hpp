#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmhrr/errors.hpp"

namespace cmhrr {

// Prognostic score: model-predicted probability of the outcome under the
// control treatment. Always in [0,1]; out-of-range scores are rejected at
// ingestion rather than clamped.
class PrognosticScore {
public:
    PrognosticScore() = default;
    explicit PrognosticScore(double value);

    double value() const { return value_; }

private:
    double value_ = 0.0;
};

// One subject in a trial dataset. A missing outcome (recorded as NA in the
// input file) is carried explicitly and excluded by the analysis pipeline.
struct TrialRecord {
    std::string subject_id;
    PrognosticScore score;
    int arm = 0;                      // 0 = control, 1 = treatment
    std::optional<int> outcome;      // 0/1, nullopt = missing

    TrialRecord() = default;
    TrialRecord(std::string id, double score_value, int arm_value,
                std::optional<int> outcome_value);
};

// One subject in a historical (control-only) dataset. Outcomes must be
// observed.
struct HistoricalRecord {
    std::string subject_id;
    PrognosticScore score;
    int outcome = 0;

    HistoricalRecord() = default;
    HistoricalRecord(std::string id, double score_value, int outcome_value);
};

// Ordered cutpoints defining the step function from score to stratum index.
// cutpoints has length J+1, strictly increasing; strata are half-open
// [v_{j-1}, v_j) except the last, which is closed at v_max.
class StrataSpec {
public:
    explicit StrataSpec(std::vector<double> cutpoints);

    int strata_count() const { return static_cast<int>(cutpoints_.size()) - 1; }
    const std::vector<double>& cutpoints() const { return cutpoints_; }
    double lower_bound() const { return cutpoints_.front(); }
    double upper_bound() const { return cutpoints_.back(); }

    static StrataSpec single_stratum();  // {0, 1}: the unadjusted analysis

private:
    std::vector<double> cutpoints_;
};

// Per-stratum 2x2 counts. Stratum indices are 1-based in all messages.
struct StratumCounts {
    std::int64_t n_treated = 0;       // N_1j
    std::int64_t n_control = 0;       // N_0j
    std::int64_t events_treated = 0;  // Z_1j
    std::int64_t events_control = 0;  // Z_0j

    std::int64_t subjects() const { return n_treated + n_control; }  // N_j
    std::int64_t events() const { return events_treated + events_control; }  // Z_j
};

struct ContingencyPanel {
    std::vector<StratumCounts> strata;

    int strata_count() const { return static_cast<int>(strata.size()); }
    std::int64_t total_subjects() const;
};

// Returns the panel iff every stratum satisfies 0 <= Z_aj <= N_aj; otherwise
// throws naming the first violated invariant and its 1-based stratum.
const ContingencyPanel& validate_panel(const ContingencyPanel& panel);

// How to choose the treatment-arm correlation r_XY^(1) for the modeled
// estimator: by default equal to the control-arm value.
struct TreatmentCorrelation {
    bool equal_to_control = true;
    double value = 0.0;

    static TreatmentCorrelation equal() { return {}; }
    static TreatmentCorrelation fixed(double r);
};

// Trial design constants used by the planning module.
struct DesignParams {
    double psi = 1.0;          // target risk ratio
    double pi1 = 0.5;          // randomization probability to treatment
    double alpha = 0.05;       // two-sided significance level
    double target_power = 0.8;
    TreatmentCorrelation r1 = TreatmentCorrelation::equal();

    double pi0() const { return 1.0 - pi1; }
    void validate() const;
};

// Result of an analyze_trial run.
struct AnalysisResult {
    double rr_hat = 0.0;
    double log_rr = 0.0;
    double se_log_rr = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_value = 1.0;
    long n_analyzed = 0;
    long n_missing_excluded = 0;
    bool degenerate_variance = false;  // var = 0 with a nonzero estimate
};

}  // namespace cmhrr
