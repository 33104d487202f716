#include "cmhrr/types.hpp"

#include <cmath>
#include <utility>

namespace cmhrr {

namespace {
std::string stratum_tag(int j) { return "stratum " + std::to_string(j + 1); }
}  // namespace

PrognosticScore::PrognosticScore(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ValidationError("prognostic score out of [0,1]: " + std::to_string(value));
    }
}

TrialRecord::TrialRecord(std::string id, double score_value, int arm_value,
                         std::optional<int> outcome_value)
    : subject_id(std::move(id)), score(score_value), arm(arm_value), outcome(outcome_value) {
    if (arm != 0 && arm != 1) {
        throw ValidationError("arm must be 0 or 1, got " + std::to_string(arm));
    }
    if (outcome && *outcome != 0 && *outcome != 1) {
        throw ValidationError("outcome must be 0, 1 or NA, got " + std::to_string(*outcome));
    }
}

HistoricalRecord::HistoricalRecord(std::string id, double score_value, int outcome_value)
    : subject_id(std::move(id)), score(score_value), outcome(outcome_value) {
    if (outcome != 0 && outcome != 1) {
        throw ValidationError("historical outcome must be 0 or 1, got " +
                              std::to_string(outcome));
    }
}

StrataSpec::StrataSpec(std::vector<double> cutpoints) : cutpoints_(std::move(cutpoints)) {
    if (cutpoints_.size() < 2) {
        throw ValidationError("strata spec needs at least two cutpoints");
    }
    for (std::size_t i = 0; i + 1 < cutpoints_.size(); ++i) {
        if (!(cutpoints_[i] < cutpoints_[i + 1])) {
            throw ValidationError("cutpoints must be strictly increasing (violation at index " +
                                  std::to_string(i + 1) + ")");
        }
    }
    for (double v : cutpoints_) {
        if (!std::isfinite(v)) throw ValidationError("cutpoints must be finite");
    }
}

StrataSpec StrataSpec::single_stratum() { return StrataSpec({0.0, 1.0}); }

std::int64_t ContingencyPanel::total_subjects() const {
    std::int64_t total = 0;
    for (const auto& s : strata) total += s.subjects();
    return total;
}

const ContingencyPanel& validate_panel(const ContingencyPanel& panel) {
    if (panel.strata.empty()) {
        throw ValidationError("contingency panel has no strata");
    }
    for (int j = 0; j < panel.strata_count(); ++j) {
        const auto& s = panel.strata[j];
        if (s.n_treated < 0 || s.n_control < 0 || s.events_treated < 0 ||
            s.events_control < 0) {
            throw ValidationError("negative count in " + stratum_tag(j));
        }
        if (s.events_treated > s.n_treated) {
            throw ValidationError("events exceed subjects (treated arm) in " + stratum_tag(j));
        }
        if (s.events_control > s.n_control) {
            throw ValidationError("events exceed subjects (control arm) in " + stratum_tag(j));
        }
    }
    return panel;
}

TreatmentCorrelation TreatmentCorrelation::fixed(double r) {
    if (!(r >= -1.0 && r <= 1.0)) {
        throw ValidationError("treatment-arm correlation must be in [-1,1]");
    }
    return {false, r};
}

void DesignParams::validate() const {
    if (!(psi > 0.0)) throw ValidationError("risk ratio psi must be > 0");
    if (!(pi1 > 0.0 && pi1 < 1.0)) throw ValidationError("pi1 must be in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
    if (!(target_power > 0.0 && target_power < 1.0)) {
        throw ValidationError("target power must be in (0,1)");
    }
}

}  // namespace cmhrr
