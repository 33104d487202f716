#include "cmhrr/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cmhrr/normal.hpp"

namespace cmhrr {

namespace {

// Order-insensitive summation: sorting the terms makes the result invariant
// under stratum permutation, which the estimator contract promises exactly.
double sorted_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
}

struct MhSums {
    double numerator;
    double denominator;
};

MhSums mh_sums(const ContingencyPanel& panel) {
    std::vector<double> num_terms, den_terms;
    num_terms.reserve(panel.strata.size());
    den_terms.reserve(panel.strata.size());
    for (const auto& s : panel.strata) {
        const double nj = static_cast<double>(s.subjects());
        if (nj == 0.0) continue;
        num_terms.push_back(static_cast<double>(s.events_treated) *
                            static_cast<double>(s.n_control) / nj);
        den_terms.push_back(static_cast<double>(s.events_control) *
                            static_cast<double>(s.n_treated) / nj);
    }
    return {sorted_sum(std::move(num_terms)), sorted_sum(std::move(den_terms))};
}

}  // namespace

MhEstimate mh_risk_ratio(const ContingencyPanel& panel) {
    validate_panel(panel);
    const auto sums = mh_sums(panel);
    MhEstimate est;
    est.numerator = sums.numerator;
    est.denominator = sums.denominator;
    if (est.numerator <= 0.0 && est.denominator <= 0.0) {
        throw NumericError("zero MH numerator and denominator: no events in either arm");
    }
    if (est.denominator <= 0.0) {
        throw NumericError("zero MH denominator: no control-arm events in any stratum");
    }
    if (est.numerator <= 0.0) {
        throw NumericError("zero MH numerator: no treated-arm events in any stratum");
    }
    est.rr_hat = est.numerator / est.denominator;
    return est;
}

double gr_variance(const ContingencyPanel& panel) {
    validate_panel(panel);
    const auto sums = mh_sums(panel);
    if (sums.numerator <= 0.0 || sums.denominator <= 0.0) {
        throw NumericError("zero MH numerator and/or denominator: variance undefined");
    }
    std::vector<double> terms;
    terms.reserve(panel.strata.size());
    for (const auto& s : panel.strata) {
        const double nj = static_cast<double>(s.subjects());
        if (nj == 0.0) continue;
        const double n1 = static_cast<double>(s.n_treated);
        const double n0 = static_cast<double>(s.n_control);
        const double z1 = static_cast<double>(s.events_treated);
        const double z0 = static_cast<double>(s.events_control);
        const double zj = static_cast<double>(s.events());
        terms.push_back((n1 * n0 * zj - z1 * z0 * nj) / (nj * nj));
    }
    return sorted_sum(std::move(terms)) / (sums.numerator * sums.denominator);
}

AnalysisResult wald_inference(const MhEstimate& est, double var_log, double alpha) {
    if (!(var_log >= 0.0)) throw ValidationError("variance must be nonnegative");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
    if (!(est.rr_hat > 0.0)) throw NumericError("risk ratio estimate must be positive");

    AnalysisResult r;
    r.rr_hat = est.rr_hat;
    r.log_rr = std::log(est.rr_hat);
    r.se_log_rr = std::sqrt(var_log);
    const double z = norm_quantile(1.0 - alpha / 2.0);
    r.ci_low = std::exp(r.log_rr - z * r.se_log_rr);
    r.ci_high = std::exp(r.log_rr + z * r.se_log_rr);
    if (var_log == 0.0) {
        r.degenerate_variance = r.log_rr != 0.0;
        r.p_value = r.log_rr == 0.0 ? 1.0 : 0.0;
    } else {
        r.p_value = 2.0 * norm_sf(std::fabs(r.log_rr) / r.se_log_rr);
    }
    return r;
}

ContingencyPanel build_panel(std::span<const TrialRecord> records, const StrataSpec& spec,
                             long* missing_excluded) {
    ContingencyPanel panel;
    panel.strata.resize(static_cast<std::size_t>(spec.strata_count()));
    long missing = 0;
    for (const auto& rec : records) {
        if (!rec.outcome) {
            ++missing;
            continue;
        }
        auto& s = panel.strata[static_cast<std::size_t>(assign_stratum(rec.score, spec)) - 1];
        if (rec.arm == 1) {
            s.n_treated += 1;
            s.events_treated += *rec.outcome;
        } else {
            s.n_control += 1;
            s.events_control += *rec.outcome;
        }
    }
    if (missing_excluded) *missing_excluded = missing;
    return panel;
}

AnalysisResult analyze_trial(std::span<const TrialRecord> records, const StrataSpec& spec,
                             double alpha) {
    long missing = 0;
    const ContingencyPanel panel = build_panel(records, spec, &missing);
    if (panel.total_subjects() == 0) {
        throw ValidationError("no complete records: every outcome is missing or empty input");
    }
    try {
        const MhEstimate est = mh_risk_ratio(panel);
        const double var_log = gr_variance(panel);
        AnalysisResult result = wald_inference(est, var_log, alpha);
        result.n_analyzed = panel.total_subjects();
        result.n_missing_excluded = missing;
        return result;
    } catch (const NumericError& e) {
        throw NumericError(std::string("trial analysis failed: ") + e.what());
    }
}

}  // namespace cmhrr
