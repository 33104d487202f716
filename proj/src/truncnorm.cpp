#include "cmhrr/truncnorm.hpp"

#include <algorithm>
#include <cmath>

#include "cmhrr/normal.hpp"

namespace cmhrr {

namespace {
constexpr double kTinyMass = 1e-300;
}

TruncatedNormal::TruncatedNormal(double location, double scale)
    : location_(location), scale_(scale) {
    if (!(scale > 0.0)) throw ValidationError("truncated normal scale must be > 0");
    const double alpha = (0.0 - location_) / scale_;
    const double beta = (1.0 - location_) / scale_;
    mass_ = norm_interval_prob(alpha, beta);
    cdf_lower_ = norm_cdf(alpha);
    if (!(mass_ > kTinyMass)) {
        throw NumericError("truncated normal carries no mass on (0,1)");
    }
}

double TruncatedNormal::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double alpha = (0.0 - location_) / scale_;
    const double z = (x - location_) / scale_;
    return norm_interval_prob(alpha, z) / mass_;
}

double TruncatedNormal::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile requires p in [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    const double x = location_ + scale_ * norm_quantile(cdf_lower_ + p * mass_);
    return std::clamp(x, 0.0, 1.0);
}

double TruncatedNormal::interval_prob(double a, double b) const {
    const double lo = std::max(a, 0.0);
    const double hi = std::min(b, 1.0);
    if (!(lo < hi)) return 0.0;
    const double alpha = (lo - location_) / scale_;
    const double beta = (hi - location_) / scale_;
    return norm_interval_prob(alpha, beta) / mass_;
}

double TruncatedNormal::interval_mean(double a, double b) const {
    if (!(a < b)) throw ValidationError("interval_mean requires a < b");
    const double lo = std::max(a, 0.0);
    const double hi = std::min(b, 1.0);
    const double alpha = (lo - location_) / scale_;
    const double beta = (hi - location_) / scale_;
    const double z = norm_interval_prob(alpha, beta);
    if (!(z > kTinyMass)) throw NumericError("vanishing interval mass");
    return location_ + scale_ * (norm_pdf(alpha) - norm_pdf(beta)) / z;
}

TruncatedNormal solve_location(double target_mean, double scale) {
    if (!(target_mean > 0.0 && target_mean < 1.0)) {
        throw ValidationError("target mean must be in (0,1)");
    }
    if (!(scale > 0.0)) throw ValidationError("scale must be > 0");

    const auto mean_at = [&](double m) { return TruncatedNormal(m, scale).mean(); };

    // The truncated mean is strictly increasing in m; expand a bracket from
    // the target outward (staying in territory where the (0,1) mass does not
    // underflow) instead of evaluating at the extremes.
    double lo = target_mean - scale;
    double hi = target_mean + scale;
    constexpr double kLimit = 10.0;
    while (mean_at(lo) > target_mean) {
        lo -= scale;
        if (lo < -kLimit) throw NumericError("target unreachable: bracket endpoints do not straddle");
    }
    while (mean_at(hi) < target_mean) {
        hi += scale;
        if (hi > kLimit) throw NumericError("target unreachable: bracket endpoints do not straddle");
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mean_at(mid) < target_mean) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return TruncatedNormal(0.5 * (lo + hi), scale);
}

}  // namespace cmhrr
