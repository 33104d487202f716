#pragma once

#include "cmhrr/errors.hpp"

namespace cmhrr {

// Normal(location, scale^2) truncated to (0,1).
class TruncatedNormal {
public:
    TruncatedNormal(double location, double scale);

    double location() const { return location_; }
    double scale() const { return scale_; }

    double cdf(double x) const;
    double quantile(double p) const;
    double mean() const { return interval_mean(0.0, 1.0); }

    // E[X | a < X < b]; throws NumericError("vanishing interval mass") when
    // the interval carries no mass.
    double interval_mean(double a, double b) const;

    // P(a < X < b)
    double interval_prob(double a, double b) const;

private:
    double location_;
    double scale_;
    double mass_;       // normalising constant over (0,1)
    double cdf_lower_;  // underlying-normal CDF at 0
};

// Location m such that the (0,1)-truncated mean equals target, by bisection
// (the truncated mean is strictly increasing in m).
TruncatedNormal solve_location(double target_mean, double scale);

}  // namespace cmhrr
