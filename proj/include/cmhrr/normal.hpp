#pragma once

namespace cmhrr {

// Standard normal density, CDF, upper tail and quantile. The quantile is a
// rational approximation polished with Halley steps against norm_cdf, giving
// absolute accuracy well below 1e-12 across (0,1).
double norm_pdf(double x);
double norm_cdf(double x);
double norm_sf(double x);
double norm_quantile(double p);

// P(alpha < Z < beta) evaluated tail-stably for same-signed bounds.
double norm_interval_prob(double alpha, double beta);

}  // namespace cmhrr
