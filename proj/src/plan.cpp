#include "cmhrr/plan.hpp"

#include <algorithm>
#include <cmath>

#include "cmhrr/normal.hpp"

namespace cmhrr {

namespace {

void check_probability_vector(const std::vector<double>& v, const char* name) {
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (!(v[j] >= 0.0 && v[j] <= 1.0)) {
            throw ValidationError(std::string(name) + " out of [0,1] in stratum " +
                                  std::to_string(j + 1));
        }
    }
}

}  // namespace

std::string to_string(VarianceMethod m) {
    switch (m) {
        case VarianceMethod::exact: return "exact";
        case VarianceMethod::plug_in: return "plug_in";
        case VarianceMethod::modeled: return "modeled";
        case VarianceMethod::unadjusted: return "unadjusted";
    }
    return "unknown";
}

void StratumProfile::validate() const {
    if (phi.empty() || phi.size() != mu0.size() || phi.size() != mu1.size()) {
        throw ValidationError("profile vectors must be nonempty and equal length");
    }
    double phi_sum = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        if (!(phi[j] > 0.0)) {
            throw ValidationError("stratum propensity must be > 0 in stratum " +
                                  std::to_string(j + 1));
        }
        phi_sum += phi[j];
    }
    if (std::fabs(phi_sum - 1.0) > 1e-12) {
        throw ValidationError("stratum propensities must sum to 1");
    }
    check_probability_vector(mu0, "control probability");
    check_probability_vector(mu1, "treatment probability");
    if (!(pi1 > 0.0 && pi1 < 1.0)) throw ValidationError("pi1 must be in (0,1)");
    if (!(psi > 0.0)) throw ValidationError("psi must be > 0");
}

double VarianceEstimate::per_trial(long n) const {
    if (n < 2) throw ValidationError("per-trial variance requires n >= 2");
    return sigma2_inf / static_cast<double>(n - 1);
}

void PowerSpec::validate() const {
    if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
    if (n < 2) throw ValidationError("n must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
}

VarianceEstimate asymptotic_variance(const StratumProfile& profile) {
    profile.validate();
    const double pi0 = 1.0 - profile.pi1;
    double numerator = 0.0;
    double mu0_marginal = 0.0;
    for (std::size_t j = 0; j < profile.phi.size(); ++j) {
        const double mu0 = profile.mu0[j];
        const double mu1 = profile.mu1[j];
        if (!(mu0 > 0.0)) {
            throw NumericError("zero control probability in stratum " + std::to_string(j + 1) +
                               ": stratum risk ratio undefined");
        }
        const double psi_j = mu1 / mu0;
        numerator += profile.phi[j] * psi_j * (pi0 * mu0 + profile.pi1 * mu1 - mu0 * mu1);
        mu0_marginal += profile.phi[j] * mu0;
    }
    const double denominator =
        profile.psi * profile.psi * profile.pi1 * pi0 * mu0_marginal * mu0_marginal;
    if (!(denominator > 0.0)) throw NumericError("zero marginal control probability");
    return {numerator / denominator, VarianceMethod::exact};
}

VarianceEstimate plug_in_variance(const HistoricalSummary& summary, const DesignParams& design) {
    design.validate();
    const double pi0 = design.pi0();
    double numerator = 0.0;
    double mu0_marginal = 0.0;
    for (std::size_t j = 0; j < summary.phi_hat.size(); ++j) {
        const double mu0 = summary.mu0j_hat[j];
        if (!(mu0 > 0.0)) {
            throw NumericError("zero control probability in stratum " + std::to_string(j + 1) +
                               ": coarsen the strata");
        }
        const double mu1 = design.psi * mu0;
        if (mu1 > 1.0) {
            throw NumericError("implied treatment probability exceeds 1 in stratum " +
                               std::to_string(j + 1));
        }
        numerator += summary.phi_hat[j] * (pi0 * mu0 + design.pi1 * mu1 - mu0 * mu1);
        mu0_marginal += summary.phi_hat[j] * mu0;
    }
    const double denominator = design.psi * pi0 * design.pi1 * mu0_marginal * mu0_marginal;
    if (!(denominator > 0.0)) throw NumericError("zero marginal control probability");
    return {numerator / denominator, VarianceMethod::plug_in};
}

ModeledProbabilities modeled_probabilities(const HistoricalSummary& summary, double arm_mean,
                                           double r_xy) {
    const int J = summary.strata_count;
    if (J < 2) throw ValidationError("modeled probabilities require at least 2 strata");
    if (!(arm_mean > 0.0 && arm_mean < 1.0)) {
        throw ValidationError("arm mean must be in (0,1)");
    }
    if (!(r_xy >= -1.0 && r_xy <= 1.0)) throw ValidationError("correlation must be in [-1,1]");

    ModeledProbabilities m;
    m.x_bar = 0.5 * static_cast<double>(J + 1);  // (1/J) sum_{j=1..J} j
    double sx2 = 0.0;
    for (int j = 1; j <= J; ++j) {
        const double d = static_cast<double>(j) - m.x_bar;
        sx2 += summary.phi_hat[static_cast<std::size_t>(j - 1)] * d * d;
    }
    m.sigma_x = std::sqrt(sx2);
    m.sigma_y = std::sqrt(arm_mean * (1.0 - arm_mean));
    if (!(m.sigma_x > 0.0)) throw NumericError("zero stratum-index variance");
    m.beta1 = r_xy * m.sigma_y / m.sigma_x;
    m.beta0 = arm_mean - m.beta1 * m.x_bar;
    m.mu_tilde.resize(static_cast<std::size_t>(J));
    double sum = 0.0;
    for (int j = 1; j <= J; ++j) {
        const double v = m.beta0 + m.beta1 * static_cast<double>(j);
        if (!(v > 0.0 && v < 1.0)) {
            throw NumericError("modeled probability out of (0,1) in stratum " +
                               std::to_string(j) + ": reduce J, the correlation, or the mean");
        }
        m.mu_tilde[static_cast<std::size_t>(j - 1)] = v;
        sum += v;
    }
    m.mu_tilde_marginal = sum / static_cast<double>(J);
    return m;
}

VarianceEstimate modeled_variance(const HistoricalSummary& summary, const DesignParams& design) {
    design.validate();
    const double r0 = summary.r_xy;
    const double r1 = design.r1.equal_to_control ? r0 : design.r1.value;
    const double mu1_hat = design.psi * summary.mu0_hat;
    if (!(mu1_hat > 0.0 && mu1_hat < 1.0)) {
        throw NumericError("implied treatment-arm mean outside (0,1)");
    }

    ModeledProbabilities control, treated;
    try {
        control = modeled_probabilities(summary, summary.mu0_hat, r0);
    } catch (const NumericError& e) {
        throw NumericError(std::string("control arm: ") + e.what());
    }
    try {
        treated = modeled_probabilities(summary, mu1_hat, r1);
    } catch (const NumericError& e) {
        throw NumericError(std::string("treatment arm: ") + e.what());
    }

    const double pi0 = design.pi0();
    double numerator = 0.0;
    double mu0_marginal = 0.0;
    for (std::size_t j = 0; j < summary.phi_hat.size(); ++j) {
        const double mu0 = control.mu_tilde[j];
        const double mu1 = treated.mu_tilde[j];
        numerator += summary.phi_hat[j] * (pi0 * mu0 + design.pi1 * mu1 - mu0 * mu1);
        mu0_marginal += summary.phi_hat[j] * mu0;
    }
    const double denominator = design.psi * pi0 * design.pi1 * mu0_marginal * mu0_marginal;
    if (!(denominator > 0.0)) throw NumericError("zero marginal control probability");
    return {numerator / denominator, VarianceMethod::modeled};
}

VarianceEstimate unadjusted_variance(double mu0, const DesignParams& design) {
    design.validate();
    if (!(mu0 > 0.0 && mu0 < 1.0)) throw ValidationError("mu0 must be in (0,1)");
    const double mu1 = design.psi * mu0;
    if (mu1 > 1.0) throw NumericError("implied treatment probability exceeds 1");
    const double pi0 = design.pi0();
    const double numerator = pi0 * mu0 + design.pi1 * mu1 - mu0 * mu1;
    const double denominator = design.psi * pi0 * design.pi1 * mu0 * mu0;
    return {numerator / denominator, VarianceMethod::unadjusted};
}

double variance_reduction(const VarianceEstimate& adjusted, const VarianceEstimate& unadjusted) {
    if (!(unadjusted.sigma2_inf > 0.0)) {
        throw ValidationError("unadjusted variance must be > 0");
    }
    return 1.0 - adjusted.sigma2_inf / unadjusted.sigma2_inf;
}

double power_at_n(const PowerSpec& spec) {
    spec.validate();
    const double za = norm_quantile(spec.alpha / 2.0);
    const double shift = std::sqrt(static_cast<double>(spec.n)) * spec.tau / spec.sigma;
    return norm_cdf(za + shift) + norm_cdf(za - shift);
}

long required_sample_size(const DesignParams& design, const VarianceEstimate& variance) {
    design.validate();
    if (design.psi == 1.0) {
        throw NumericError("null design has no finite sample size");
    }
    if (!(variance.sigma2_inf > 0.0)) throw ValidationError("variance must be > 0");

    const double tau = std::log(design.psi);
    const double sigma = std::sqrt(variance.sigma2_inf);
    PowerSpec spec{tau, sigma, design.alpha, 2};

    const auto power = [&](long n) {
        spec.n = n;
        return power_at_n(spec);
    };

    // Normal-approximation seed, then scan to the exact threshold crossing.
    const double z_alpha = norm_quantile(1.0 - design.alpha / 2.0);
    const double z_power = norm_quantile(design.target_power);
    const double seed = variance.sigma2_inf * (z_alpha + z_power) * (z_alpha + z_power) /
                        (tau * tau);
    long n = std::max<long>(2, static_cast<long>(std::floor(seed)) - 2);
    while (power(n) < design.target_power) ++n;
    while (n > 2 && power(n - 1) >= design.target_power) --n;
    return n;
}

}  // namespace cmhrr
