#include "cmhrr/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "cmhrr/estimate.hpp"
#include "cmhrr/normal.hpp"

namespace cmhrr {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string to_string(RiskRatioMode m) {
    switch (m) {
        case RiskRatioMode::common_rr: return "common_rr";
        case RiskRatioMode::common_rr_capped: return "common_rr_capped";
        case RiskRatioMode::rederived: return "rederived";
    }
    return "unknown";
}

RiskRatioMode risk_ratio_mode_from_string(const std::string& s) {
    if (s == "common_rr") return RiskRatioMode::common_rr;
    if (s == "common_rr_capped") return RiskRatioMode::common_rr_capped;
    if (s == "rederived") return RiskRatioMode::rederived;
    throw ConfigError("unknown rr_mode '" + s +
                      "' (expected common_rr, common_rr_capped or rederived)");
}

double PopulationSpec::mu0_marginal() const {
    double acc = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) acc += phi[j] * mu0[j];
    return acc;
}

double PopulationSpec::mu1_marginal() const {
    double acc = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) acc += phi[j] * mu1[j];
    return acc;
}

PopulationSpec build_population(double mu0, double scale, double psi, double pi1,
                                int strata_count, RiskRatioMode mode) {
    if (strata_count < 1) throw ValidationError("strata count must be >= 1");
    if (!(psi > 0.0)) throw ValidationError("psi must be > 0");
    if (!(pi1 > 0.0 && pi1 < 1.0)) throw ValidationError("pi1 must be in (0,1)");

    const TruncatedNormal law = solve_location(mu0, scale);
    const int J = strata_count;
    PopulationSpec pop{law, {}, {}, {}, {}, psi, pi1, 0};
    pop.cutpoints.resize(static_cast<std::size_t>(J) + 1);
    pop.cutpoints.front() = 0.0;
    pop.cutpoints.back() = 1.0;
    for (int k = 1; k < J; ++k) {
        pop.cutpoints[static_cast<std::size_t>(k)] =
            law.quantile(static_cast<double>(k) / static_cast<double>(J));
    }
    pop.phi.assign(static_cast<std::size_t>(J), 1.0 / static_cast<double>(J));
    pop.mu0.resize(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) {
        pop.mu0[static_cast<std::size_t>(j)] =
            law.interval_mean(pop.cutpoints[static_cast<std::size_t>(j)],
                              pop.cutpoints[static_cast<std::size_t>(j) + 1]);
    }

    pop.mu1.resize(static_cast<std::size_t>(J));
    switch (mode) {
        case RiskRatioMode::common_rr:
            for (int j = 0; j < J; ++j) {
                const double v = psi * pop.mu0[static_cast<std::size_t>(j)];
                if (v >= 1.0) {
                    throw NumericError("stratum probability >= 1 in stratum " +
                                       std::to_string(j + 1) +
                                       " (psi * mu0_j = " + std::to_string(v) + ")");
                }
                pop.mu1[static_cast<std::size_t>(j)] = v;
            }
            break;
        case RiskRatioMode::common_rr_capped:
            for (int j = 0; j < J; ++j) {
                const double v = psi * pop.mu0[static_cast<std::size_t>(j)];
                if (v > 1.0) ++pop.capped_strata;
                pop.mu1[static_cast<std::size_t>(j)] = std::min(v, 1.0);
            }
            break;
        case RiskRatioMode::rederived: {
            const double mu1_target = psi * mu0;
            if (!(mu1_target < 1.0)) {
                throw NumericError("stratum probability >= 1: target treatment mean " +
                                   std::to_string(mu1_target));
            }
            const PopulationSpec treated =
                build_population(mu1_target, scale, 1.0, pi1, J, RiskRatioMode::common_rr);
            pop.mu1 = treated.mu0;
            break;
        }
    }
    return pop;
}

std::vector<TrialRecord> generate_dataset(const PopulationSpec& pop, long n,
                                          double arm_probability, std::uint64_t seed) {
    if (n < 1) throw ValidationError("dataset size must be >= 1");
    const int J = pop.strata_count();
    std::vector<double> cum(static_cast<std::size_t>(J));
    double acc = 0.0;
    for (int j = 0; j < J; ++j) {
        acc += pop.phi[static_cast<std::size_t>(j)];
        cum[static_cast<std::size_t>(j)] = acc;
    }
    std::vector<double> cdf_lo(static_cast<std::size_t>(J)), cdf_hi(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) {
        cdf_lo[static_cast<std::size_t>(j)] =
            pop.score_law.cdf(pop.cutpoints[static_cast<std::size_t>(j)]);
        cdf_hi[static_cast<std::size_t>(j)] =
            pop.score_law.cdf(pop.cutpoints[static_cast<std::size_t>(j) + 1]);
    }

    Xoshiro256PlusPlus rng(seed);
    std::vector<TrialRecord> records;
    records.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        // Fixed draw order per subject: stratum, score, Y(0), Y(1), arm.
        const double u_stratum = rng.uniform();
        int j = 0;
        while (j + 1 < J && u_stratum >= cum[static_cast<std::size_t>(j)]) ++j;
        const double u_score = rng.uniform();
        const double p = cdf_lo[static_cast<std::size_t>(j)] +
                         u_score * (cdf_hi[static_cast<std::size_t>(j)] -
                                    cdf_lo[static_cast<std::size_t>(j)]);
        double score = pop.score_law.quantile(p);
        // keep the score strictly inside the stratum interval so assignment
        // from the score recovers the generating stratum
        const double lo = pop.cutpoints[static_cast<std::size_t>(j)];
        const double hi = (j + 1 == J)
                              ? 1.0
                              : std::nextafter(pop.cutpoints[static_cast<std::size_t>(j) + 1],
                                               -std::numeric_limits<double>::infinity());
        score = std::clamp(score, lo, hi);
        const int y0 = rng.bernoulli(pop.mu0[static_cast<std::size_t>(j)]) ? 1 : 0;
        const int y1 = rng.bernoulli(pop.mu1[static_cast<std::size_t>(j)]) ? 1 : 0;
        const int arm = rng.bernoulli(arm_probability) ? 1 : 0;
        records.emplace_back("s" + std::to_string(i + 1), score, arm,
                             std::optional<int>(arm == 1 ? y1 : y0));
    }
    return records;
}

void ScenarioConfig::validate() const {
    if (name.empty()) throw ConfigError("scenario needs a name");
    if (strata_count < 1) throw ConfigError("strata count must be >= 1");
    if (psi_values.empty()) throw ConfigError("scenario needs at least one psi value");
    for (double p : psi_values) {
        if (!(p > 0.0)) throw ConfigError("psi values must be > 0");
    }
    if (n_hist < 1 || n_trial < 1) throw ConfigError("sample sizes must be >= 1");
    if (n_reps < 1) throw ConfigError("replicate count must be >= 1");
    if (!(mu0_hist > 0.0 && mu0_hist < 1.0) || !(mu0_trial > 0.0 && mu0_trial < 1.0)) {
        throw ConfigError("marginal probabilities must be in (0,1)");
    }
    if (!(sd_hist > 0.0 && sd_trial > 0.0)) throw ConfigError("scales must be > 0");
    if (!(pi1 > 0.0 && pi1 < 1.0)) throw ConfigError("pi1 must be in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");
}

SeriesMetrics metrics(const EstimateSeries& series, double truth_log_rr, double alpha) {
    const std::size_t n = series.log_rr.size();
    if (n < 2) throw NumericError("insufficient replicates: need at least 2");
    if (series.se_log.size() != n || series.p_value.size() != n) {
        throw ValidationError("replicate series length mismatch");
    }
    const double z = norm_quantile(1.0 - alpha / 2.0);
    SeriesMetrics m;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = series.log_rr[i] - truth_log_rr;
        m.mse += d * d;
        if (series.p_value[i] < alpha) m.rejection_rate += 1.0;
        if (std::fabs(d) <= z * series.se_log[i]) m.coverage += 1.0;
        mean += series.log_rr[i];
    }
    const double dn = static_cast<double>(n);
    m.mse /= dn;
    m.rejection_rate /= dn;
    m.coverage /= dn;
    mean /= dn;
    double ss = 0.0;
    for (double v : series.log_rr) ss += (v - mean) * (v - mean);
    m.empirical_variance = ss / (dn - 1.0);
    return m;
}

double estimator_bias(std::span<const double> prospective_per_trial,
                      double empirical_variance) {
    if (prospective_per_trial.empty()) throw NumericError("insufficient replicates");
    double mean = 0.0;
    for (double v : prospective_per_trial) mean += v;
    mean /= static_cast<double>(prospective_per_trial.size());
    return mean - empirical_variance;
}

namespace {

struct ReplicateRow {
    bool ok = false;
    double cmh_log = 0.0, cmh_se = 0.0, cmh_p = 1.0;
    double un_log = 0.0, un_se = 0.0, un_p = 1.0;
    double plug_pt = kNaN, mod_pt = kNaN, un_pt = kNaN;  // per-trial prospective
    double gamma_plug = kNaN, gamma_mod = kNaN;
    double r2_hist = kNaN, r2_ctl = kNaN, r2_trt = kNaN;
};

// Eq. 4 evaluated with the treatment probabilities capped at 1, mirroring a
// capped generator. Identical to the strict plug-in when no cap binds.
double plugin_sigma2_capped(const HistoricalSummary& summary, const DesignParams& design) {
    const double pi0 = design.pi0();
    double numerator = 0.0;
    double mu0_marginal = 0.0;
    for (std::size_t j = 0; j < summary.phi_hat.size(); ++j) {
        const double mu0 = summary.mu0j_hat[j];
        if (!(mu0 > 0.0)) {
            throw NumericError("zero control probability in stratum " + std::to_string(j + 1));
        }
        const double mu1 = std::min(design.psi * mu0, 1.0);
        numerator += summary.phi_hat[j] * (pi0 * mu0 + design.pi1 * mu1 - mu0 * mu1);
        mu0_marginal += summary.phi_hat[j] * mu0;
    }
    return numerator / (design.psi * pi0 * design.pi1 * mu0_marginal * mu0_marginal);
}

double arm_spearman_r2(const std::vector<int>& strata, const std::vector<int>& outcomes) {
    try {
        std::vector<double> x(strata.begin(), strata.end());
        std::vector<double> y(outcomes.begin(), outcomes.end());
        const double r = spearman(x, y);
        return r * r;
    } catch (const std::exception&) {
        return kNaN;
    }
}

double nan_mean(const std::vector<double>& v) {
    double acc = 0.0;
    long n = 0;
    for (double x : v) {
        if (!std::isnan(x)) {
            acc += x;
            ++n;
        }
    }
    return n > 0 ? acc / static_cast<double>(n) : kNaN;
}

ReplicateRow run_replicate(const ScenarioConfig& config, const PopulationSpec& hist_pop,
                           const PopulationSpec& trial_pop, double psi,
                           std::uint64_t replicate_id) {
    ReplicateRow row;
    const DesignParams design{psi, config.pi1, config.alpha, 0.8, TreatmentCorrelation::equal()};

    // two disjoint streams per replicate: historical and trial
    const auto hist_records_raw = generate_dataset(
        hist_pop, config.n_hist, 0.0,
        SplitMix64::mix(config.base_seed + 2 * replicate_id * SplitMix64::kGolden));
    std::vector<HistoricalRecord> hist;
    hist.reserve(hist_records_raw.size());
    std::vector<PrognosticScore> hist_scores;
    hist_scores.reserve(hist_records_raw.size());
    for (const auto& r : hist_records_raw) {
        hist.emplace_back(r.subject_id, r.score.value(), *r.outcome);
        hist_scores.push_back(r.score);
    }

    const StrataSpec spec = quantile_cutpoints(hist_scores, config.strata_count);
    const HistoricalSummary summary = summarize_historical(hist, spec);
    row.r2_hist = summary.r_xy * summary.r_xy;

    const double n1 = static_cast<double>(config.n_trial - 1);
    const double plug_sigma2 = config.rr_mode == RiskRatioMode::common_rr_capped
                                   ? plugin_sigma2_capped(summary, design)
                                   : plug_in_variance(summary, design).sigma2_inf;
    const double mod_sigma2 = modeled_variance(summary, design).sigma2_inf;
    const double un_sigma2 = unadjusted_variance(summary.mu0_hat, design).sigma2_inf;
    row.plug_pt = plug_sigma2 / n1;
    row.mod_pt = mod_sigma2 / n1;
    row.un_pt = un_sigma2 / n1;
    row.gamma_plug = 1.0 - plug_sigma2 / un_sigma2;
    row.gamma_mod = 1.0 - mod_sigma2 / un_sigma2;

    const auto trial = generate_dataset(
        trial_pop, config.n_trial, config.pi1,
        SplitMix64::mix(config.base_seed + (2 * replicate_id + 1) * SplitMix64::kGolden));

    const AnalysisResult cmh = analyze_trial(trial, spec, config.alpha);
    const AnalysisResult unadj = analyze_trial(trial, StrataSpec::single_stratum(), config.alpha);
    row.cmh_log = cmh.log_rr;
    row.cmh_se = cmh.se_log_rr;
    row.cmh_p = cmh.p_value;
    row.un_log = unadj.log_rr;
    row.un_se = unadj.se_log_rr;
    row.un_p = unadj.p_value;

    std::vector<int> strata_ctl, strata_trt, y_ctl, y_trt;
    for (const auto& r : trial) {
        const int j = assign_stratum(r.score, spec);
        if (r.arm == 1) {
            strata_trt.push_back(j);
            y_trt.push_back(*r.outcome);
        } else {
            strata_ctl.push_back(j);
            y_ctl.push_back(*r.outcome);
        }
    }
    row.r2_ctl = arm_spearman_r2(strata_ctl, y_ctl);
    row.r2_trt = arm_spearman_r2(strata_trt, y_trt);
    row.ok = true;
    return row;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, int threads) {
    config.validate();
    if (threads < 1) threads = 1;

    ScenarioResult result;
    result.name = config.name;

    const PopulationSpec hist_pop = build_population(config.mu0_hist, config.sd_hist, 1.0,
                                                     config.pi1, config.strata_count,
                                                     RiskRatioMode::common_rr);

    for (std::size_t k = 0; k < config.psi_values.size(); ++k) {
        const double psi = config.psi_values[k];
        const PopulationSpec trial_pop = build_population(
            config.mu0_trial, config.sd_trial, psi, config.pi1, config.strata_count,
            config.rr_mode);

        std::vector<ReplicateRow> rows(static_cast<std::size_t>(config.n_reps));
        std::atomic<int> next{0};
        const auto worker = [&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= config.n_reps) break;
                const std::uint64_t replicate_id =
                    static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(config.n_reps) +
                    static_cast<std::uint64_t>(i);
                try {
                    rows[static_cast<std::size_t>(i)] =
                        run_replicate(config, hist_pop, trial_pop, psi, replicate_id);
                } catch (const std::exception&) {
                    rows[static_cast<std::size_t>(i)].ok = false;
                }
            }
        };
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(threads));
            for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        PsiResult pr;
        pr.psi = psi;
        pr.psi_realized = trial_pop.mu1_marginal() / trial_pop.mu0_marginal();
        pr.capped_strata = trial_pop.capped_strata;

        EstimateSeries cmh_series, un_series;
        std::vector<double> plug_pt, mod_pt, un_pt, gamma_plug, gamma_mod, r2h, r2c, r2t;
        for (const auto& row : rows) {
            if (!row.ok) {
                ++pr.n_failed;
                continue;
            }
            cmh_series.log_rr.push_back(row.cmh_log);
            cmh_series.se_log.push_back(row.cmh_se);
            cmh_series.p_value.push_back(row.cmh_p);
            un_series.log_rr.push_back(row.un_log);
            un_series.se_log.push_back(row.un_se);
            un_series.p_value.push_back(row.un_p);
            plug_pt.push_back(row.plug_pt);
            mod_pt.push_back(row.mod_pt);
            un_pt.push_back(row.un_pt);
            gamma_plug.push_back(row.gamma_plug);
            gamma_mod.push_back(row.gamma_mod);
            r2h.push_back(row.r2_hist);
            r2c.push_back(row.r2_ctl);
            r2t.push_back(row.r2_trt);
        }
        pr.n_reps_done = static_cast<long>(cmh_series.log_rr.size());
        pr.flagged = pr.n_failed * 100 > config.n_reps;

        const double truth = std::log(psi);
        pr.cmh.series = metrics(cmh_series, truth, config.alpha);
        pr.unadjusted.series = metrics(un_series, truth, config.alpha);

        pr.cmh.prospective_plugin_mean = nan_mean(plug_pt);
        pr.cmh.prospective_modeled_mean = nan_mean(mod_pt);
        pr.cmh.bias_plugin = pr.cmh.prospective_plugin_mean - pr.cmh.series.empirical_variance;
        pr.cmh.bias_modeled = pr.cmh.prospective_modeled_mean - pr.cmh.series.empirical_variance;
        // the unadjusted analysis has a single prospective estimator; it is
        // reported under both labels
        pr.unadjusted.prospective_plugin_mean = nan_mean(un_pt);
        pr.unadjusted.prospective_modeled_mean = pr.unadjusted.prospective_plugin_mean;
        pr.unadjusted.bias_plugin =
            pr.unadjusted.prospective_plugin_mean - pr.unadjusted.series.empirical_variance;
        pr.unadjusted.bias_modeled = pr.unadjusted.bias_plugin;

        pr.gamma_observed =
            1.0 - pr.cmh.series.empirical_variance / pr.unadjusted.series.empirical_variance;
        pr.gamma_plugin_mean = nan_mean(gamma_plug);
        pr.gamma_modeled_mean = nan_mean(gamma_mod);
        pr.gamma_bias_plugin = pr.gamma_plugin_mean - pr.gamma_observed;
        pr.gamma_bias_modeled = pr.gamma_modeled_mean - pr.gamma_observed;
        pr.r2_hist = nan_mean(r2h);
        pr.r2_trial_control = nan_mean(r2c);
        pr.r2_trial_treatment = nan_mean(r2t);
        pr.r2_trial_mean = 0.5 * (pr.r2_trial_control + pr.r2_trial_treatment);

        result.per_psi.push_back(std::move(pr));
    }
    return result;
}

}  // namespace cmhrr
