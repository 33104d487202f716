#include "cmhrr/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cmhrr {

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");
    if (x.size() < 2) throw ValidationError("spearman: need at least two observations");

    const auto rx = midranks(x);
    const auto ry = midranks(y);
    const double n = static_cast<double>(x.size());

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw NumericError("zero variance in x ranks");
    if (syy == 0.0) throw NumericError("zero variance in y ranks");
    return sxy / std::sqrt(sxx * syy);
}

StrataSpec quantile_cutpoints(std::span<const PrognosticScore> scores, int strata_count) {
    if (strata_count < 1) throw ValidationError("strata count must be >= 1");
    if (scores.empty()) throw ValidationError("no scores to derive cutpoints from");

    std::vector<double> sorted;
    sorted.reserve(scores.size());
    for (const auto& s : scores) sorted.push_back(s.value());
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    std::vector<double> cut;
    cut.reserve(static_cast<std::size_t>(strata_count) + 1);
    cut.push_back(0.0);
    for (int k = 1; k < strata_count; ++k) {
        // type-7: linear interpolation of order statistics at h = (n-1)p
        const double h = static_cast<double>(n - 1) * (static_cast<double>(k) / strata_count);
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, n - 1);
        cut.push_back(sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]));
    }
    cut.push_back(1.0);

    for (std::size_t i = 0; i + 1 < cut.size(); ++i) {
        if (!(cut[i] < cut[i + 1])) {
            throw NumericError("degenerate quantiles: score distribution too discrete for " +
                               std::to_string(strata_count) + " strata");
        }
    }
    return StrataSpec(std::move(cut));
}

int assign_stratum(PrognosticScore score, const StrataSpec& spec) {
    const double m = score.value();
    const auto& v = spec.cutpoints();
    if (m < v.front() || m > v.back()) {
        throw ValidationError("score out of range [" + std::to_string(v.front()) + "," +
                              std::to_string(v.back()) + "]: " + std::to_string(m));
    }
    // upper_bound over the interior cutpoints: v_j <= m puts m in stratum j+1
    const auto it = std::upper_bound(v.begin() + 1, v.end() - 1, m);
    return static_cast<int>(it - v.begin());
}

HistoricalSummary summarize_historical(std::span<const HistoricalRecord> records,
                                       const StrataSpec& spec) {
    if (records.empty()) throw ValidationError("no historical records");
    const int J = spec.strata_count();

    std::vector<long> count(J, 0), events(J, 0);
    std::vector<double> score_sum(J, 0.0);
    std::vector<double> x(records.size()), y(records.size());
    long total_events = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const int j = assign_stratum(records[i].score, spec);
        count[j - 1] += 1;
        events[j - 1] += records[i].outcome;
        score_sum[j - 1] += records[i].score.value();
        total_events += records[i].outcome;
        x[i] = static_cast<double>(j);
        y[i] = static_cast<double>(records[i].outcome);
    }
    for (int j = 0; j < J; ++j) {
        if (count[j] == 0) {
            throw NumericError("empty stratum " + std::to_string(j + 1) +
                               ": no historical records fall in it");
        }
    }

    HistoricalSummary s;
    s.strata_count = J;
    s.n_historical = static_cast<long>(records.size());
    const double n = static_cast<double>(records.size());
    s.phi_hat.resize(J);
    s.mu0j_hat.resize(J);
    s.mean_score.resize(J);
    for (int j = 0; j < J; ++j) {
        s.phi_hat[j] = static_cast<double>(count[j]) / n;
        s.mu0j_hat[j] = static_cast<double>(events[j]) / static_cast<double>(count[j]);
        s.mean_score[j] = score_sum[j] / static_cast<double>(count[j]);
    }
    s.mu0_hat = static_cast<double>(total_events) / n;
    s.r_xy = spearman(x, y);
    return s;
}

}  // namespace cmhrr
