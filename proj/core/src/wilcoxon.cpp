#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "attnpca/error.hpp"
#include "attnpca/stats.hpp"

namespace attnpca {

std::string_view to_string(Alternative alt) {
    switch (alt) {
    case Alternative::two_sided: return "two_sided";
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
    }
    return "unknown";
}

namespace {

struct RankedDifferences {
    std::vector<long long> doubled_ranks; // 2 * average rank, always integral
    std::vector<bool> positive;
    std::vector<std::size_t> tie_sizes;
};

RankedDifferences rank_differences(std::span<const double> a, std::span<const double> b) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        if (!std::isfinite(diff)) throw DataError("paired test input contains non-finite values");
        if (std::abs(diff) > kWilcoxonZeroTolerance) d.push_back(diff);
    }
    std::sort(d.begin(), d.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });

    RankedDifferences out;
    out.doubled_ranks.resize(d.size());
    out.positive.resize(d.size());
    std::size_t i = 0;
    while (i < d.size()) {
        std::size_t j = i + 1;
        while (j < d.size() && std::abs(d[j]) - std::abs(d[i]) <= kWilcoxonZeroTolerance) ++j;
        // Ranks i+1 .. j share the average (i+1+j)/2; doubled that is i+1+j.
        for (std::size_t t = i; t < j; ++t) {
            out.doubled_ranks[t] = static_cast<long long>(i + 1 + j);
            out.positive[t] = d[t] > 0.0;
        }
        out.tie_sizes.push_back(j - i);
        i = j;
    }
    return out;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

} // namespace

PairedTestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                      Alternative alternative) {
    if (a.size() != b.size()) throw UsageError("paired samples must have equal length");
    if (a.size() < 5) throw UsageError("paired test needs at least 5 pairs");

    const RankedDifferences r = rank_differences(a, b);
    PairedTestResult result;
    result.pairs_used = r.doubled_ranks.size();
    if (r.doubled_ranks.empty()) return result;

    long long w2 = 0; // doubled W+
    for (std::size_t i = 0; i < r.doubled_ranks.size(); ++i)
        if (r.positive[i]) w2 += r.doubled_ranks[i];
    result.statistic = static_cast<double>(w2) / 2.0;

    double p_upper = 1.0; // P(W+ >= observed)
    double p_lower = 1.0; // P(W+ <= observed)
    if (r.doubled_ranks.size() <= kWilcoxonExactLimit) {
        // Under H0 every sign is +/- with probability 1/2 independently.
        const long long total = std::accumulate(r.doubled_ranks.begin(), r.doubled_ranks.end(), 0LL);
        std::vector<double> prob(static_cast<std::size_t>(total) + 1, 0.0);
        prob[0] = 1.0;
        long long reach = 0;
        for (long long rank : r.doubled_ranks) {
            reach += rank;
            for (long long s = reach; s >= 0; --s) {
                const double keep = prob[static_cast<std::size_t>(s)];
                const double add = s >= rank ? prob[static_cast<std::size_t>(s - rank)] : 0.0;
                prob[static_cast<std::size_t>(s)] = 0.5 * keep + 0.5 * add;
            }
        }
        double upper = 0.0, lower = 0.0;
        for (long long s = 0; s <= total; ++s) {
            if (s >= w2) upper += prob[static_cast<std::size_t>(s)];
            if (s <= w2) lower += prob[static_cast<std::size_t>(s)];
        }
        p_upper = std::min(1.0, upper);
        p_lower = std::min(1.0, lower);
    } else {
        result.exact = false;
        const auto n = static_cast<double>(r.doubled_ranks.size());
        const double mean = n * (n + 1.0) / 4.0;
        double tie_term = 0.0;
        for (auto t : r.tie_sizes) {
            const auto tt = static_cast<double>(t);
            tie_term += tt * tt * tt - tt;
        }
        const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
        const double sd = std::sqrt(var);
        const double w = result.statistic;
        p_upper = normal_sf((w - mean - 0.5) / sd);
        p_lower = normal_sf((mean - w - 0.5) / sd);
    }

    switch (alternative) {
    case Alternative::greater: result.p_value = p_upper; break;
    case Alternative::less: result.p_value = p_lower; break;
    case Alternative::two_sided: result.p_value = std::min(1.0, 2.0 * std::min(p_upper, p_lower)); break;
    }
    return result;
}

double quantile(std::span<const double> sorted_values, double p) {
    if (sorted_values.empty()) throw UsageError("quantile of an empty sample");
    if (p < 0.0 || p > 1.0) throw UsageError("quantile level must lie in [0, 1]");
    const double h = static_cast<double>(sorted_values.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted_values.size()) return sorted_values.back();
    return sorted_values[lo] + (h - static_cast<double>(lo)) * (sorted_values[lo + 1] - sorted_values[lo]);
}

SummaryStats summarize_values(std::span<const double> values) {
    if (values.empty()) throw UsageError("cannot summarize an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    SummaryStats s;
    s.count = sorted.size();
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile(sorted, 0.25);
    s.median = quantile(sorted, 0.5);
    s.q3 = quantile(sorted, 0.75);
    return s;
}

} // namespace attnpca
