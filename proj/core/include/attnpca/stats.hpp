#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace attnpca {

enum class Alternative {
    two_sided,
    greater, // a tends to exceed b
    less,
};

std::string_view to_string(Alternative alt);

struct PairedTestResult {
    double statistic = 0.0; // W+: rank sum of positive differences a - b
    double p_value = 1.0;
    std::size_t pairs_used = 0; // non-zero differences
    bool exact = true;
};

/// Differences with |d| below this are treated as zero; ranks within it as tied.
inline constexpr double kWilcoxonZeroTolerance = 1e-12;

/// Largest number of non-zero pairs for which the null distribution is enumerated
/// exactly; beyond it a tie-corrected normal approximation is used.
inline constexpr std::size_t kWilcoxonExactLimit = 400;

/// Wilcoxon signed-rank test on paired samples (length >= 5). Zero differences
/// are dropped; tied |d| get average ranks. All-zero input gives W+ = 0, p = 1.
PairedTestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                      Alternative alternative = Alternative::two_sided);

struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0; // sample standard deviation, 0 for a single value
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

/// Quantile with linear interpolation between order statistics: h = (n-1) p.
double quantile(std::span<const double> sorted_values, double p);

SummaryStats summarize_values(std::span<const double> values);

} // namespace attnpca
