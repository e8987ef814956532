#pragma once

#include <span>

namespace photomosaic {

struct MannWhitneyResult {
    /// U statistic of the first sample: rank sum of `a` minus n_a(n_a+1)/2,
    /// midranks on ties.
    double u = 0.0;
    /// Two-sided p-value.
    double p = 1.0;
    bool exact = false;
};

/// Two-sided Mann-Whitney U test. Uses the exact null distribution when the
/// data has no ties and min(n_a, n_b) <= 8; otherwise the normal
/// approximation with tie-corrected variance and continuity correction.
/// Throws MosaicError on an empty sample.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Exact path only; requires tie-free data.
MannWhitneyResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b);

/// Normal-approximation path only.
MannWhitneyResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
double sample_stddev(std::span<const double> xs);
double median(std::span<const double> xs);

} // namespace photomosaic
