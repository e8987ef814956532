#include "photomosaic/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "photomosaic/error.hpp"

namespace photomosaic {

namespace {

struct RankSummary {
    double u_a;
    double tie_term; // sum over tie groups of t^3 - t
    bool has_ties;
};

RankSummary rank_samples(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) {
        throw MosaicError("Mann-Whitney U test needs two non-empty samples");
    }
    struct Entry {
        double value;
        bool from_a;
    };
    std::vector<Entry> all;
    all.reserve(a.size() + b.size());
    for (double v : a) {
        all.push_back({v, true});
    }
    for (double v : b) {
        all.push_back({v, false});
    }
    std::sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) { return x.value < y.value; });

    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    bool has_ties = false;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i + 1;
        while (j < all.size() && all[j].value == all[i].value) {
            ++j;
        }
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        const auto t = static_cast<double>(j - i);
        if (j - i > 1) {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        for (std::size_t k = i; k < j; ++k) {
            if (all[k].from_a) {
                rank_sum_a += midrank;
            }
        }
        i = j;
    }
    const auto na = static_cast<double>(a.size());
    return {rank_sum_a - na * (na + 1.0) / 2.0, tie_term, has_ties};
}

// Number of arrangements of `small` a's among `small + large` positions
// giving each U value 0..small*large. The largest element is either an a
// (adding `large_so_far` to U) or a b (adding nothing).
std::vector<double> u_distribution(std::size_t small, std::size_t large)
{
    const std::size_t max_u = small * large;
    std::vector<std::vector<double>> layer(small + 1, std::vector<double>(max_u + 1, 0.0));
    for (auto& row : layer) {
        row[0] = 1.0; // j = 0: no b's, U = 0.
    }
    for (std::size_t j = 1; j <= large; ++j) {
        for (std::size_t i = 1; i <= small; ++i) {
            for (std::size_t u = max_u + 1; u-- > j;) {
                layer[i][u] += layer[i - 1][u - j];
            }
        }
    }
    return layer[small];
}

constexpr std::size_t kExactMaxSmall = 8;
constexpr std::size_t kExactMaxCells = 100000;

} // namespace

MannWhitneyResult mann_whitney_u_exact(std::span<const double> a, std::span<const double> b)
{
    const RankSummary r = rank_samples(a, b);
    if (r.has_ties) {
        throw MosaicError("exact Mann-Whitney path requires tie-free samples");
    }
    // The null distribution of U is symmetric in the sample roles.
    const std::size_t small = std::min(a.size(), b.size());
    const std::size_t large = std::max(a.size(), b.size());
    const std::vector<double> counts = u_distribution(small, large);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto u = static_cast<std::size_t>(std::llround(r.u_a));
    double le = 0.0;
    double ge = 0.0;
    for (std::size_t v = 0; v < counts.size(); ++v) {
        if (v <= u) {
            le += counts[v];
        }
        if (v >= u) {
            ge += counts[v];
        }
    }
    const double p = std::min(1.0, 2.0 * std::min(le, ge) / total);
    return {r.u_a, p, true};
}

MannWhitneyResult mann_whitney_u_normal(std::span<const double> a, std::span<const double> b)
{
    const RankSummary r = rank_samples(a, b);
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    const double n = na + nb;
    const double mu = na * nb / 2.0;
    const double variance = na * nb / 12.0 * ((n + 1.0) - r.tie_term / (n * (n - 1.0)));
    if (!(variance > 0.0)) {
        return {r.u_a, 1.0, false};
    }
    const double z = (std::abs(r.u_a - mu) - 0.5) / std::sqrt(variance);
    if (z <= 0.0) {
        return {r.u_a, 1.0, false};
    }
    return {r.u_a, std::min(1.0, std::erfc(z / std::sqrt(2.0))), false};
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b)
{
    const RankSummary r = rank_samples(a, b);
    const std::size_t small = std::min(a.size(), b.size());
    if (!r.has_ties && small <= kExactMaxSmall && a.size() * b.size() <= kExactMaxCells) {
        return mann_whitney_u_exact(a, b);
    }
    return mann_whitney_u_normal(a, b);
}

double mean(std::span<const double> xs)
{
    if (xs.empty()) {
        throw MosaicError("mean of an empty sample");
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs)
{
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double median(std::span<const double> xs)
{
    if (xs.empty()) {
        throw MosaicError("median of an empty sample");
    }
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

} // namespace photomosaic
