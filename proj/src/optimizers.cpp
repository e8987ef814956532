#include "photomosaic/optimizers.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>

#include "photomosaic/error.hpp"

namespace photomosaic {

void CepParams::validate() const
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw MosaicError("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
}

Algorithm parse_algorithm(std::string_view name)
{
    if (name == "cep") {
        return Algorithm::cep;
    }
    if (name == "rii") {
        return Algorithm::rii;
    }
    if (name == "greedy") {
        return Algorithm::greedy;
    }
    throw MosaicError("unknown algorithm '" + std::string(name) + "' (expected cep, rii or greedy)");
}

std::string_view algorithm_name(Algorithm algorithm)
{
    switch (algorithm) {
    case Algorithm::cep:
        return "cep";
    case Algorithm::rii:
        return "rii";
    case Algorithm::greedy:
        return "greedy";
    }
    return "?";
}

Assignment initialize_assignment(const MosaicProblem& problem, Rng& rng, Evaluator& evaluator)
{
    const std::size_t D = problem.num_blocks();
    const std::size_t n = problem.num_tiles();
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<int> x(D);
    if (n >= D) {
        for (std::size_t i = 0; i < D; ++i) {
            std::swap(ids[i], ids[i + uniform_below(rng, n - i)]);
            x[i] = ids[i];
        }
    } else {
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(ids[i], ids[uniform_below(rng, i + 1)]);
        }
        for (std::size_t i = 0; i < D; ++i) {
            x[i] = ids[i % n];
        }
    }
    std::vector<std::uint64_t> sads(D);
    for (std::size_t l = 0; l < D; ++l) {
        sads[l] = evaluator.sad(l, static_cast<std::size_t>(x[l]));
    }
    return Assignment(problem, std::move(x), std::move(sads));
}

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point start)
{
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

struct Proposal {
    std::size_t block;
    int tile;
};

// Shared (1+1) mutation loop. `propose` returns the (block, tile) pair to
// try, or nullopt when no proposal exists at all.
template <typename Propose>
SolveResult run_search(const MosaicProblem& problem, const CepParams& params, const StepObserver& observer,
                       Propose&& propose)
{
    const auto start = Clock::now();
    Rng rng(params.seed);
    Evaluator evaluator(problem);
    Assignment current = initialize_assignment(problem, rng, evaluator);
    ConvergenceLog log(params.log_stride);
    log.record(evaluator.count(), current.overall_fitness(), elapsed_ms(start));

    const int cap = problem.max_uses();
    const std::uint64_t valve = 100 * std::max<std::uint64_t>(params.max_evaluations, 1);
    std::uint64_t iterations = 0;
    bool stalled = false;
    while (evaluator.count() < params.max_evaluations && current.total_sad() > 0) {
        if (iterations == valve) {
            stalled = true;
            break;
        }
        ++iterations;
        const std::optional<Proposal> p = propose(current, rng);
        if (!p) {
            break;
        }
        if (current.usage(static_cast<std::size_t>(p->tile)) < cap) {
            const std::uint64_t sad = evaluator.sad(p->block, static_cast<std::size_t>(p->tile));
            const bool accepted = sad < current.block_sad(p->block);
            if (accepted) {
                current.apply_mutation(p->block, p->tile, sad);
            }
            if (accepted || log.due(evaluator.count())) {
                log.record(evaluator.count(), current.overall_fitness(), elapsed_ms(start));
            }
        }
        if (observer) {
            observer(current);
        }
    }
    if (log.back().evaluations != evaluator.count()) {
        log.record(evaluator.count(), current.overall_fitness(), elapsed_ms(start));
    }
    return SolveResult{std::move(current), std::move(log), evaluator.count(), iterations,
                       std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start), stalled};
}

// Uniform draw from x_g's cluster minus x_g itself, or from the tiles
// outside that cluster. Either side falls back to the other when empty.
int cluster_proposal(const ClusterModel& clusters, int incumbent, bool within, Rng& rng)
{
    const int c = clusters.assignment()[static_cast<std::size_t>(incumbent)];
    const std::size_t begin = clusters.cluster_begin(c);
    const std::size_t size = clusters.cluster_size(c);
    const std::size_t outside = clusters.num_tiles() - size;
    const auto& grouped = clusters.grouped();

    auto draw_within = [&] {
        std::size_t r = uniform_below(rng, size - 1);
        if (r >= clusters.rank_in_cluster(static_cast<std::size_t>(incumbent))) {
            ++r;
        }
        return grouped[begin + r];
    };
    auto draw_outside = [&] {
        const std::size_t r = uniform_below(rng, outside);
        return grouped[r < begin ? r : r + size];
    };

    if (within && size > 1) {
        return draw_within();
    }
    if (outside > 0) {
        return draw_outside();
    }
    if (size > 1) {
        return draw_within();
    }
    return -1;
}

} // namespace

SolveResult cep_solve(const MosaicProblem& problem, const ClusterModel& clusters, const CepParams& params,
                      const StepObserver& observer)
{
    params.validate();
    if (clusters.num_tiles() != problem.num_tiles()) {
        throw MosaicError("cluster model covers " + std::to_string(clusters.num_tiles()) +
                          " tiles but the database holds " + std::to_string(problem.num_tiles()));
    }
    const double alpha = params.alpha;
    return run_search(problem, params, observer, [&](const Assignment& a, Rng& rng) -> std::optional<Proposal> {
        const std::size_t g = a.sample_block(rng);
        const double prob = uniform_unit(rng);
        const double threshold = within_cluster_threshold(a.below_average(g), alpha);
        const int k = cluster_proposal(clusters, a.tile_at(g), prob < threshold, rng);
        if (k < 0) {
            return std::nullopt;
        }
        return Proposal{g, k};
    });
}

SolveResult rii_solve(const MosaicProblem& problem, const CepParams& params, const StepObserver& observer)
{
    params.validate();
    const std::size_t D = problem.num_blocks();
    const std::size_t n = problem.num_tiles();
    return run_search(problem, params, observer, [&](const Assignment&, Rng& rng) -> std::optional<Proposal> {
        const std::size_t l = uniform_below(rng, D);
        const auto k = static_cast<int>(uniform_below(rng, n));
        return Proposal{l, k};
    });
}

SolveResult greedy_solve(const MosaicProblem& problem)
{
    const auto start = Clock::now();
    const std::size_t D = problem.num_blocks();
    const std::size_t n = problem.num_tiles();
    const int cap = problem.max_uses();
    Evaluator evaluator(problem);
    std::vector<int> usage(n, 0);
    std::vector<int> x(D, -1);
    std::vector<std::uint64_t> sads(D, 0);
    for (std::size_t l = 0; l < D; ++l) {
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t k = 0; k < n; ++k) {
            const std::uint64_t sad = evaluator.sad(l, k);
            if (usage[k] < cap && sad < best) {
                best = sad;
                x[l] = static_cast<int>(k);
            }
        }
        ++usage[static_cast<std::size_t>(x[l])];
        sads[l] = best;
    }
    Assignment assignment(problem, std::move(x), std::move(sads));
    ConvergenceLog log(1);
    log.record(evaluator.count(), assignment.overall_fitness(), elapsed_ms(start));
    return SolveResult{std::move(assignment), std::move(log), evaluator.count(), D,
                       std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start), false};
}

OracleResult exhaustive_oracle(const MosaicProblem& problem)
{
    const std::size_t D = problem.num_blocks();
    const std::size_t n = problem.num_tiles();
    if (D > 9 || n > 12) {
        throw MosaicError("exhaustive oracle limited to D <= 9 blocks and n <= 12 tiles (got D = " +
                          std::to_string(D) + ", n = " + std::to_string(n) + ")");
    }
    const int cap = problem.max_uses();

    std::vector<std::uint64_t> cost(D * n);
    for (std::size_t l = 0; l < D; ++l) {
        for (std::size_t k = 0; k < n; ++k) {
            cost[l * n + k] = problem.block_tile_sad(l, k);
        }
    }
    // suffix_bound[l]: sum over blocks >= l of their unconstrained minimum.
    std::vector<std::uint64_t> suffix_bound(D + 1, 0);
    for (std::size_t l = D; l-- > 0;) {
        const auto row = cost.begin() + static_cast<std::ptrdiff_t>(l * n);
        suffix_bound[l] = suffix_bound[l + 1] + *std::min_element(row, row + static_cast<std::ptrdiff_t>(n));
    }

    std::vector<int> usage(n, 0);
    std::vector<int> x(D, 0);
    OracleResult best;
    best.total_sad = std::numeric_limits<std::uint64_t>::max();

    auto search = [&](auto&& self, std::size_t l, std::uint64_t partial) -> void {
        if (l == D) {
            if (partial < best.total_sad) {
                best.total_sad = partial;
                best.tiles = x;
            }
            return;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (usage[k] >= cap) {
                continue;
            }
            const std::uint64_t next = partial + cost[l * n + k];
            if (next + suffix_bound[l + 1] >= best.total_sad) {
                continue;
            }
            ++usage[k];
            x[l] = static_cast<int>(k);
            self(self, l + 1, next);
            --usage[k];
        }
    };
    search(search, 0, 0);
    best.fitness = static_cast<double>(best.total_sad) / problem.mae_denominator() / static_cast<double>(D);
    return best;
}

} // namespace photomosaic
