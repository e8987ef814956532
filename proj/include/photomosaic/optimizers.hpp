#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "photomosaic/clustering.hpp"
#include "photomosaic/convergence.hpp"
#include "photomosaic/problem.hpp"
#include "photomosaic/rng.hpp"

namespace photomosaic {

/// Counts block/tile MAE computations, the unit of the search budget.
class Evaluator {
public:
    explicit Evaluator(const MosaicProblem& problem) : problem_(&problem) {}

    std::uint64_t sad(std::size_t block, std::size_t tile)
    {
        ++count_;
        return problem_->block_tile_sad(block, tile);
    }
    [[nodiscard]] std::uint64_t count() const { return count_; }

private:
    const MosaicProblem* problem_;
    std::uint64_t count_ = 0;
};

struct CepParams {
    /// Probability of a within-cluster proposal for a below-average block
    /// (and of an out-of-cluster proposal for an above-average one).
    double alpha = 0.75;
    std::uint64_t max_evaluations = 1'600'000;
    std::uint64_t seed = 0;
    std::uint64_t log_stride = 1000;

    /// Throws MosaicError unless 0 < alpha < 1.
    void validate() const;
};

/// Called after every search iteration with the current state. Intended for
/// tests and instrumentation.
using StepObserver = std::function<void(const Assignment&)>;

struct SolveResult {
    Assignment assignment;
    ConvergenceLog log;
    std::uint64_t evaluations_used = 0;
    std::uint64_t iterations = 0;
    std::chrono::nanoseconds wall_time{0};
    /// True when the run stopped because 100 * max_evaluations iterations
    /// elapsed without spending the budget (every proposal hit the cap).
    bool stalled = false;
};

/// x drawn as D distinct tile ids uniformly at random when n >= D; otherwise
/// a random permutation of the tiles repeated round-robin (usage <= ceil(D/n)
/// <= n_redu). Spends D evaluations filling the per-block fitness cache.
Assignment initialize_assignment(const MosaicProblem& problem, Rng& rng, Evaluator& evaluator);

/// Probability of a within-cluster proposal: alpha when the block's
/// fitness is below the mean, 1 - alpha otherwise.
inline double within_cluster_threshold(bool below_average, double alpha)
{
    return below_average ? alpha : 1.0 - alpha;
}

/// Clustering-based evolutionary programming. Per iteration: sample block g
/// with probability proportional to its fitness; threshold th = alpha if the
/// block beats the mean fitness, else 1 - alpha; with probability th
/// propose a tile from x_g's cluster (excluding x_g), otherwise from outside
/// it; if the proposal is under the reuse cap, evaluate it and accept on
/// strict improvement. Stops when the budget is spent or fitness hits 0.
SolveResult cep_solve(const MosaicProblem& problem, const ClusterModel& clusters, const CepParams& params,
                      const StepObserver& observer = {});

/// Randomized iterative improvement: uniform block, uniform tile, same
/// reuse-cap guard, acceptance rule and accounting as cep_solve.
SolveResult rii_solve(const MosaicProblem& problem, const CepParams& params, const StepObserver& observer = {});

/// Row-major greedy: each block takes its minimum-MAE tile among those still
/// under the cap (ties to the lowest id). Evaluates every (block, tile) pair.
SolveResult greedy_solve(const MosaicProblem& problem);

struct OracleResult {
    std::vector<int> tiles;
    std::uint64_t total_sad = 0;
    double fitness = 0.0;
};

/// Exact optimum by depth-first branch and bound; among optimal vectors
/// the lexicographically smallest is returned. Limited to D <= 9, n <= 12.
OracleResult exhaustive_oracle(const MosaicProblem& problem);

enum class Algorithm { cep, rii, greedy };
Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm algorithm);

} // namespace photomosaic
