#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "photomosaic/image.hpp"
#include "photomosaic/rng.hpp"
#include "photomosaic/tiledb.hpp"

namespace photomosaic {

/// Grid of n_r rows by n_c columns of blocks.
struct GridSize {
    int rows = 80;
    int cols = 100;

    [[nodiscard]] std::size_t blocks() const { return static_cast<std::size_t>(rows) * cols; }
    friend bool operator==(const GridSize&, const GridSize&) = default;
};

/// Parses "80x100" (rows x cols).
GridSize parse_grid(const std::string& text);

/// D blocks of m_b x n_b RGB pixels, row-major over the grid, each block
/// stored contiguously (itself row-major, interleaved RGB).
struct BlockGrid {
    GridSize grid;
    TileSize block;
    std::vector<std::uint8_t> data;

    [[nodiscard]] std::span<const std::uint8_t> block_pixels(std::size_t l) const
    {
        const auto len = block.channel_values();
        return std::span<const std::uint8_t>(data).subspan(l * len, len);
    }
};

/// Splits `image` into grid.rows x grid.cols blocks of `block` pixels. A
/// non-conforming image is first resized (bilinear) to
/// (rows * block.height) x (cols * block.width).
BlockGrid partition_image(const Image& image, GridSize grid, TileSize block);

/// Inverse of partition_image on the resized image.
Image reassemble(const BlockGrid& blocks);

/// Sum of absolute byte differences; the integer numerator of the MAE.
std::uint64_t sum_abs_diff(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);

/// Target image partitioned into blocks plus the tile database and the
/// reuse cap. Immutable after construction.
class MosaicProblem {
public:
    /// Throws MosaicError when max_uses < 1 or n * max_uses < D.
    MosaicProblem(const Image& target, GridSize grid, const TileDatabase& db, int max_uses);
    MosaicProblem(BlockGrid blocks, const TileDatabase& db, int max_uses);

    [[nodiscard]] const TileDatabase& database() const { return *db_; }
    [[nodiscard]] const BlockGrid& blocks() const { return blocks_; }
    [[nodiscard]] GridSize grid() const { return blocks_.grid; }
    [[nodiscard]] TileSize block_size() const { return blocks_.block; }
    [[nodiscard]] std::size_t num_blocks() const { return blocks_.grid.blocks(); }
    [[nodiscard]] std::size_t num_tiles() const { return db_->size(); }
    [[nodiscard]] int max_uses() const { return max_uses_; }

    /// 255 * (values per block): divides an integer SAD into an MAE in [0,1].
    [[nodiscard]] double mae_denominator() const { return mae_denominator_; }

    /// Integer SAD between block l and tile k, unchecked (hot loop).
    [[nodiscard]] std::uint64_t block_tile_sad(std::size_t l, std::size_t k) const
    {
        const auto len = blocks_.block.channel_values();
        return sum_abs_diff(blocks_.data.data() + l * len, db_->pixel_data(k), len);
    }

    /// fitness(l, k): MAE over all m_b * n_b * 3 normalized values. Range-checked.
    [[nodiscard]] double block_tile_mae(std::size_t l, std::size_t k) const;

    /// Mean per-block MAE of a full tile vector, recomputed from pixels.
    [[nodiscard]] double overall_fitness(std::span<const int> tiles) const;

private:
    void validate() const;

    BlockGrid blocks_;
    const TileDatabase* db_;
    int max_uses_;
    double mae_denominator_;
};

/// Fenwick tree over non-negative integer weights: point update and
/// weight-proportional sampling in O(log size).
class FenwickSampler {
public:
    FenwickSampler() = default;
    explicit FenwickSampler(std::span<const std::uint64_t> weights);

    [[nodiscard]] std::size_t size() const { return weights_.size(); }
    [[nodiscard]] std::uint64_t total() const { return total_; }
    [[nodiscard]] std::uint64_t weight(std::size_t i) const { return weights_[i]; }
    void set(std::size_t i, std::uint64_t w);

    /// Index i with probability weight(i) / total(). total() must be > 0.
    std::size_t sample(Rng& rng) const;

    /// Smallest i whose inclusive prefix sum exceeds `target` (< total()).
    [[nodiscard]] std::size_t find(std::uint64_t target) const;

private:
    std::vector<std::uint64_t> tree_;
    std::vector<std::uint64_t> weights_;
    std::uint64_t total_ = 0;
    std::size_t top_bit_ = 0;
};

/// Decision vector x with incrementally maintained usage counts, per-block
/// fitness, fitness sum and block sampler. Fitness is held as integer SAD,
/// so the cached sum equals a from-scratch recount exactly.
class Assignment {
public:
    /// `block_sads[l]` must equal problem.block_tile_sad(l, tiles[l]).
    Assignment(const MosaicProblem& problem, std::vector<int> tiles, std::vector<std::uint64_t> block_sads);

    [[nodiscard]] std::size_t num_blocks() const { return tiles_.size(); }
    [[nodiscard]] const std::vector<int>& tiles() const { return tiles_; }
    [[nodiscard]] int tile_at(std::size_t l) const { return tiles_[l]; }
    [[nodiscard]] const std::vector<int>& usage() const { return usage_; }
    [[nodiscard]] int usage(std::size_t k) const { return usage_[k]; }

    [[nodiscard]] std::uint64_t block_sad(std::size_t l) const { return sampler_.weight(l); }
    [[nodiscard]] std::uint64_t total_sad() const { return sampler_.total(); }
    [[nodiscard]] double block_fitness(std::size_t l) const { return block_sad(l) / denominator_; }
    [[nodiscard]] double fitness_sum() const { return total_sad() / denominator_; }
    [[nodiscard]] double overall_fitness() const { return fitness_sum() / static_cast<double>(tiles_.size()); }

    /// fitness(l, x_l) < mean per-block fitness, compared exactly.
    [[nodiscard]] bool below_average(std::size_t l) const
    {
        return block_sad(l) * tiles_.size() < total_sad();
    }

    /// Block g with probability fitness(g, x_g) / sum of fitness.
    std::size_t sample_block(Rng& rng) const { return sampler_.sample(rng); }

    /// x_g <- k. Requires usage(k) < max_uses and new_sad < block_sad(g).
    void apply_mutation(std::size_t g, int k, std::uint64_t new_sad);

    /// Full recount/recompute against the problem; empty string when the
    /// cached state is consistent, otherwise a description of the first
    /// violated invariant.
    [[nodiscard]] std::string check_consistency(const MosaicProblem& problem) const;

private:
    std::vector<int> tiles_;
    std::vector<int> usage_;
    FenwickSampler sampler_;
    double denominator_;
    int max_uses_;
};

} // namespace photomosaic
