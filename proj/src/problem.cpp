#include "photomosaic/problem.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdlib>
#include <limits>

#include "photomosaic/error.hpp"

namespace photomosaic {

GridSize parse_grid(const std::string& text)
{
    // Same "AxB" grammar as tile sizes.
    try {
        const TileSize ts = parse_tile_size(text);
        return {ts.height, ts.width};
    } catch (const MosaicError&) {
        throw MosaicError("expected ROWSxCOLS grid, got '" + text + "'");
    }
}

BlockGrid partition_image(const Image& image, GridSize grid, TileSize block)
{
    if (image.empty()) {
        throw MosaicError("cannot partition an empty image");
    }
    if (grid.rows <= 0 || grid.cols <= 0 || block.height <= 0 || block.width <= 0) {
        throw MosaicError("grid and block dimensions must be positive");
    }
    const Image sized = resize_bilinear(image, grid.rows * block.height, grid.cols * block.width);
    BlockGrid out{grid, block, std::vector<std::uint8_t>(grid.blocks() * block.channel_values())};
    const auto row_bytes = static_cast<std::size_t>(block.width) * 3;
    auto* dst = out.data.data();
    for (int br = 0; br < grid.rows; ++br) {
        for (int bc = 0; bc < grid.cols; ++bc) {
            for (int y = 0; y < block.height; ++y) {
                const auto src = sized.index(br * block.height + y, bc * block.width, 0);
                std::copy_n(sized.rgb.data() + src, row_bytes, dst);
                dst += row_bytes;
            }
        }
    }
    return out;
}

Image reassemble(const BlockGrid& blocks)
{
    const auto& [grid, block, data] = blocks;
    Image out(grid.rows * block.height, grid.cols * block.width);
    const auto row_bytes = static_cast<std::size_t>(block.width) * 3;
    const auto* src = data.data();
    for (int br = 0; br < grid.rows; ++br) {
        for (int bc = 0; bc < grid.cols; ++bc) {
            for (int y = 0; y < block.height; ++y) {
                std::copy_n(src, row_bytes, out.rgb.data() + out.index(br * block.height + y, bc * block.width, 0));
                src += row_bytes;
            }
        }
    }
    return out;
}

std::uint64_t sum_abs_diff(const std::uint8_t* a, const std::uint8_t* b, std::size_t n)
{
    // 32-bit lanes vectorize well; flush before they can overflow.
    constexpr std::size_t chunk = 1u << 20;
    std::uint64_t total = 0;
    for (std::size_t off = 0; off < n; off += chunk) {
        const std::size_t end = std::min(n, off + chunk);
        std::uint32_t s = 0;
        for (std::size_t i = off; i < end; ++i) {
            s += static_cast<std::uint32_t>(std::abs(static_cast<int>(a[i]) - static_cast<int>(b[i])));
        }
        total += s;
    }
    return total;
}

MosaicProblem::MosaicProblem(const Image& target, GridSize grid, const TileDatabase& db, int max_uses)
    : MosaicProblem(partition_image(target, grid, db.tile_size()), db, max_uses)
{
}

MosaicProblem::MosaicProblem(BlockGrid blocks, const TileDatabase& db, int max_uses)
    : blocks_(std::move(blocks)),
      db_(&db),
      max_uses_(max_uses),
      mae_denominator_(255.0 * static_cast<double>(blocks_.block.channel_values()))
{
    validate();
}

void MosaicProblem::validate() const
{
    if (max_uses_ < 1) {
        throw MosaicError("reuse cap n_redu must be >= 1, got " + std::to_string(max_uses_));
    }
    if (db_->size() == 0) {
        throw MosaicError("tile database is empty");
    }
    if (blocks_.block != db_->tile_size()) {
        throw MosaicError("block size " + format_tile_size(blocks_.block) + " differs from tile size " +
                          format_tile_size(db_->tile_size()));
    }
    const std::size_t D = num_blocks();
    if (D == 0 || blocks_.data.size() != D * blocks_.block.channel_values()) {
        throw MosaicError("block data does not match the grid");
    }
    if (db_->size() * static_cast<std::size_t>(max_uses_) < D) {
        throw MosaicError("infeasible problem: " + std::to_string(db_->size()) + " tiles x n_redu " +
                          std::to_string(max_uses_) + " < " + std::to_string(D) + " blocks");
    }
    // below_average() multiplies a block SAD by D; keep that in range.
    const double worst = 255.0 * static_cast<double>(blocks_.block.channel_values()) * static_cast<double>(D) *
                         static_cast<double>(D);
    if (worst >= 0x1.0p63) {
        throw MosaicError("problem too large for 64-bit fitness accounting");
    }
}

double MosaicProblem::block_tile_mae(std::size_t l, std::size_t k) const
{
    if (l >= num_blocks()) {
        throw MosaicError("block index " + std::to_string(l) + " out of range");
    }
    if (k >= num_tiles()) {
        throw MosaicError("tile id " + std::to_string(k) + " out of range");
    }
    return static_cast<double>(block_tile_sad(l, k)) / mae_denominator_;
}

double MosaicProblem::overall_fitness(std::span<const int> tiles) const
{
    if (tiles.size() != num_blocks()) {
        throw MosaicError("assignment length does not match block count");
    }
    std::uint64_t total = 0;
    for (std::size_t l = 0; l < tiles.size(); ++l) {
        if (tiles[l] < 0 || static_cast<std::size_t>(tiles[l]) >= num_tiles()) {
            throw MosaicError("tile id out of range in assignment");
        }
        total += block_tile_sad(l, static_cast<std::size_t>(tiles[l]));
    }
    return static_cast<double>(total) / mae_denominator_ / static_cast<double>(tiles.size());
}

// ---------------------------------------------------------------------------

FenwickSampler::FenwickSampler(std::span<const std::uint64_t> weights)
    : tree_(weights.size() + 1, 0), weights_(weights.begin(), weights.end())
{
    for (std::size_t i = 1; i <= weights_.size(); ++i) {
        tree_[i] += weights_[i - 1];
        total_ += weights_[i - 1];
        const std::size_t parent = i + (i & (~i + 1));
        if (parent <= weights_.size()) {
            tree_[parent] += tree_[i];
        }
    }
    top_bit_ = weights_.empty() ? 0 : std::bit_floor(weights_.size());
}

void FenwickSampler::set(std::size_t i, std::uint64_t w)
{
    const std::uint64_t old = weights_[i];
    weights_[i] = w;
    total_ = total_ - old + w;
    for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) {
        tree_[j] = tree_[j] - old + w;
    }
}

std::size_t FenwickSampler::find(std::uint64_t target) const
{
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step != 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next < tree_.size() && tree_[next] <= target) {
            pos = next;
            target -= tree_[next];
        }
    }
    return pos;
}

std::size_t FenwickSampler::sample(Rng& rng) const
{
    assert(total_ > 0);
    return find(uniform_below(rng, total_));
}

// ---------------------------------------------------------------------------

Assignment::Assignment(const MosaicProblem& problem, std::vector<int> tiles, std::vector<std::uint64_t> block_sads)
    : tiles_(std::move(tiles)),
      usage_(problem.num_tiles(), 0),
      denominator_(problem.mae_denominator()),
      max_uses_(problem.max_uses())
{
    if (tiles_.size() != problem.num_blocks() || block_sads.size() != tiles_.size()) {
        throw MosaicError("assignment length does not match block count");
    }
    for (int k : tiles_) {
        if (k < 0 || static_cast<std::size_t>(k) >= usage_.size()) {
            throw MosaicError("tile id out of range in assignment");
        }
        if (++usage_[static_cast<std::size_t>(k)] > max_uses_) {
            throw MosaicError("assignment uses tile " + std::to_string(k) + " more than n_redu = " +
                              std::to_string(max_uses_) + " times");
        }
    }
    sampler_ = FenwickSampler(block_sads);
}

void Assignment::apply_mutation(std::size_t g, int k, std::uint64_t new_sad)
{
    assert(usage_[static_cast<std::size_t>(k)] < max_uses_);
    assert(new_sad < block_sad(g));
    --usage_[static_cast<std::size_t>(tiles_[g])];
    ++usage_[static_cast<std::size_t>(k)];
    tiles_[g] = k;
    sampler_.set(g, new_sad);
}

std::string Assignment::check_consistency(const MosaicProblem& problem) const
{
    std::vector<int> counts(problem.num_tiles(), 0);
    for (int k : tiles_) {
        ++counts[static_cast<std::size_t>(k)];
    }
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] != usage_[k]) {
            return "usage[" + std::to_string(k) + "] cached " + std::to_string(usage_[k]) + " but counted " +
                   std::to_string(counts[k]);
        }
        if (counts[k] > problem.max_uses()) {
            return "tile " + std::to_string(k) + " used " + std::to_string(counts[k]) + " times";
        }
    }
    std::uint64_t total = 0;
    for (std::size_t l = 0; l < tiles_.size(); ++l) {
        const auto sad = problem.block_tile_sad(l, static_cast<std::size_t>(tiles_[l]));
        if (sad != block_sad(l)) {
            return "per-block fitness of block " + std::to_string(l) + " is stale";
        }
        total += sad;
    }
    if (total != total_sad()) {
        return "fitness sum differs from recomputation";
    }
    std::uint64_t prefix = 0;
    for (std::size_t l = 0; l < tiles_.size(); ++l) {
        if (block_sad(l) > 0 && sampler_.find(prefix) != l) {
            return "sampler tree out of sync at block " + std::to_string(l);
        }
        prefix += block_sad(l);
    }
    return {};
}

} // namespace photomosaic
