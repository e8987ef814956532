#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace photomosaic {

class TileDatabase;

/// K-means partition of the tiles. Members of every cluster are stored
/// contiguously (ascending tile id within a cluster) so the optimizer can
/// draw "inside cluster c" and "outside cluster c" uniformly in O(1).
class ClusterModel {
public:
    ClusterModel() = default;

    /// Builds the model from a tile->cluster assignment; centroids are the
    /// member means of `points` (row-major n x dim).
    ClusterModel(int clusters, std::vector<int> assignment, std::span<const double> points, std::size_t dim);

    [[nodiscard]] int num_clusters() const { return clusters_; }
    [[nodiscard]] std::size_t num_tiles() const { return assignment_.size(); }
    [[nodiscard]] std::size_t dimension() const { return dim_; }

    /// Throws MosaicError if tile_id is out of range.
    [[nodiscard]] int cluster_of(std::size_t tile_id) const;

    [[nodiscard]] std::span<const int> members(int cluster) const;
    [[nodiscard]] std::size_t cluster_size(int cluster) const
    {
        return offsets_[static_cast<std::size_t>(cluster) + 1] - offsets_[static_cast<std::size_t>(cluster)];
    }
    [[nodiscard]] std::span<const double> centroid(int cluster) const;
    [[nodiscard]] const std::vector<int>& assignment() const { return assignment_; }

    /// Tile ids grouped by cluster; cluster c occupies
    /// [cluster_begin(c), cluster_begin(c) + cluster_size(c)).
    [[nodiscard]] const std::vector<int>& grouped() const { return grouped_; }
    [[nodiscard]] std::size_t cluster_begin(int cluster) const { return offsets_[static_cast<std::size_t>(cluster)]; }
    /// Position of a tile inside its own cluster's member list.
    [[nodiscard]] std::size_t rank_in_cluster(std::size_t tile_id) const { return rank_[tile_id]; }

    /// Sum of squared distances of every point to its centroid.
    [[nodiscard]] double inertia(std::span<const double> points) const;

    friend bool operator==(const ClusterModel&, const ClusterModel&) = default;

private:
    int clusters_ = 0;
    std::size_t dim_ = 0;
    std::vector<int> assignment_;
    std::vector<double> centroids_;
    std::vector<int> grouped_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> rank_;
};

struct KMeansOptions {
    int clusters = 90;
    std::uint64_t seed = 0;
    int max_iters = 100;
};

struct KMeansResult {
    ClusterModel model;
    int iterations = 0;
    bool converged = false;
    /// Inertia after each Lloyd iteration (assignment + update).
    std::vector<double> inertia_trace;
};

/// Lloyd's algorithm on squared Euclidean distance with k-means++ seeding.
/// Equidistant centroids resolve to the lowest cluster id. An emptied
/// cluster is refilled with the point farthest from its centroid (taken
/// from a cluster that keeps at least one member). Stops when an
/// assignment pass changes nothing or after max_iters passes.
KMeansResult kmeans(std::span<const double> points, std::size_t dim, const KMeansOptions& options);

/// Convenience overload clustering a database's histograms.
KMeansResult kmeans(const TileDatabase& db, const KMeansOptions& options);

/// Text export: a header line "clusters K tiles n", then one "id cluster"
/// line per tile. Comment lines start with '#'.
void write_cluster_model(const ClusterModel& model, const std::filesystem::path& path);

/// Reads the text export; centroids are recomputed from db histograms.
ClusterModel read_cluster_model(const std::filesystem::path& path, const TileDatabase& db);

} // namespace photomosaic
