#include "photomosaic/clustering.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "photomosaic/error.hpp"
#include "photomosaic/rng.hpp"
#include "photomosaic/tiledb.hpp"

namespace photomosaic {

namespace {

double squared_distance(const double* a, const double* b, std::size_t dim)
{
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

std::vector<double> member_means(int clusters, const std::vector<int>& assignment, std::span<const double> points,
                                 std::size_t dim)
{
    std::vector<double> sums(static_cast<std::size_t>(clusters) * dim, 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(clusters), 0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const auto c = static_cast<std::size_t>(assignment[i]);
        ++counts[c];
        for (std::size_t j = 0; j < dim; ++j) {
            sums[c * dim + j] += points[i * dim + j];
        }
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) {
            continue;
        }
        for (std::size_t j = 0; j < dim; ++j) {
            sums[c * dim + j] /= static_cast<double>(counts[c]);
        }
    }
    return sums;
}

} // namespace

ClusterModel::ClusterModel(int clusters, std::vector<int> assignment, std::span<const double> points, std::size_t dim)
    : clusters_(clusters), dim_(dim), assignment_(std::move(assignment))
{
    if (clusters <= 0) {
        throw MosaicError("cluster count must be positive");
    }
    if (points.size() != assignment_.size() * dim) {
        throw MosaicError("point matrix does not match assignment length");
    }
    for (int c : assignment_) {
        if (c < 0 || c >= clusters) {
            throw MosaicError("cluster id " + std::to_string(c) + " outside [0, " + std::to_string(clusters) + ")");
        }
    }
    centroids_ = member_means(clusters, assignment_, points, dim);

    offsets_.assign(static_cast<std::size_t>(clusters) + 1, 0);
    for (int c : assignment_) {
        ++offsets_[static_cast<std::size_t>(c) + 1];
    }
    for (std::size_t c = 1; c < offsets_.size(); ++c) {
        offsets_[c] += offsets_[c - 1];
    }
    grouped_.assign(assignment_.size(), 0);
    rank_.assign(assignment_.size(), 0);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
        const auto c = static_cast<std::size_t>(assignment_[i]);
        rank_[i] = fill[c] - offsets_[c];
        grouped_[fill[c]++] = static_cast<int>(i);
    }
}

int ClusterModel::cluster_of(std::size_t tile_id) const
{
    if (tile_id >= assignment_.size()) {
        throw MosaicError("tile id " + std::to_string(tile_id) + " out of range (n = " +
                          std::to_string(assignment_.size()) + ")");
    }
    return assignment_[tile_id];
}

std::span<const int> ClusterModel::members(int cluster) const
{
    if (cluster < 0 || cluster >= clusters_) {
        throw MosaicError("cluster id out of range");
    }
    return std::span<const int>(grouped_).subspan(cluster_begin(cluster), cluster_size(cluster));
}

std::span<const double> ClusterModel::centroid(int cluster) const
{
    return std::span<const double>(centroids_).subspan(static_cast<std::size_t>(cluster) * dim_, dim_);
}

double ClusterModel::inertia(std::span<const double> points) const
{
    double total = 0.0;
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
        total += squared_distance(&points[i * dim_], centroid(assignment_[i]).data(), dim_);
    }
    return total;
}

KMeansResult kmeans(std::span<const double> points, std::size_t dim, const KMeansOptions& options)
{
    if (dim == 0 || points.empty() || points.size() % dim != 0) {
        throw MosaicError("k-means needs a non-empty point matrix");
    }
    const std::size_t n = points.size() / dim;
    const int K = options.clusters;
    if (K <= 0) {
        throw MosaicError("k-means cluster count must be positive, got " + std::to_string(K));
    }
    if (static_cast<std::size_t>(K) > n) {
        throw MosaicError("k-means cluster count " + std::to_string(K) + " exceeds point count " + std::to_string(n));
    }
    const auto k = static_cast<std::size_t>(K);
    auto point = [&](std::size_t i) { return &points[i * dim]; };

    // k-means++ seeding.
    Rng rng(options.seed);
    std::vector<double> centroids(k * dim);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::size_t chosen = uniform_below(rng, n);
    for (std::size_t c = 0; c < k; ++c) {
        std::copy_n(point(chosen), dim, &centroids[c * dim]);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(point(i), &centroids[c * dim], dim));
            total += nearest[i];
        }
        if (c + 1 == k) {
            break;
        }
        if (total <= 0.0) {
            chosen = uniform_below(rng, n);
            continue;
        }
        const double target = uniform_unit(rng) * total;
        double acc = 0.0;
        chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            acc += nearest[i];
            if (target < acc && nearest[i] > 0.0) {
                chosen = i;
                break;
            }
        }
    }

    KMeansResult result;
    std::vector<int> assignment(n, -1);
    std::vector<int> previous;
    std::vector<double> dist(n, 0.0);
    for (int iter = 0; iter < options.max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_distance(point(i), &centroids[0], dim);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = squared_distance(point(i), &centroids[c * dim], dim);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            dist[i] = best_d;
            assignment[i] = best;
        }

        // Empty-cluster repair.
        std::vector<std::size_t> counts(k, 0);
        for (int c : assignment) {
            ++counts[static_cast<std::size_t>(c)];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) {
                continue;
            }
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[static_cast<std::size_t>(assignment[i])] > 1 && (far == n || dist[i] > dist[far])) {
                    far = i;
                }
            }
            --counts[static_cast<std::size_t>(assignment[far])];
            assignment[far] = static_cast<int>(c);
            dist[far] = 0.0;
            counts[c] = 1;
        }

        // Same partition as last pass: centroids are already its means.
        if (assignment == previous) {
            result.converged = true;
            break;
        }
        result.iterations = iter + 1;
        centroids = member_means(K, assignment, points, dim);
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inertia += squared_distance(point(i), &centroids[static_cast<std::size_t>(assignment[i]) * dim], dim);
        }
        result.inertia_trace.push_back(inertia);
        previous = assignment;
    }
    result.model = ClusterModel(K, std::move(assignment), points, dim);
    return result;
}

KMeansResult kmeans(const TileDatabase& db, const KMeansOptions& options)
{
    const auto matrix = db.histogram_matrix();
    return kmeans(matrix, 3 * static_cast<std::size_t>(db.bins_per_channel()), options);
}

void write_cluster_model(const ClusterModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw MosaicError("cannot open cluster model for writing: " + path.string());
    }
    out << "# photomosaic cluster model: one 'tile_id cluster_id' line per tile\n";
    out << "clusters " << model.num_clusters() << " tiles " << model.num_tiles() << '\n';
    for (std::size_t i = 0; i < model.num_tiles(); ++i) {
        out << i << ' ' << model.assignment()[i] << '\n';
    }
    if (!out) {
        throw MosaicError("failed writing cluster model: " + path.string());
    }
}

ClusterModel read_cluster_model(const std::filesystem::path& path, const TileDatabase& db)
{
    std::ifstream in(path);
    if (!in) {
        throw MosaicError("cannot open cluster model: " + path.string());
    }
    std::string line;
    int clusters = -1;
    std::size_t tiles = 0;
    std::vector<int> assignment;
    std::size_t expected_id = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream fields(line);
        if (clusters < 0) {
            std::string kw1;
            std::string kw2;
            if (!(fields >> kw1 >> clusters >> kw2 >> tiles) || kw1 != "clusters" || kw2 != "tiles" || clusters <= 0) {
                throw MosaicError("malformed cluster model header in " + path.string());
            }
            assignment.assign(tiles, -1);
            continue;
        }
        std::size_t id = 0;
        int c = 0;
        if (!(fields >> id >> c) || id != expected_id || id >= tiles) {
            throw MosaicError("malformed cluster model line '" + line + "' in " + path.string());
        }
        assignment[id] = c;
        ++expected_id;
    }
    if (clusters < 0 || expected_id != tiles) {
        throw MosaicError("cluster model is incomplete: " + path.string());
    }
    if (tiles != db.size()) {
        throw MosaicError("cluster model covers " + std::to_string(tiles) + " tiles but the database holds " +
                          std::to_string(db.size()));
    }
    const auto matrix = db.histogram_matrix();
    return ClusterModel(clusters, std::move(assignment), matrix, 3 * static_cast<std::size_t>(db.bins_per_channel()));
}

} // namespace photomosaic
