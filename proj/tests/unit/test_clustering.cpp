#include <algorithm>
#include <limits>

#include <doctest.h>

#include "helpers.hpp"
#include "photomosaic/clustering.hpp"
#include "photomosaic/error.hpp"

using namespace photomosaic;

namespace {

double partition_inertia(const std::vector<double>& pts, std::size_t dim, unsigned mask)
{
    const std::size_t n = pts.size() / dim;
    double total = 0.0;
    for (unsigned side = 0; side < 2; ++side) {
        std::vector<double> c(dim, 0.0);
        std::size_t m = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (((mask >> i) & 1U) == side) {
                ++m;
                for (std::size_t d = 0; d < dim; ++d) {
                    c[d] += pts[i * dim + d];
                }
            }
        }
        if (m == 0) {
            return std::numeric_limits<double>::infinity();
        }
        for (double& v : c) {
            v /= static_cast<double>(m);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (((mask >> i) & 1U) == side) {
                for (std::size_t d = 0; d < dim; ++d) {
                    const double diff = pts[i * dim + d] - c[d];
                    total += diff * diff;
                }
            }
        }
    }
    return total;
}

} // namespace

TEST_SUITE("clustering")
{
    TEST_CASE("K equal to n gives singletons")
    {
        Rng rng(3);
        std::vector<double> pts(12 * 5);
        for (double& v : pts) {
            v = uniform_unit(rng);
        }
        const KMeansResult r = kmeans(pts, 5, {12, 1, 100});
        CHECK(r.converged);
        CHECK(r.model.inertia(pts) == doctest::Approx(0.0));
        for (int c = 0; c < 12; ++c) {
            CHECK(r.model.cluster_size(c) == 1);
        }
    }

    TEST_CASE("identical points, K = 2")
    {
        const std::vector<double> pts(10 * 3, 0.25);
        const KMeansResult r = kmeans(pts, 3, {2, 7, 100});
        CHECK(r.converged);
        std::vector<std::size_t> sizes{r.model.cluster_size(0), r.model.cluster_size(1)};
        std::sort(sizes.begin(), sizes.end());
        CHECK(sizes == std::vector<std::size_t>{1, 9});
        CHECK(r.model.inertia(pts) == 0.0);
    }

    TEST_CASE("two separated groups match the best 2-partition")
    {
        Rng rng(17);
        const std::size_t n = 20;
        std::vector<double> pts;
        std::vector<int> group;
        for (std::size_t i = 0; i < n; ++i) {
            const int g = static_cast<int>(i % 2);
            group.push_back(g);
            pts.push_back(g * 10.0 + 0.01 * uniform_unit(rng));
            pts.push_back(-g * 5.0 + 0.01 * uniform_unit(rng));
        }
        unsigned best_mask = 0;
        double best = std::numeric_limits<double>::infinity();
        for (unsigned mask = 0; mask < (1U << n); ++mask) {
            if ((mask & 1U) != 0) {
                continue; // fix point 0 to side 0; partitions are unordered
            }
            const double v = partition_inertia(pts, 2, mask);
            if (v < best) {
                best = v;
                best_mask = mask;
            }
        }
        const KMeansResult r = kmeans(pts, 2, {2, 4, 100});
        CHECK(r.model.inertia(pts) == doctest::Approx(best).epsilon(1e-9));
        const auto& a = r.model.assignment();
        for (std::size_t i = 0; i < n; ++i) {
            CHECK((a[i] == a[0]) == (((best_mask >> i) & 1U) == 0));
            CHECK((a[i] == a[0]) == (group[i] == group[0]));
        }
    }

    TEST_CASE("inertia trace never increases")
    {
        Rng rng(8);
        std::vector<double> pts(300 * 6);
        for (double& v : pts) {
            v = uniform_unit(rng);
        }
        const KMeansResult r = kmeans(pts, 6, {9, 2, 100});
        REQUIRE(!r.inertia_trace.empty());
        for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) {
            CHECK(r.inertia_trace[i] <= r.inertia_trace[i - 1] + 1e-12);
        }
        CHECK(kmeans(pts, 6, {9, 2, 100}).model == r.model);
    }

    TEST_CASE("cluster count validation")
    {
        const std::vector<double> pts(4 * 2, 1.0);
        CHECK_THROWS_AS(kmeans(pts, 2, {5, 0, 10}), MosaicError);
        CHECK_THROWS_AS(kmeans(pts, 2, {0, 0, 10}), MosaicError);
        CHECK_THROWS_AS(kmeans(pts, 2, {-1, 0, 10}), MosaicError);
    }

    TEST_CASE("lookup and membership")
    {
        const std::vector<double> pts{0.0, 1.0, 0.0};
        const ClusterModel m(2, {0, 1, 0}, pts, 1);
        CHECK(m.cluster_of(2) == 0);
        CHECK(m.cluster_of(1) == 1);
        CHECK_THROWS_AS((void)m.cluster_of(3), MosaicError);
        CHECK(std::vector<int>(m.members(0).begin(), m.members(0).end()) == std::vector<int>{0, 2});
        CHECK(m.rank_in_cluster(2) == 1);
        CHECK(m.centroid(0)[0] == 0.0);
        CHECK(m.centroid(1)[0] == 1.0);
    }

    TEST_CASE("every id is a member of its cluster")
    {
        const TileDatabase db = testutil::random_db(60, {4, 4}, 21, 5);
        const ClusterModel m = kmeans(db, {7, 3, 100}).model;
        for (std::size_t id = 0; id < db.size(); ++id) {
            const auto members = m.members(m.cluster_of(id));
            CHECK(std::find(members.begin(), members.end(), static_cast<int>(id)) != members.end());
            CHECK(m.grouped()[m.cluster_begin(m.cluster_of(id)) + m.rank_in_cluster(id)] == static_cast<int>(id));
        }
    }

    TEST_CASE("model file round trip")
    {
        const TileDatabase db = testutil::random_db(30, {4, 4}, 22, 5);
        const ClusterModel m = kmeans(db, {4, 3, 100}).model;
        const auto dir = testutil::scratch_dir("clusters_rt");
        write_cluster_model(m, dir / "m.txt");
        CHECK(read_cluster_model(dir / "m.txt", db) == m);
        const TileDatabase other = testutil::random_db(31, {4, 4}, 22, 5);
        CHECK_THROWS_AS(read_cluster_model(dir / "m.txt", other), MosaicError);
    }
}
