#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "photomosaic/error.hpp"
#include "photomosaic/problem.hpp"

using namespace photomosaic;

namespace {

Assignment make_assignment(const MosaicProblem& p, std::vector<int> tiles)
{
    std::vector<std::uint64_t> sads;
    for (std::size_t l = 0; l < tiles.size(); ++l) {
        sads.push_back(p.block_tile_sad(l, static_cast<std::size_t>(tiles[l])));
    }
    return Assignment(p, std::move(tiles), std::move(sads));
}

// 1x10 blocks over zero pixels; tile k has 3k bytes set to 255, so its
// MAE against a black block is k / 10.
TileDatabase stepped_db()
{
    std::vector<std::vector<std::uint8_t>> px;
    for (int k = 0; k <= 10; ++k) {
        std::vector<std::uint8_t> t(30, 0);
        std::fill(t.begin(), t.begin() + 3 * k, 255);
        px.push_back(t);
    }
    return TileDatabase(TileSize{1, 10}, 4, std::move(px));
}

} // namespace

TEST_SUITE("problem")
{
    TEST_CASE("grid parsing")
    {
        CHECK(parse_grid("80x100") == GridSize{80, 100});
        CHECK(GridSize{80, 100}.blocks() == 8000);
        CHECK_THROWS_AS(parse_grid("80"), MosaicError);
        CHECK_THROWS_AS(parse_grid("0x3"), MosaicError);
    }

    TEST_CASE("2560x3200 image gives 8000 blocks")
    {
        const Image img = testutil::constant_image(2560, 3200, 90);
        const BlockGrid g = partition_image(img, {80, 100}, {32, 32});
        CHECK(g.grid.blocks() == 8000);
        CHECK(g.data.size() == 8000u * 32 * 32 * 3);
    }

    TEST_CASE("single block equals the image")
    {
        const Image img = testutil::random_image(32, 32, 4);
        const BlockGrid g = partition_image(img, {1, 1}, {32, 32});
        CHECK(g.data == img.rgb);
    }

    TEST_CASE("reassembly round trip")
    {
        const Image img = testutil::random_image(64, 64, 5);
        const BlockGrid g = partition_image(img, {2, 2}, {32, 32});
        CHECK(g.grid.blocks() == 4);
        CHECK(reassemble(g) == img);
        // Block 1 is the top-right quadrant.
        CHECK(g.block_pixels(1)[0] == img.at(0, 32, 0));
        const Image wide = testutil::random_image(6, 12, 6);
        CHECK(reassemble(partition_image(wide, {3, 2}, {2, 6})) == wide);
    }

    TEST_CASE("non-conforming image is resized first")
    {
        const Image img = testutil::random_image(50, 70, 7);
        const BlockGrid g = partition_image(img, {2, 3}, {8, 8});
        CHECK(reassemble(g) == resize_bilinear(img, 16, 24));
        CHECK_THROWS_AS(partition_image(Image{}, {2, 3}, {8, 8}), MosaicError);
    }

    TEST_CASE("block/tile MAE")
    {
        std::vector<std::vector<std::uint8_t>> px{std::vector<std::uint8_t>(12, 0), std::vector<std::uint8_t>(12, 255),
                                                  std::vector<std::uint8_t>(12, 191)};
        const TileDatabase db(TileSize{2, 2}, 4, std::move(px));
        const MosaicProblem zero(testutil::constant_image(2, 2, 0), {1, 1}, db, 1);
        CHECK(zero.block_tile_mae(0, 0) == 0.0);
        CHECK(zero.block_tile_mae(0, 1) == 1.0);
        const MosaicProblem quarter(testutil::constant_image(2, 2, 64), {1, 1}, db, 1);
        // 0.25 and 0.75 quantize to 64 and 191.
        CHECK(std::abs(quarter.block_tile_mae(0, 2) - 0.5) <= 1.0 / 255);
        CHECK_THROWS_AS((void)zero.block_tile_mae(1, 0), MosaicError);
        CHECK_THROWS_AS((void)zero.block_tile_mae(0, 3), MosaicError);
    }

    TEST_CASE("overall fitness is the mean block MAE")
    {
        const TileDatabase db = stepped_db();
        const MosaicProblem p(testutil::constant_image(1, 20, 0), {1, 2}, db, 1);
        const std::vector<int> x{1, 3};
        CHECK(p.overall_fitness(x) == doctest::Approx(0.2));
        const Assignment a = make_assignment(p, x);
        CHECK(a.overall_fitness() == doctest::Approx(0.2));
        CHECK(a.block_fitness(0) == doctest::Approx(0.1));
        CHECK(p.overall_fitness(std::vector<int>{0, 0}) == 0.0);
    }

    TEST_CASE("problem validation")
    {
        const TileDatabase db = testutil::random_db(4, {2, 2}, 1);
        const Image img = testutil::random_image(4, 6, 2);
        CHECK_THROWS_AS(MosaicProblem(img, {2, 3}, db, 0), MosaicError);
        CHECK_THROWS_WITH_AS(MosaicProblem(img, {2, 3}, db, 1), doctest::Contains("infeasible"), MosaicError);
        CHECK_NOTHROW(MosaicProblem(img, {2, 3}, db, 2));
        const TileDatabase other = testutil::random_db(4, {3, 3}, 1);
        CHECK_THROWS_AS(MosaicProblem(partition_image(img, {2, 3}, {2, 2}), other, 2), MosaicError);
    }

    TEST_CASE("sampler probabilities are exact")
    {
        const std::vector<std::uint64_t> w{2, 3, 5};
        const FenwickSampler s(w);
        std::vector<int> hits(3, 0);
        for (std::uint64_t t = 0; t < s.total(); ++t) {
            ++hits[s.find(t)];
        }
        CHECK(hits == std::vector<int>{2, 3, 5});
    }

    TEST_CASE("zero-weight entries are never drawn")
    {
        FenwickSampler s(std::vector<std::uint64_t>{0, 4, 0, 0, 1, 0});
        Rng rng(1);
        for (int i = 0; i < 10000; ++i) {
            const auto g = s.sample(rng);
            CHECK((g == 1 || g == 4));
        }
        s.set(1, 0);
        s.set(5, 9);
        for (std::uint64_t t = 0; t < s.total(); ++t) {
            const auto g = s.find(t);
            CHECK((g == 4 || g == 5));
        }
        CHECK(s.total() == 10);
    }

    TEST_CASE("sampler updates track a naive prefix scan")
    {
        Rng rng(12);
        std::vector<std::uint64_t> w(37);
        for (auto& v : w) {
            v = uniform_below(rng, 50);
        }
        w[0] = 1;
        FenwickSampler s(w);
        for (int step = 0; step < 300; ++step) {
            const auto i = uniform_below(rng, w.size());
            w[i] = uniform_below(rng, 50);
            s.set(i, w[i]);
            std::uint64_t total = 0;
            for (auto v : w) {
                total += v;
            }
            REQUIRE(s.total() == total);
            if (total == 0) {
                continue;
            }
            const auto t = uniform_below(rng, total);
            std::size_t expect = 0;
            std::uint64_t acc = 0;
            while (acc + w[expect] <= t) {
                acc += w[expect++];
            }
            CHECK(s.find(t) == expect);
        }
    }

    TEST_CASE("mutation bookkeeping")
    {
        const TileDatabase db = stepped_db();
        const MosaicProblem p(testutil::constant_image(1, 30, 0), {1, 3}, db, 2);
        Assignment a = make_assignment(p, {5, 5, 7});
        CHECK(a.usage(5) == 2);
        CHECK(a.usage(7) == 1);
        a.apply_mutation(0, 2, p.block_tile_sad(0, 2));
        CHECK(a.usage(5) == 1);
        CHECK(a.usage(2) == 1);
        CHECK(a.tile_at(0) == 2);
        CHECK(a.check_consistency(p).empty());
        CHECK(a.below_average(0));
        CHECK(!a.below_average(2));
        CHECK_THROWS_AS(make_assignment(p, {1, 1, 1}), MosaicError);
    }

    TEST_CASE("random mutations keep every invariant")
    {
        const TileDatabase db = testutil::random_db(15, {3, 3}, 31);
        const MosaicProblem p(testutil::random_image(12, 15, 32), {4, 5}, db, 2);
        Rng rng(33);
        std::vector<int> x;
        for (std::size_t l = 0; l < p.num_blocks(); ++l) {
            x.push_back(static_cast<int>(l % db.size()));
        }
        Assignment a = make_assignment(p, x);
        int applied = 0;
        for (int step = 0; step < 1000; ++step) {
            const auto g = uniform_below(rng, p.num_blocks());
            const auto k = static_cast<int>(uniform_below(rng, db.size()));
            const auto sad = p.block_tile_sad(g, static_cast<std::size_t>(k));
            if (a.usage(static_cast<std::size_t>(k)) < p.max_uses() && sad < a.block_sad(g)) {
                a.apply_mutation(g, k, sad);
                ++applied;
            }
            REQUIRE(a.check_consistency(p).empty());
            std::vector<int> recount(db.size(), 0);
            std::uint64_t total = 0;
            for (std::size_t l = 0; l < p.num_blocks(); ++l) {
                ++recount[static_cast<std::size_t>(a.tile_at(l))];
                total += p.block_tile_sad(l, static_cast<std::size_t>(a.tile_at(l)));
            }
            REQUIRE(recount == a.usage());
            REQUIRE(total == a.total_sad());
            REQUIRE(a.overall_fitness() == doctest::Approx(p.overall_fitness(a.tiles())).epsilon(1e-12));
        }
        CHECK(applied > 10);
    }

    TEST_CASE("sum_abs_diff agrees with a plain loop")
    {
        Rng rng(2);
        for (std::size_t n : {0u, 1u, 7u, 64u, 3072u, 5000u}) {
            const auto a = testutil::random_bytes(rng, n);
            const auto b = testutil::random_bytes(rng, n);
            std::uint64_t expect = 0;
            for (std::size_t i = 0; i < n; ++i) {
                expect += static_cast<std::uint64_t>(std::abs(int{a[i]} - int{b[i]}));
            }
            CHECK(sum_abs_diff(a.data(), b.data(), n) == expect);
        }
    }
}
