#include <doctest.h>

#include "helpers.hpp"
#include "photomosaic/bench.hpp"
#include "photomosaic/error.hpp"

using namespace photomosaic;

namespace {

RunSummary run(const std::string& alg, double mae, std::int64_t ms = 1000)
{
    RunSummary r;
    r.algorithm = alg;
    r.image = "img";
    r.final_mae = mae;
    r.wall_ms = ms;
    return r;
}

} // namespace

TEST_SUITE("bench")
{
    TEST_CASE("every algorithm, image and seed gets a cell")
    {
        const TileDatabase db = testutil::random_db(30, {4, 4}, 1);
        const ClusterModel m = kmeans(db, {3, 1, 100}).model;
        std::vector<TargetImage> targets;
        for (int i = 0; i < 3; ++i) {
            targets.push_back({"img" + std::to_string(i), testutil::random_image(12, 16, 10 + i), {}});
        }
        RunPlan plan;
        plan.grid = {3, 4};
        plan.max_uses = 2;
        plan.algorithms = {Algorithm::cep, Algorithm::rii};
        plan.seeds = {7};
        plan.params.max_evaluations = 500;
        plan.threads = 2;
        const auto cells = run_cells(targets, db, m, plan);
        REQUIRE(cells.size() == 6);
        CHECK(cells[0].summary.algorithm == "cep");
        CHECK(cells[1].summary.algorithm == "rii");
        CHECK(cells[5].summary.image == "img2");
        for (const auto& c : cells) {
            CHECK(!c.summary.failed);
            CHECK(c.summary.evaluations == 500);
        }
        const auto again = run_cells(targets, db, m, plan);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            CHECK(again[i].summary.final_mae == cells[i].summary.final_mae);
            CHECK(again[i].summary.evaluations == cells[i].summary.evaluations);
        }
    }

    TEST_CASE("a missing image fails only its own cells")
    {
        const TileDatabase db = testutil::random_db(20, {4, 4}, 2);
        const ClusterModel m = kmeans(db, {2, 1, 100}).model;
        std::vector<TargetImage> targets{{"ok", testutil::random_image(8, 8, 3), {}}, {"gone", std::nullopt, "no file"}};
        RunPlan plan;
        plan.grid = {2, 2};
        plan.algorithms = {Algorithm::greedy, Algorithm::cep};
        plan.seeds = {1, 2};
        plan.params.max_evaluations = 100;
        plan.threads = 1;
        const auto cells = run_cells(targets, db, m, plan);
        REQUIRE(cells.size() == 8);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(!cells[i].summary.failed);
        }
        for (std::size_t i = 4; i < 8; ++i) {
            CHECK(cells[i].summary.failed);
            CHECK(cells[i].summary.error == "no file");
        }
        // Greedy runs once and is reported under both seeds.
        CHECK(cells[0].summary.final_mae == cells[1].summary.final_mae);
        CHECK(cells[1].summary.seed == 2);
    }

    TEST_CASE("summary statistics and report layout")
    {
        const std::vector<RunSummary> runs{run("cep", 0.1), run("cep", 0.2), run("cep", 0.3), run("rii", 0.4, 3000)};
        const auto cols = summarize(runs, "cep");
        REQUIRE(cols.size() == 2);
        CHECK(cols[0].mean_mae == doctest::Approx(0.2));
        CHECK(cols[0].stddev_mae == doctest::Approx(0.1));
        CHECK(!cols[0].p_value);
        REQUIRE(cols[1].p_value);
        CHECK(cols[1].mean_wall_seconds == doctest::Approx(3.0));
        const std::string text = format_report(cols);
        for (const char* label : {"Average MAE value", "Standard deviation", "P-value", "Average running time"}) {
            CHECK(text.find(label) != std::string::npos);
        }
        const auto self = summarize({run("cep", 0.1), run("cep", 0.2), run("cep2", 0.1), run("cep2", 0.2)}, "cep");
        CHECK(*self[1].p_value >= 0.99);
    }

    TEST_CASE("config parsing")
    {
        const ExperimentConfig c = parse_experiment_config(R"({
            "images": ["a.png", {"synthetic_seed": 3, "size": "64x80", "id": "syn"}],
            "tiles": {"cache": "tiles.bin"},
            "grid": "2x5", "tile_size": "16x16", "nredu": 3, "clusters": 4,
            "algorithms": ["cep", "greedy"], "seed_count": 3, "max_evaluations": 1000
        })",
                                                           "/data");
        REQUIRE(c.images.size() == 2);
        CHECK(c.images[0].path == "/data/a.png");
        CHECK(c.images[0].id == "a");
        CHECK(c.images[1].synthetic_height == 64);
        CHECK(c.tiles.cache == "/data/tiles.bin");
        CHECK(c.grid == GridSize{2, 5});
        CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
        CHECK(c.algorithms.size() == 2);
        CHECK_THROWS_AS(parse_experiment_config(R"({"images": ["a.png"], "tiles": {"cache": "x"}, "bogus": 1})"),
                        MosaicError);
        CHECK_THROWS_AS(parse_experiment_config(R"({"images": [], "tiles": {"cache": "x"}})"), MosaicError);
        CHECK_THROWS_AS(parse_experiment_config(R"({"images": ["a"], "tiles": {}})"), MosaicError);
        CHECK_THROWS_AS(parse_experiment_config(R"({"images": ["a"], "tiles": {"cache": "x"}, "nredu": 0})"),
                        MosaicError);
        CHECK_THROWS_AS(parse_experiment_config("{not json"), MosaicError);
    }

    TEST_CASE("experiment writes its outputs")
    {
        const auto dir = testutil::scratch_dir("bench_run");
        ExperimentConfig c = parse_experiment_config(R"({
            "images": [{"synthetic_seed": 1, "size": "32x40"}, "missing.png"],
            "tiles": {"synthetic_count": 40, "synthetic_seed": 2},
            "grid": "4x5", "tile_size": "8x8", "clusters": 4, "nredu": 2,
            "seeds": [1, 2], "max_evaluations": 400, "log_stride": 100, "threads": 1
        })",
                                                     dir);
        c.output_dir = dir / "out";
        const auto runs = run_experiment(c);
        CHECK(runs.size() == 12);
        CHECK(std::filesystem::exists(dir / "out" / "summary.csv"));
        CHECK(std::filesystem::exists(dir / "out" / "report.csv"));
        CHECK(std::filesystem::exists(dir / "out" / "convergence_cep_synthetic1_2.csv"));
        CHECK(testutil::read_file(dir / "out" / "summary.csv").find("nan") != std::string::npos);
    }
}
