#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "photomosaic/bench.hpp"
#include "photomosaic/clustering.hpp"
#include "photomosaic/error.hpp"
#include "photomosaic/optimizers.hpp"
#include "photomosaic/problem.hpp"
#include "photomosaic/render.hpp"
#include "photomosaic/synthetic.hpp"
#include "photomosaic/tiledb.hpp"

namespace photomosaic::cli {

namespace {

struct IngestArgs {
    std::string tiles;
    std::string tile_size = "32x32";
    std::string cache;
    int bins = 15;
};

struct ClusterArgs {
    std::string cache;
    int clusters = 90;
    std::optional<int> bins;
    std::uint64_t seed = 1;
    int max_iters = 100;
    std::string out;
};

struct SolveArgs {
    std::string image;
    std::string cache;
    std::string clusters_model;
    std::string grid = "80x100";
    int nredu = 5;
    double alpha = 0.75;
    std::uint64_t max_evals = 1'600'000;
    std::string algorithm = "cep";
    std::uint64_t seed = 1;
    int clusters = 90;
    std::uint64_t cluster_seed = 1;
    std::uint64_t log_stride = 1000;
    std::string out_image = "mosaic.png";
    std::string out_log = "convergence.csv";
    std::string out_solution;
};

struct RenderArgs {
    std::string image;
    std::string cache;
    std::string solution;
    std::string out;
};

struct SynthArgs {
    std::string tiles_out;
    std::size_t count = 1000;
    std::string tile_size = "32x32";
    std::string image_out;
    std::string image_size = "2560x3200";
    std::uint64_t seed = 1;
};

// Histograms at a different bin count than the cache was built with.
std::vector<double> histogram_points(const TileDatabase& db, int bins)
{
    if (bins == db.bins_per_channel()) {
        return db.histogram_matrix();
    }
    std::vector<double> points;
    for (const auto& tile : db.tiles()) {
        const auto h = compute_histogram(tile, bins);
        points.insert(points.end(), h.bins.begin(), h.bins.end());
    }
    return points;
}

int do_ingest(const IngestArgs& a, std::ostream& out)
{
    const TileSize size = parse_tile_size(a.tile_size);
    out << "parameters: tiles=" << a.tiles << " tile_size=" << format_tile_size(size) << " bins=" << a.bins
        << " cache=" << a.cache << '\n';
    IngestReport report;
    const TileDatabase db = ingest_tiles(a.tiles, size, a.bins, &report);
    save_cache(db, a.cache);
    out << "ingested " << db.size() << " tiles, skipped " << report.skipped.size() << ", wrote " << a.cache << '\n';
    return 0;
}

int do_cluster(const ClusterArgs& a, std::ostream& out)
{
    const TileDatabase db = load_cache(a.cache);
    const int bins = a.bins.value_or(db.bins_per_channel());
    if (bins < 1) {
        throw MosaicError("--bins must be >= 1");
    }
    out << "parameters: cache=" << a.cache << " clusters=" << a.clusters << " bins=" << bins << " seed=" << a.seed
        << " max_iters=" << a.max_iters << " out=" << a.out << '\n';
    const auto points = histogram_points(db, bins);
    const KMeansResult r = kmeans(points, 3 * static_cast<std::size_t>(bins), {a.clusters, a.seed, a.max_iters});
    write_cluster_model(r.model, a.out);
    out << "k-means: " << r.iterations << " iterations, " << (r.converged ? "converged" : "hit max_iters")
        << ", inertia " << r.model.inertia(points) << '\n';
    return 0;
}

int do_solve(const SolveArgs& a, std::ostream& out)
{
    const GridSize grid = parse_grid(a.grid);
    const Algorithm algorithm = parse_algorithm(a.algorithm);
    if (a.nredu < 1) {
        throw MosaicError("--nredu must be >= 1, got " + std::to_string(a.nredu));
    }
    const CepParams params{a.alpha, a.max_evals, a.seed, a.log_stride};
    params.validate();

    const TileDatabase db = load_cache(a.cache);
    out << "parameters: algorithm=" << a.algorithm << " image=" << a.image << " cache=" << a.cache
        << " tile_size=" << format_tile_size(db.tile_size()) << " tiles=" << db.size() << " grid=" << grid.rows << 'x'
        << grid.cols << " nredu=" << a.nredu << " alpha=" << a.alpha << " max_evals=" << a.max_evals
        << " seed=" << a.seed << " rng=mt19937_64";
    if (algorithm == Algorithm::cep) {
        if (a.clusters_model.empty()) {
            out << " clusters=" << a.clusters << " cluster_seed=" << a.cluster_seed;
        } else {
            out << " clusters_model=" << a.clusters_model;
        }
    }
    out << " log_stride=" << a.log_stride << '\n';

    const Image target = load_image(a.image);
    const MosaicProblem problem(target, grid, db, a.nredu);

    SolveResult result = [&] {
        switch (algorithm) {
        case Algorithm::cep: {
            const ClusterModel model = a.clusters_model.empty()
                                           ? kmeans(db, {a.clusters, a.cluster_seed, 100}).model
                                           : read_cluster_model(a.clusters_model, db);
            return cep_solve(problem, model, params);
        }
        case Algorithm::rii:
            return rii_solve(problem, params);
        case Algorithm::greedy:
            break;
        }
        return greedy_solve(problem);
    }();

    out << "final MAE " << result.assignment.overall_fitness() << " after " << result.evaluations_used
        << " evaluations in " << std::chrono::duration<double>(result.wall_time).count() << " s"
        << (result.stalled ? " (stalled: proposals kept hitting the reuse cap)" : "") << '\n';
    if (!a.out_image.empty()) {
        save_image(render(problem, result.assignment.tiles()), a.out_image);
        out << "wrote " << a.out_image << '\n';
    }
    if (!a.out_log.empty()) {
        result.log.write_csv(a.out_log);
        out << "wrote " << a.out_log << '\n';
    }
    if (!a.out_solution.empty()) {
        write_solution({grid, result.assignment.tiles()}, a.out_solution);
        out << "wrote " << a.out_solution << '\n';
    }
    return 0;
}

int do_render(const RenderArgs& a, std::ostream& out)
{
    out << "parameters: image=" << a.image << " cache=" << a.cache << " solution=" << a.solution << " out=" << a.out
        << '\n';
    const TileDatabase db = load_cache(a.cache);
    const Solution solution = read_solution(a.solution);
    // The cap is irrelevant for rendering; allow any reuse the file contains.
    const int cap = static_cast<int>(std::max<std::size_t>(solution.grid.blocks(), 1));
    const MosaicProblem problem(load_image(a.image), solution.grid, db, cap);
    const Image mosaic = render(problem, solution.tiles);
    save_image(mosaic, a.out);
    out << "MAE " << problem.overall_fitness(solution.tiles) << ", wrote " << a.out << " (" << mosaic.height << 'x'
        << mosaic.width << ")\n";
    return 0;
}

int do_bench(const std::string& config_path, std::ostream& out)
{
    const ExperimentConfig config = load_experiment_config(config_path);
    out << "parameters: config=" << config_path << " images=" << config.images.size() << " grid=" << config.grid.rows
        << 'x' << config.grid.cols << " tile_size=" << format_tile_size(config.tile_size)
        << " nredu=" << config.max_uses << " clusters=" << config.clusters << " bins=" << config.bins
        << " alpha=" << config.alpha << " max_evals=" << config.max_evaluations << " seeds=" << config.seeds.size()
        << " output_dir=" << config.output_dir.string() << '\n';
    const auto runs = run_experiment(config, &out);
    const auto failed = std::count_if(runs.begin(), runs.end(), [](const RunSummary& r) { return r.failed; });
    out << "wrote " << (config.output_dir / "summary.csv").string() << " (" << runs.size() << " runs, " << failed
        << " failed)\n";
    return 0;
}

int do_synth(const SynthArgs& a, std::ostream& out)
{
    const TileSize tile = parse_tile_size(a.tile_size);
    const TileSize image = parse_tile_size(a.image_size);
    out << "parameters: tiles_out=" << a.tiles_out << " count=" << a.count << " tile_size=" << format_tile_size(tile)
        << " image_out=" << a.image_out << " image_size=" << format_tile_size(image) << " seed=" << a.seed << '\n';
    if (a.tiles_out.empty() && a.image_out.empty()) {
        throw MosaicError("synth needs --tiles-out and/or --image-out");
    }
    if (!a.tiles_out.empty()) {
        write_synthetic_tiles(a.tiles_out, a.count, tile, a.seed);
        out << "wrote " << a.count << " tiles to " << a.tiles_out << '\n';
    }
    if (!a.image_out.empty()) {
        save_image(synthetic_scene(image.height, image.width, derive_seed(a.seed, 0xface)), a.image_out);
        out << "wrote " << a.image_out << '\n';
    }
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Photomosaic composition with clustering-based evolutionary programming"};
    app.name("photomosaic");
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Decode a tile directory into a binary tile cache");
    ingest_cmd->add_option("--tiles", ingest.tiles, "Directory of tile images")->required();
    ingest_cmd->add_option("--tile-size", ingest.tile_size, "Tile size HEIGHTxWIDTH")->capture_default_str();
    ingest_cmd->add_option("--cache", ingest.cache, "Output cache file")->required();
    ingest_cmd->add_option("--bins", ingest.bins, "Histogram bins per channel")->capture_default_str();

    ClusterArgs cluster;
    auto* cluster_cmd = app.add_subcommand("cluster", "K-means the tile histograms");
    cluster_cmd->add_option("--cache", cluster.cache, "Tile cache")->required();
    cluster_cmd->add_option("--clusters", cluster.clusters, "Number of clusters K")->capture_default_str();
    cluster_cmd->add_option("--bins", cluster.bins, "Histogram bins per channel (default: the cache's)");
    cluster_cmd->add_option("--seed", cluster.seed, "k-means++ seed")->capture_default_str();
    cluster_cmd->add_option("--max-iters", cluster.max_iters, "Lloyd iteration cap")->capture_default_str();
    cluster_cmd->add_option("--out", cluster.out, "Output cluster model file")->required();

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Compose a photomosaic");
    solve_cmd->add_option("--image", solve.image, "Target image")->required();
    solve_cmd->add_option("--cache", solve.cache, "Tile cache")->required();
    solve_cmd->add_option("--clusters-model", solve.clusters_model,
                          "Cluster model from `cluster` (cep only; clustered on the fly when omitted)");
    solve_cmd->add_option("--grid", solve.grid, "Block grid ROWSxCOLS")->capture_default_str();
    solve_cmd->add_option("--nredu", solve.nredu, "Maximum uses per tile")->capture_default_str();
    solve_cmd->add_option("--alpha", solve.alpha, "Within-cluster mutation probability")->capture_default_str();
    solve_cmd->add_option("--max-evals", solve.max_evals, "Evaluation budget")->capture_default_str();
    solve_cmd->add_option("--algorithm", solve.algorithm, "cep | rii | greedy")
        ->check(CLI::IsMember({"cep", "rii", "greedy"}))
        ->capture_default_str();
    solve_cmd->add_option("--seed", solve.seed, "Random seed")->capture_default_str();
    solve_cmd->add_option("--clusters", solve.clusters, "K when clustering on the fly")->capture_default_str();
    solve_cmd->add_option("--cluster-seed", solve.cluster_seed, "k-means seed when clustering on the fly")
        ->capture_default_str();
    solve_cmd->add_option("--log-stride", solve.log_stride, "Convergence sampling stride")->capture_default_str();
    solve_cmd->add_option("--out-image", solve.out_image, "Write the mosaic (PNG)")->capture_default_str();
    solve_cmd->add_option("--out-log", solve.out_log, "Write the convergence CSV")->capture_default_str();
    solve_cmd->add_option("--out-solution", solve.out_solution, "Write the solution file");

    RenderArgs rend;
    auto* render_cmd = app.add_subcommand("render", "Render a solution file");
    render_cmd->add_option("--image", rend.image, "Target image (defines the block grid geometry)")->required();
    render_cmd->add_option("--cache", rend.cache, "Tile cache")->required();
    render_cmd->add_option("--solution", rend.solution, "Solution file")->required();
    render_cmd->add_option("--out", rend.out, "Output image")->required();

    std::string bench_config;
    auto* bench_cmd = app.add_subcommand("bench", "Run a multi-seed benchmark");
    bench_cmd->add_option("--config", bench_config, "JSON experiment config")->required();

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic tiles and a target scene");
    synth_cmd->add_option("--tiles-out", synth.tiles_out, "Directory for tile PNGs");
    synth_cmd->add_option("--count", synth.count, "Number of tiles")->capture_default_str();
    synth_cmd->add_option("--tile-size", synth.tile_size, "Tile size HEIGHTxWIDTH")->capture_default_str();
    synth_cmd->add_option("--image-out", synth.image_out, "Target scene output path");
    synth_cmd->add_option("--image-size", synth.image_size, "Scene size HEIGHTxWIDTH")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 2;
    }

    try {
        if (*ingest_cmd) {
            return do_ingest(ingest, out);
        }
        if (*cluster_cmd) {
            return do_cluster(cluster, out);
        }
        if (*solve_cmd) {
            return do_solve(solve, out);
        }
        if (*render_cmd) {
            return do_render(rend, out);
        }
        if (*bench_cmd) {
            return do_bench(bench_config, out);
        }
        if (*synth_cmd) {
            return do_synth(synth, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace photomosaic::cli
