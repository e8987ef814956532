#include "photomosaic/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "photomosaic/error.hpp"
#include "photomosaic/stats.hpp"
#include "photomosaic/synthetic.hpp"

namespace photomosaic {

namespace {

using json = nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where)
{
    for (const auto& [key, _] : obj.items()) {
        if (!known.contains(key)) {
            throw MosaicError("unknown key '" + key + "' in " + where);
        }
    }
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text, const std::filesystem::path& base_dir)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw MosaicError(std::string("bench config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw MosaicError("bench config must be a JSON object");
    }
    reject_unknown(j,
                   {"images", "tiles", "tile_size", "grid", "nredu", "clusters", "bins", "cluster_seed", "algorithms",
                    "max_evaluations", "alpha", "seeds", "seed_count", "log_stride", "reference", "output_dir",
                    "threads", "write_convergence"},
                   "bench config");

    ExperimentConfig c;
    try {
        if (j.contains("tile_size")) {
            c.tile_size = parse_tile_size(j["tile_size"].get<std::string>());
        }
        if (j.contains("grid")) {
            c.grid = parse_grid(j["grid"].get<std::string>());
        }
        c.max_uses = j.value("nredu", c.max_uses);
        c.clusters = j.value("clusters", c.clusters);
        c.bins = j.value("bins", c.bins);
        c.cluster_seed = j.value("cluster_seed", c.cluster_seed);
        c.max_evaluations = j.value("max_evaluations", c.max_evaluations);
        c.alpha = j.value("alpha", c.alpha);
        c.log_stride = j.value("log_stride", c.log_stride);
        c.reference = j.value("reference", c.reference);
        c.threads = j.value("threads", c.threads);
        c.write_convergence = j.value("write_convergence", c.write_convergence);
        c.output_dir = resolve(base_dir, j.value("output_dir", c.output_dir.string()));

        if (j.contains("algorithms")) {
            c.algorithms.clear();
            for (const auto& a : j["algorithms"]) {
                c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
            }
        }
        if (j.contains("seeds") && j.contains("seed_count")) {
            throw MosaicError("bench config: give either 'seeds' or 'seed_count', not both");
        }
        if (j.contains("seeds")) {
            c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        } else if (j.contains("seed_count")) {
            const auto count = j["seed_count"].get<std::uint64_t>();
            c.seeds.clear();
            for (std::uint64_t s = 1; s <= count; ++s) {
                c.seeds.push_back(s);
            }
        }

        if (!j.contains("images") || !j["images"].is_array() || j["images"].empty()) {
            throw MosaicError("bench config needs a non-empty 'images' array");
        }
        for (const auto& item : j["images"]) {
            ImageSource src;
            if (item.is_string()) {
                src.path = resolve(base_dir, item.get<std::string>());
                src.id = src.path.stem().string();
            } else {
                reject_unknown(item, {"path", "id", "synthetic_seed", "size"}, "image entry");
                if (item.contains("synthetic_seed")) {
                    src.synthetic_seed = item["synthetic_seed"].get<std::uint64_t>();
                    const TileSize size = parse_tile_size(item.value("size", std::string("640x800")));
                    src.synthetic_height = size.height;
                    src.synthetic_width = size.width;
                    src.id = item.value("id", "synthetic" + std::to_string(*src.synthetic_seed));
                } else {
                    src.path = resolve(base_dir, item.at("path").get<std::string>());
                    src.id = item.value("id", src.path.stem().string());
                }
            }
            c.images.push_back(std::move(src));
        }

        if (!j.contains("tiles") || !j["tiles"].is_object()) {
            throw MosaicError("bench config needs a 'tiles' object");
        }
        const auto& t = j["tiles"];
        reject_unknown(t, {"directory", "cache", "synthetic_count", "synthetic_seed"}, "tiles entry");
        if (t.contains("directory")) {
            c.tiles.directory = resolve(base_dir, t["directory"].get<std::string>());
        }
        if (t.contains("cache")) {
            c.tiles.cache = resolve(base_dir, t["cache"].get<std::string>());
        }
        c.tiles.synthetic_count = t.value("synthetic_count", std::size_t{0});
        c.tiles.synthetic_seed = t.value("synthetic_seed", std::uint64_t{0});
        const int sources = (c.tiles.directory.empty() ? 0 : 1) + (c.tiles.cache.empty() ? 0 : 1) +
                            (c.tiles.synthetic_count == 0 ? 0 : 1);
        if (sources != 1) {
            throw MosaicError("tiles entry needs exactly one of 'directory', 'cache', 'synthetic_count'");
        }
    } catch (const json::exception& e) {
        throw MosaicError(std::string("bench config has a wrongly typed field: ") + e.what());
    }

    if (c.seeds.empty()) {
        throw MosaicError("bench config needs at least one seed");
    }
    if (c.algorithms.empty()) {
        throw MosaicError("bench config needs at least one algorithm");
    }
    if (c.max_uses < 1) {
        throw MosaicError("nredu must be >= 1");
    }
    CepParams{c.alpha, c.max_evaluations, 0, c.log_stride}.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw MosaicError("cannot open bench config: " + path.string());
    }
    std::stringstream text;
    text << in.rdbuf();
    return parse_experiment_config(text.str(), path.parent_path());
}

std::vector<CellResult> run_cells(const std::vector<TargetImage>& targets, const TileDatabase& db,
                                  const ClusterModel& clusters, const RunPlan& plan)
{
    const std::size_t n_alg = plan.algorithms.size();
    const std::size_t n_seed = plan.seeds.size();
    std::vector<CellResult> results(targets.size() * n_alg * n_seed);
    auto slot = [&](std::size_t img, std::size_t alg, std::size_t seed) -> CellResult& {
        return results[(img * n_alg + alg) * n_seed + seed];
    };

    std::vector<std::unique_ptr<MosaicProblem>> problems(targets.size());
    std::vector<std::string> errors(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!targets[i].image) {
            errors[i] = targets[i].error.empty() ? "image unavailable" : targets[i].error;
            continue;
        }
        try {
            problems[i] = std::make_unique<MosaicProblem>(*targets[i].image, plan.grid, db, plan.max_uses);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }

    struct Task {
        std::size_t image;
        std::size_t algorithm;
        std::size_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t a = 0; a < n_alg; ++a) {
            const bool deterministic = plan.algorithms[a] == Algorithm::greedy;
            for (std::size_t s = 0; s < (deterministic ? 1 : n_seed); ++s) {
                tasks.push_back({i, a, s});
            }
        }
    }

    auto run_task = [&](const Task& t) {
        const Algorithm alg = plan.algorithms[t.algorithm];
        CellResult& out = slot(t.image, t.algorithm, t.seed);
        out.summary.algorithm = std::string(algorithm_name(alg));
        out.summary.image = targets[t.image].id;
        out.summary.seed = plan.seeds[t.seed];
        if (!problems[t.image]) {
            out.summary.failed = true;
            out.summary.error = errors[t.image];
            return;
        }
        try {
            CepParams params = plan.params;
            params.seed = plan.seeds[t.seed];
            SolveResult r = alg == Algorithm::cep   ? cep_solve(*problems[t.image], clusters, params)
                            : alg == Algorithm::rii ? rii_solve(*problems[t.image], params)
                                                    : greedy_solve(*problems[t.image]);
            out.summary.final_mae = r.assignment.overall_fitness();
            out.summary.evaluations = r.evaluations_used;
            out.summary.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(r.wall_time).count();
            out.log = std::move(r.log);
        } catch (const std::exception& e) {
            out.summary.failed = true;
            out.summary.error = e.what();
        }
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            run_task(tasks[i]);
        }
    };
    unsigned threads = plan.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : plan.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(tasks.size(), 1)));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }

    // Replicate the single greedy run under every seed label.
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t a = 0; a < n_alg; ++a) {
            if (plan.algorithms[a] != Algorithm::greedy) {
                continue;
            }
            for (std::size_t s = 1; s < n_seed; ++s) {
                slot(i, a, s) = slot(i, a, 0);
                slot(i, a, s).summary.seed = plan.seeds[s];
            }
        }
    }
    return results;
}

std::vector<RunSummary> run_experiment(const ExperimentConfig& config, std::ostream* progress)
{
    auto say = [&](const std::string& msg) {
        if (progress != nullptr) {
            *progress << msg << std::endl;
        }
    };

    TileDatabase db;
    if (!config.tiles.cache.empty()) {
        db = load_cache(config.tiles.cache, config.tile_size);
    } else if (!config.tiles.directory.empty()) {
        db = ingest_tiles(config.tiles.directory, config.tile_size, config.bins);
    } else {
        db = synthetic_database(config.tiles.synthetic_count, config.tile_size, config.bins,
                                config.tiles.synthetic_seed);
    }
    say("tiles: " + std::to_string(db.size()) + " of " + format_tile_size(db.tile_size()));

    const ClusterModel clusters = kmeans(db, {config.clusters, config.cluster_seed, 100}).model;
    say("clusters: " + std::to_string(clusters.num_clusters()));

    std::vector<TargetImage> targets;
    for (const auto& src : config.images) {
        TargetImage t{src.id, std::nullopt, {}};
        try {
            t.image = src.synthetic_seed
                          ? synthetic_scene(src.synthetic_height, src.synthetic_width, *src.synthetic_seed)
                          : load_image(src.path);
        } catch (const std::exception& e) {
            t.error = e.what();
            say("warning: " + t.error);
        }
        targets.push_back(std::move(t));
    }

    RunPlan plan;
    plan.grid = config.grid;
    plan.max_uses = config.max_uses;
    plan.algorithms = config.algorithms;
    plan.seeds = config.seeds;
    plan.params = CepParams{config.alpha, config.max_evaluations, 0, config.log_stride};
    plan.threads = config.threads;
    say("running " + std::to_string(targets.size() * plan.algorithms.size() * plan.seeds.size()) + " cells");
    std::vector<CellResult> cells = run_cells(targets, db, clusters, plan);

    std::filesystem::create_directories(config.output_dir);
    std::vector<RunSummary> summaries;
    for (const auto& cell : cells) {
        if (cell.summary.failed) {
            say("cell failed: " + cell.summary.algorithm + " " + cell.summary.image + " seed " +
                std::to_string(cell.summary.seed) + ": " + cell.summary.error);
        } else if (config.write_convergence) {
            cell.log.write_csv(config.output_dir / convergence_file_name(cell.summary));
        }
        summaries.push_back(cell.summary);
    }
    write_summary_csv(summaries, config.output_dir / "summary.csv");
    const auto columns = summarize(summaries, config.reference);
    write_report_csv(columns, config.output_dir / "report.csv");
    if (progress != nullptr) {
        *progress << format_report(columns);
    }
    return summaries;
}

std::vector<ReportColumn> summarize(const std::vector<RunSummary>& runs, const std::string& reference)
{
    std::vector<std::string> order;
    for (const auto& r : runs) {
        if (!r.failed && std::find(order.begin(), order.end(), r.algorithm) == order.end()) {
            order.push_back(r.algorithm);
        }
    }
    auto sample = [&](const std::string& alg) {
        std::vector<double> maes;
        for (const auto& r : runs) {
            if (!r.failed && r.algorithm == alg) {
                maes.push_back(r.final_mae);
            }
        }
        return maes;
    };
    const std::vector<double> ref = sample(reference);

    std::vector<ReportColumn> columns;
    for (const auto& alg : order) {
        const std::vector<double> maes = sample(alg);
        double wall = 0.0;
        for (const auto& r : runs) {
            if (!r.failed && r.algorithm == alg) {
                wall += static_cast<double>(r.wall_ms) / 1000.0;
            }
        }
        ReportColumn col{alg, maes.size(), mean(maes), sample_stddev(maes), std::nullopt,
                         wall / static_cast<double>(maes.size())};
        if (alg != reference && !ref.empty()) {
            col.p_value = mann_whitney_u(ref, maes).p;
        }
        columns.push_back(std::move(col));
    }
    return columns;
}

void write_summary_csv(const std::vector<RunSummary>& runs, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw MosaicError("cannot write " + path.string());
    }
    out << "algorithm,image,seed,final_mae,evaluations,wall_ms\n";
    for (const auto& r : runs) {
        out << r.algorithm << ',' << r.image << ',' << r.seed << ',' << (r.failed ? "nan" : format_double(r.final_mae))
            << ',' << r.evaluations << ',' << r.wall_ms << '\n';
    }
}

namespace {

std::vector<std::pair<std::string, std::vector<std::string>>> report_rows(const std::vector<ReportColumn>& columns)
{
    std::vector<std::pair<std::string, std::vector<std::string>>> rows{
        {"Average MAE value", {}}, {"Standard deviation", {}}, {"P-value", {}}, {"Average running time", {}}};
    char buf[64];
    for (const auto& c : columns) {
        std::snprintf(buf, sizeof buf, "%.4f", c.mean_mae);
        rows[0].second.emplace_back(buf);
        std::snprintf(buf, sizeof buf, "%.4f", c.stddev_mae);
        rows[1].second.emplace_back(buf);
        if (c.p_value) {
            std::snprintf(buf, sizeof buf, "%.4g", *c.p_value);
            rows[2].second.emplace_back(buf);
        } else {
            rows[2].second.emplace_back("NA");
        }
        std::snprintf(buf, sizeof buf, "%.2fs", c.mean_wall_seconds);
        rows[3].second.emplace_back(buf);
    }
    return rows;
}

} // namespace

void write_report_csv(const std::vector<ReportColumn>& columns, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw MosaicError("cannot write " + path.string());
    }
    out << "metric";
    for (const auto& c : columns) {
        out << ',' << c.algorithm;
    }
    out << '\n';
    for (const auto& [label, cells] : report_rows(columns)) {
        out << label;
        for (const auto& cell : cells) {
            out << ',' << cell;
        }
        out << '\n';
    }
}

std::string format_report(const std::vector<ReportColumn>& columns)
{
    const auto rows = report_rows(columns);
    std::size_t label_width = 0;
    for (const auto& [label, _] : rows) {
        label_width = std::max(label_width, label.size());
    }
    std::vector<std::size_t> widths;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        std::size_t w = columns[i].algorithm.size();
        for (const auto& [_, cells] : rows) {
            w = std::max(w, cells[i].size());
        }
        widths.push_back(w);
    }
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(label_width)) << "";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out << "  " << std::setw(static_cast<int>(widths[i])) << columns[i].algorithm;
    }
    out << '\n';
    for (const auto& [label, cells] : rows) {
        out << std::setw(static_cast<int>(label_width)) << label;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << "  " << std::setw(static_cast<int>(widths[i])) << cells[i];
        }
        out << '\n';
    }
    return out.str();
}

std::string convergence_file_name(const RunSummary& run)
{
    return "convergence_" + run.algorithm + "_" + run.image + "_" + std::to_string(run.seed) + ".csv";
}

} // namespace photomosaic
