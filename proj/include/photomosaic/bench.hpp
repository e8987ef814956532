#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "photomosaic/clustering.hpp"
#include "photomosaic/convergence.hpp"
#include "photomosaic/image.hpp"
#include "photomosaic/optimizers.hpp"
#include "photomosaic/problem.hpp"
#include "photomosaic/tiledb.hpp"

namespace photomosaic {

/// Where a target image comes from: a file, or the procedural scene
/// generator (handy for running the harness without a photo collection).
struct ImageSource {
    std::string id;
    std::filesystem::path path;
    std::optional<std::uint64_t> synthetic_seed;
    int synthetic_height = 0;
    int synthetic_width = 0;
};

struct TileSource {
    std::filesystem::path directory;
    std::filesystem::path cache;
    std::size_t synthetic_count = 0;
    std::uint64_t synthetic_seed = 0;
};

struct ExperimentConfig {
    std::vector<ImageSource> images;
    TileSource tiles;
    TileSize tile_size{32, 32};
    GridSize grid{80, 100};
    int max_uses = 5;
    int clusters = 90;
    int bins = 15;
    std::uint64_t cluster_seed = 1;
    std::vector<Algorithm> algorithms{Algorithm::cep, Algorithm::rii, Algorithm::greedy};
    std::uint64_t max_evaluations = 1'600'000;
    double alpha = 0.75;
    std::vector<std::uint64_t> seeds{1};
    std::uint64_t log_stride = 1000;
    std::string reference = "cep";
    std::filesystem::path output_dir = "bench_out";
    unsigned threads = 0;
    bool write_convergence = true;
};

/// Parses the JSON config format documented in the README. Relative paths
/// resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct RunSummary {
    std::string algorithm;
    std::string image;
    std::uint64_t seed = 0;
    double final_mae = 0.0;
    std::uint64_t evaluations = 0;
    std::int64_t wall_ms = 0;
    bool failed = false;
    std::string error;
};

struct CellResult {
    RunSummary summary;
    ConvergenceLog log;
};

/// A loaded target, or the reason it could not be loaded.
struct TargetImage {
    std::string id;
    std::optional<Image> image;
    std::string error;
};

struct RunPlan {
    GridSize grid{80, 100};
    int max_uses = 5;
    std::vector<Algorithm> algorithms{Algorithm::cep, Algorithm::rii, Algorithm::greedy};
    std::vector<std::uint64_t> seeds{1};
    CepParams params;
    unsigned threads = 0;
};

/// Runs every (algorithm, image, seed) cell, concurrently across `threads`
/// workers. Results come back in (image, algorithm, seed) order regardless
/// of scheduling. Greedy is deterministic, so it runs once per image and
/// its result is reported under every seed.
std::vector<CellResult> run_cells(const std::vector<TargetImage>& targets, const TileDatabase& db,
                                  const ClusterModel& clusters, const RunPlan& plan);

/// Loads inputs, clusters the tiles, runs all cells and writes summary.csv,
/// report.csv and the per-run convergence CSVs into config.output_dir.
std::vector<RunSummary> run_experiment(const ExperimentConfig& config, std::ostream* progress = nullptr);

struct ReportColumn {
    std::string algorithm;
    std::size_t runs = 0;
    double mean_mae = 0.0;
    double stddev_mae = 0.0;
    /// Two-sided Mann-Whitney p against the reference; empty for the
    /// reference itself.
    std::optional<double> p_value;
    double mean_wall_seconds = 0.0;
};

/// One column per algorithm (in first-appearance order), failed runs excluded.
std::vector<ReportColumn> summarize(const std::vector<RunSummary>& runs, const std::string& reference);

/// Header: algorithm,image,seed,final_mae,evaluations,wall_ms.
void write_summary_csv(const std::vector<RunSummary>& runs, const std::filesystem::path& path);

/// Comparison table: rows "Average MAE value", "Standard deviation",
/// "P-value", "Average running time"; one column per algorithm.
void write_report_csv(const std::vector<ReportColumn>& columns, const std::filesystem::path& path);
std::string format_report(const std::vector<ReportColumn>& columns);

/// "convergence_<alg>_<image>_<seed>.csv"
std::string convergence_file_name(const RunSummary& run);

} // namespace photomosaic
