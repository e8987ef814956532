#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "photomosaic/clustering.hpp"
#include "photomosaic/error.hpp"
#include "photomosaic/image.hpp"
#include "photomosaic/optimizers.hpp"
#include "photomosaic/render.hpp"
#include "photomosaic/stats.hpp"
#include "photomosaic/synthetic.hpp"
#include "photomosaic/tiledb.hpp"

namespace py = pybind11;
using namespace photomosaic;

namespace {

using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

ByteArray to_array(const Image& img)
{
    ByteArray out({img.height, img.width, 3});
    std::memcpy(out.mutable_data(), img.rgb.data(), img.rgb.size());
    return out;
}

Image from_array(const ByteArray& a)
{
    if (a.ndim() != 3 || a.shape(2) != 3) {
        throw MosaicError("expected an H x W x 3 uint8 array");
    }
    Image img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::memcpy(img.rgb.data(), a.data(), img.rgb.size());
    return img;
}

TileSize tile_size(std::pair<int, int> hw)
{
    return {hw.first, hw.second};
}

py::dict solve(const ByteArray& image, const TileDatabase& db, std::pair<int, int> grid, int nredu,
               const std::string& algorithm, const ClusterModel* clusters, std::uint64_t max_evaluations,
               double alpha, std::uint64_t seed, std::uint64_t log_stride)
{
    const Image target = from_array(image);
    const Algorithm alg = parse_algorithm(algorithm);
    const MosaicProblem problem(target, {grid.first, grid.second}, db, nredu);
    const CepParams params{alpha, max_evaluations, seed, log_stride};
    if (alg == Algorithm::cep && clusters == nullptr) {
        throw MosaicError("cep needs a cluster model (see photomosaic.cluster)");
    }
    SolveResult r = [&] {
        py::gil_scoped_release release;
        switch (alg) {
        case Algorithm::cep:
            return cep_solve(problem, *clusters, params);
        case Algorithm::rii:
            return rii_solve(problem, params);
        case Algorithm::greedy:
            break;
        }
        return greedy_solve(problem);
    }();
    py::list log;
    for (const auto& s : r.log.samples()) {
        log.append(py::make_tuple(s.evaluations, s.fitness, s.wall_ms));
    }
    py::dict out;
    out["tiles"] = r.assignment.tiles();
    out["fitness"] = r.assignment.overall_fitness();
    out["evaluations"] = r.evaluations_used;
    out["wall_seconds"] = std::chrono::duration<double>(r.wall_time).count();
    out["convergence"] = log;
    return out;
}

ByteArray render_tiles(const ByteArray& image, const TileDatabase& db, std::pair<int, int> grid,
                       const std::vector<int>& tiles)
{
    const GridSize g{grid.first, grid.second};
    // Rendering ignores the reuse cap; any cap that admits the vector will do.
    const MosaicProblem problem(from_array(image), g, db, static_cast<int>(g.blocks()));
    return to_array(render(problem, tiles));
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Photomosaic tile assignment engine";

    py::register_exception<MosaicError>(m, "MosaicError", PyExc_ValueError);

    py::class_<TileDatabase>(m, "TileDatabase")
        .def_property_readonly("tile_size",
                               [](const TileDatabase& db) {
                                   return std::make_pair(db.tile_size().height, db.tile_size().width);
                               })
        .def_property_readonly("bins", &TileDatabase::bins_per_channel)
        .def("__len__", &TileDatabase::size)
        .def("tile",
             [](const TileDatabase& db, std::size_t id) {
                 const Tile& t = db.tile(id);
                 Image img(db.tile_size().height, db.tile_size().width);
                 img.rgb = t.pixels;
                 return to_array(img);
             })
        .def("source_path", [](const TileDatabase& db, std::size_t id) { return db.tile(id).source_path; })
        .def("histograms",
             [](const TileDatabase& db) {
                 const auto h = db.histogram_matrix();
                 const auto cols = static_cast<py::ssize_t>(3 * db.bins_per_channel());
                 py::array_t<double> out({static_cast<py::ssize_t>(db.size()), cols});
                 std::memcpy(out.mutable_data(), h.data(), h.size() * sizeof(double));
                 return out;
             })
        .def("save", [](const TileDatabase& db, const std::filesystem::path& path) { save_cache(db, path); })
        .def_static(
            "load",
            [](const std::filesystem::path& path, std::optional<std::pair<int, int>> size) {
                return load_cache(path, size ? std::optional<TileSize>(tile_size(*size)) : std::nullopt);
            },
            py::arg("path"), py::arg("tile_size") = py::none());

    py::class_<ClusterModel>(m, "ClusterModel")
        .def_property_readonly("num_clusters", &ClusterModel::num_clusters)
        .def_property_readonly("assignment", &ClusterModel::assignment)
        .def("cluster_of", &ClusterModel::cluster_of)
        .def("members", [](const ClusterModel& c, int k) {
            const auto s = c.members(k);
            return std::vector<int>(s.begin(), s.end());
        });

    m.def(
        "ingest",
        [](const std::filesystem::path& dir, std::pair<int, int> size, int bins) {
            IngestReport report;
            TileDatabase db = ingest_tiles(dir, tile_size(size), bins, &report);
            return py::make_tuple(std::move(db), report.skipped);
        },
        py::arg("directory"), py::arg("tile_size") = std::make_pair(32, 32), py::arg("bins") = 15,
        "Decode a tile directory. Returns (database, skipped_paths).");

    m.def(
        "synthetic_database",
        [](std::size_t count, std::pair<int, int> size, int bins, std::uint64_t seed) {
            return synthetic_database(count, tile_size(size), bins, seed);
        },
        py::arg("count"), py::arg("tile_size") = std::make_pair(32, 32), py::arg("bins") = 15, py::arg("seed") = 0);

    m.def(
        "synthetic_scene", [](int h, int w, std::uint64_t seed) { return to_array(synthetic_scene(h, w, seed)); },
        py::arg("height"), py::arg("width"), py::arg("seed") = 0);

    m.def(
        "cluster",
        [](const TileDatabase& db, int clusters, std::uint64_t seed, int max_iters) {
            return kmeans(db, {clusters, seed, max_iters}).model;
        },
        py::arg("db"), py::arg("clusters") = 90, py::arg("seed") = 1, py::arg("max_iters") = 100);

    m.def("solve", &solve, py::arg("image"), py::arg("db"), py::arg("grid") = std::make_pair(80, 100),
          py::arg("nredu") = 5, py::arg("algorithm") = "cep", py::arg("clusters") = nullptr,
          py::arg("max_evaluations") = 1'600'000, py::arg("alpha") = 0.75, py::arg("seed") = 1,
          py::arg("log_stride") = 1000,
          "Assign tiles to the blocks of `image`. Returns a dict with tiles, fitness, evaluations, "
          "wall_seconds and convergence [(evaluations, fitness, wall_ms), ...].");

    m.def("render", &render_tiles, py::arg("image"), py::arg("db"), py::arg("grid"), py::arg("tiles"));

    m.def(
        "load_image", [](const std::filesystem::path& p) { return to_array(load_image(p)); }, py::arg("path"));
    m.def(
        "save_image", [](const ByteArray& a, const std::filesystem::path& p) { save_image(from_array(a), p); },
        py::arg("image"), py::arg("path"));

    m.def(
        "mann_whitney_u",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            const auto r = mann_whitney_u(a, b);
            return py::make_tuple(r.u, r.p, r.exact);
        },
        py::arg("a"), py::arg("b"), "Two-sided test. Returns (U, p, exact).");
}
