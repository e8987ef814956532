#include "photomosaic/render.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "photomosaic/error.hpp"

namespace photomosaic {

Image render(const MosaicProblem& problem, std::span<const int> tiles)
{
    if (tiles.size() != problem.num_blocks()) {
        throw MosaicError("solution has " + std::to_string(tiles.size()) + " entries but the grid has " +
                          std::to_string(problem.num_blocks()) + " blocks");
    }
    BlockGrid out{problem.grid(), problem.block_size(), {}};
    const auto len = out.block.channel_values();
    out.data.resize(tiles.size() * len);
    for (std::size_t l = 0; l < tiles.size(); ++l) {
        if (tiles[l] < 0 || static_cast<std::size_t>(tiles[l]) >= problem.num_tiles()) {
            throw MosaicError("tile id " + std::to_string(tiles[l]) + " out of range");
        }
        std::copy_n(problem.database().pixel_data(static_cast<std::size_t>(tiles[l])), len, out.data.begin() +
                                                                                                 static_cast<std::ptrdiff_t>(l * len));
    }
    return reassemble(out);
}

double image_mae(const Image& a, const Image& b)
{
    if (a.height != b.height || a.width != b.width || a.empty()) {
        throw MosaicError("image_mae needs two non-empty images of equal size");
    }
    const std::uint64_t sad = sum_abs_diff(a.rgb.data(), b.rgb.data(), a.rgb.size());
    return static_cast<double>(sad) / 255.0 / static_cast<double>(a.rgb.size());
}

void write_solution(const Solution& solution, const std::filesystem::path& path)
{
    if (solution.tiles.size() != solution.grid.blocks()) {
        throw MosaicError("solution length does not match its grid");
    }
    std::ofstream out(path);
    if (!out) {
        throw MosaicError("cannot open solution file for writing: " + path.string());
    }
    out << solution.grid.rows << ' ' << solution.grid.cols << '\n';
    for (int r = 0; r < solution.grid.rows; ++r) {
        for (int c = 0; c < solution.grid.cols; ++c) {
            out << (c == 0 ? "" : " ") << solution.tiles[static_cast<std::size_t>(r) * solution.grid.cols + c];
        }
        out << '\n';
    }
    if (!out) {
        throw MosaicError("failed writing solution file: " + path.string());
    }
}

Solution read_solution(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw MosaicError("cannot open solution file: " + path.string());
    }
    Solution s;
    if (!(in >> s.grid.rows >> s.grid.cols) || s.grid.rows <= 0 || s.grid.cols <= 0) {
        throw MosaicError("malformed solution header in " + path.string());
    }
    s.tiles.resize(s.grid.blocks());
    for (int& k : s.tiles) {
        if (!(in >> k) || k < 0) {
            throw MosaicError("solution file truncated or malformed: " + path.string());
        }
    }
    std::string extra;
    if (in >> extra) {
        throw MosaicError("solution file has trailing data: " + path.string());
    }
    return s;
}

} // namespace photomosaic
