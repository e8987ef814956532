#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "photomosaic/image.hpp"
#include "photomosaic/problem.hpp"

namespace photomosaic {

/// Places tile x[l] at grid cell l. Output is (rows * m_b) x (cols * n_b).
/// Tiles are already 8-bit, so the 8-bit output is exact.
Image render(const MosaicProblem& problem, std::span<const int> tiles);

/// MAE between two equally sized images over all channel values.
double image_mae(const Image& a, const Image& b);

/// Plain-text solution: "rows cols" on the first line, then one line per
/// grid row holding that row's tile ids separated by single spaces.
struct Solution {
    GridSize grid;
    std::vector<int> tiles;

    friend bool operator==(const Solution&, const Solution&) = default;
};

void write_solution(const Solution& solution, const std::filesystem::path& path);
Solution read_solution(const std::filesystem::path& path);

} // namespace photomosaic
