#pragma once

#include "radonlab/grid.hpp"

#include <string>
#include <vector>

namespace radonlab {

// Binary formats: an ASCII header line followed by little-endian float64 data.
//   grid:     "RGRID 1 <n> <L>\n"           + n*n values, row-major
//   sinogram: "RSINO 1 <m> <p_count> <R>\n" + m psi weights + m*p_count values

void write_grid(const std::string& path, const ImageGrid& g);
ImageGrid read_grid(const std::string& path);
void write_sino(const std::string& path, const Sinogram& s);
Sinogram read_sino(const std::string& path);

struct CrosscutSample {
  double coordinate = 0.0;
  double value = 0.0;
};

enum class CrosscutAxis { row, column, line };

/// One raster row (fixed y) or column (fixed x), or a line through `origin`
/// at angle `angle` sampled at cell spacing with nearest-cell lookup.
/// For row/column, `position` is the physical y (row) or x (column).
struct CrosscutSpec {
  CrosscutAxis axis = CrosscutAxis::row;
  double position = 0.0;
  Vec2 origin{};
  double angle = 0.0;
};

std::vector<CrosscutSample> crosscut(const ImageGrid& g, const CrosscutSpec& spec);
void write_csv_crosscut(const std::string& path, const std::vector<CrosscutSample>& samples);

/// 8-bit PGM (P5); values affinely mapped from [lo, hi] to [0, 255] and clamped.
/// lo == hi selects the grid's own min/max.
void write_image8(const std::string& path, const ImageGrid& g, double lo = 0.0, double hi = 0.0);

} // namespace radonlab
