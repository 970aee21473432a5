#pragma once

#include "saswarm/errors.hpp"
#include "saswarm/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <string>

namespace saswarm {

using ChannelArray = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic>;
using FlagArray = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// World-aligned grid geometry shared by all rasters of a scenario.
/// Cell (ix, iy) spans [origin + cell*(ix, iy), origin + cell*(ix+1, iy+1)).
struct RasterSpec {
  Vec2 origin{0.0, 0.0};
  double cell = 0.25;  // m / cell
  int width = 0;       // cells, x
  int height = 0;      // cells, y

  bool operator==(const RasterSpec& o) const {
    return origin == o.origin && cell == o.cell && width == o.width && height == o.height;
  }

  Vec2 cell_center(int ix, int iy) const {
    return origin + cell * Vec2(ix + 0.5, iy + 0.5);
  }
  int cell_of_x(double wx) const { return static_cast<int>(std::floor((wx - origin.x()) / cell)); }
  int cell_of_y(double wy) const { return static_cast<int>(std::floor((wy - origin.y()) / cell)); }
  long cell_count() const { return static_cast<long>(width) * height; }

  void validate() const {
    if (!(cell > 0.0)) throw RejectedInput("raster cell size must be positive");
    if (width <= 0 || height <= 0) throw RejectedInput("raster dimensions must be positive");
  }
};

/// Half-open cell index box [x0, x1) x [y0, y1).
struct CellBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  static CellBox none() { return {0, 0, 0, 0}; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  long area() const { return empty() ? 0 : static_cast<long>(x1 - x0) * (y1 - y0); }
  CellBox intersect(const CellBox& o) const {
    CellBox r{std::max(x0, o.x0), std::max(y0, o.y0), std::min(x1, o.x1), std::min(y1, o.y1)};
    return r.empty() ? none() : r;
  }
  bool overlaps(const CellBox& o) const { return !intersect(o).empty(); }
  CellBox unite(const CellBox& o) const {
    if (empty()) return o;
    if (o.empty()) return *this;
    return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
  }
  bool contains(int ix, int iy) const { return ix >= x0 && ix < x1 && iy >= y0 && iy < y1; }
  bool operator==(const CellBox& o) const = default;
};

/// Cells whose centers fall inside the axis-aligned world square
/// centered at `center` with side `side`, clipped to the raster.
CellBox cells_in_square(const RasterSpec& spec, const Vec2& center, double side);

/// Four spectral channels plus a coverage flag per cell. Arrays are indexed
/// (row = iy, col = ix). Channel values in uncovered cells are meaningless.
struct GroundRaster {
  RasterSpec spec;
  ChannelArray red, green, blue, thermal;
  FlagArray covered;
  CellBox box = CellBox::none();  // bounding box of covered cells

  static GroundRaster zeros(const RasterSpec& spec);
  long covered_count() const;
};

/// Binary mask on the common grid. `box` bounds the set cells (all set cells
/// lie inside `box`; the box may overcover).
struct BinaryRaster {
  RasterSpec spec;
  FlagArray a;
  CellBox box = CellBox::none();

  static BinaryRaster zeros(const RasterSpec& spec);
  long count() const;
  bool get(int ix, int iy) const { return a(iy, ix) != 0; }
  void set(int ix, int iy) { a(iy, ix) = 1; }

  /// OR `other` into this mask, restricted to `crop`.
  void or_with(const BinaryRaster& other, const CellBox& crop);
  bool same_cells(const BinaryRaster& other) const;
};

/// Text raster dumps (portable graymap with cell size / origin in
/// comment headers).
void write_pgm(const std::string& path, const RasterSpec& spec, const ChannelArray& a,
               const FlagArray& covered, float lo, float hi);
void write_mask_pgm(const std::string& path, const BinaryRaster& mask);

}  // namespace saswarm
