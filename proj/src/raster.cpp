#include "saswarm/raster.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace saswarm {

CellBox cells_in_square(const RasterSpec& spec, const Vec2& center, double side) {
  const double half = 0.5 * side;
  // Lowest cell whose center >= center - half, highest whose center <= center + half.
  auto lo_cell = [&](double w, double o) {
    return static_cast<int>(std::ceil((w - o) / spec.cell - 0.5));
  };
  auto hi_cell = [&](double w, double o) {
    return static_cast<int>(std::floor((w - o) / spec.cell - 0.5));
  };
  CellBox b;
  b.x0 = std::max(0, lo_cell(center.x() - half, spec.origin.x()));
  b.y0 = std::max(0, lo_cell(center.y() - half, spec.origin.y()));
  b.x1 = std::min(spec.width, hi_cell(center.x() + half, spec.origin.x()) + 1);
  b.y1 = std::min(spec.height, hi_cell(center.y() + half, spec.origin.y()) + 1);
  return b.empty() ? CellBox::none() : b;
}

GroundRaster GroundRaster::zeros(const RasterSpec& spec) {
  spec.validate();
  GroundRaster r;
  r.spec = spec;
  // Channel values in uncovered cells are meaningless by contract; leave
  // them uninitialized and zero only the coverage flags.
  r.red.resize(spec.height, spec.width);
  r.green.resize(spec.height, spec.width);
  r.blue.resize(spec.height, spec.width);
  r.thermal.resize(spec.height, spec.width);
  r.covered = FlagArray::Zero(spec.height, spec.width);
  return r;
}

long GroundRaster::covered_count() const {
  return (covered != 0).count();
}

BinaryRaster BinaryRaster::zeros(const RasterSpec& spec) {
  spec.validate();
  BinaryRaster m;
  m.spec = spec;
  m.a = FlagArray::Zero(spec.height, spec.width);
  return m;
}

long BinaryRaster::count() const {
  if (box.empty()) return 0;
  return (a.block(box.y0, box.x0, box.y1 - box.y0, box.x1 - box.x0) != 0).count();
}

void BinaryRaster::or_with(const BinaryRaster& other, const CellBox& crop) {
  if (!(spec == other.spec)) throw RejectedInput("mask raster specs differ");
  CellBox region = other.box.intersect(crop);
  if (region.empty()) return;
  for (int ix = region.x0; ix < region.x1; ++ix)
    for (int iy = region.y0; iy < region.y1; ++iy)
      if (other.a(iy, ix)) a(iy, ix) = 1;
  box = box.unite(region);
}

bool BinaryRaster::same_cells(const BinaryRaster& other) const {
  if (!(spec == other.spec)) return false;
  return (a == other.a).all();
}

namespace {
void write_header(std::ofstream& f, const RasterSpec& spec) {
  f << "# cell_m " << spec.cell << "\n";
  f << "# origin_m " << spec.origin.x() << " " << spec.origin.y() << "\n";
}
}  // namespace

void write_pgm(const std::string& path, const RasterSpec& spec, const ChannelArray& a,
               const FlagArray& covered, float lo, float hi) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const int maxval = 65535;
  f << "P2\n";
  write_header(f, spec);
  f << "# value_range " << lo << " " << hi << "\n";
  f << spec.width << " " << spec.height << "\n" << maxval << "\n";
  const float span = hi > lo ? hi - lo : 1.0f;
  for (int iy = spec.height - 1; iy >= 0; --iy) {  // top row first
    for (int ix = 0; ix < spec.width; ++ix) {
      int v = 0;
      if (covered(iy, ix)) {
        float t = (a(iy, ix) - lo) / span;
        v = static_cast<int>(std::lround(std::clamp(t, 0.0f, 1.0f) * maxval));
      }
      f << v << (ix + 1 == spec.width ? "" : " ");
    }
    f << "\n";
  }
}

void write_mask_pgm(const std::string& path, const BinaryRaster& mask) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "P2\n";
  write_header(f, mask.spec);
  f << mask.spec.width << " " << mask.spec.height << "\n1\n";
  for (int iy = mask.spec.height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < mask.spec.width; ++ix)
      f << (mask.a(iy, ix) ? 1 : 0) << (ix + 1 == mask.spec.width ? "" : " ");
    f << "\n";
  }
}

}  // namespace saswarm
