#include "saswarm/detection.hpp"

#include "saswarm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace saswarm::detection {

AnomalyField rx_scores(const GroundRaster& image) {
  AnomalyField field;
  field.spec = image.spec;
  field.box = image.box;
  field.covered = image.covered;
  field.score.resize(image.spec.height, image.spec.width);
  if (!field.box.empty())
    field.score.block(field.box.y0, field.box.x0, field.box.y1 - field.box.y0,
                      field.box.x1 - field.box.x0)
        .setZero();

  const CellBox& b = image.box;
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  long m = 0;
  for (int ix = b.x0; ix < b.x1; ++ix) {
    for (int iy = b.y0; iy < b.y1; ++iy) {
      if (!image.covered(iy, ix)) continue;
      sum += Eigen::Vector4d(image.red(iy, ix), image.green(iy, ix), image.blue(iy, ix),
                             image.thermal(iy, ix));
      ++m;
    }
  }
  if (m < 32) throw DetectorUnavailable("rx_scores: fewer than 32 covered cells");
  field.covered_count = m;
  field.mean = sum / static_cast<double>(m);

  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  for (int ix = b.x0; ix < b.x1; ++ix) {
    for (int iy = b.y0; iy < b.y1; ++iy) {
      if (!image.covered(iy, ix)) continue;
      Eigen::Vector4d d(image.red(iy, ix), image.green(iy, ix), image.blue(iy, ix),
                        image.thermal(iy, ix));
      d -= field.mean;
      cov.noalias() += d * d.transpose();
    }
  }
  cov /= static_cast<double>(m);
  const double eps = 1e-6 * cov.trace() / 4.0;
  cov += eps * Eigen::Matrix4d::Identity();
  field.covariance = cov;

  if (cov.trace() <= 0.0) return field;  // constant image: all scores stay 0

  const Eigen::Matrix4d inv = Eigen::LDLT<Eigen::Matrix4d>(cov).solve(Eigen::Matrix4d::Identity());
  for (int ix = b.x0; ix < b.x1; ++ix) {
    for (int iy = b.y0; iy < b.y1; ++iy) {
      if (!image.covered(iy, ix)) continue;
      Eigen::Vector4d d(image.red(iy, ix), image.green(iy, ix), image.blue(iy, ix),
                        image.thermal(iy, ix));
      d -= field.mean;
      const double s = d.dot(inv * d);
      field.score(iy, ix) = static_cast<float>(std::max(0.0, s));
    }
  }
  return field;
}

BinaryRaster threshold_mask(const AnomalyField& field, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw RejectedInput("threshold quantile must be in [0, 1]");
  BinaryRaster mask = BinaryRaster::zeros(field.spec);

  std::vector<float> scores;
  scores.reserve(static_cast<std::size_t>(field.box.area()));
  for (int ix = field.box.x0; ix < field.box.x1; ++ix)
    for (int iy = field.box.y0; iy < field.box.y1; ++iy)
      if (field.covered(iy, ix)) scores.push_back(field.score(iy, ix));
  if (scores.empty()) return mask;

  const long m = static_cast<long>(scores.size());
  const long rank = static_cast<long>(std::ceil(q * static_cast<double>(m)));  // 1-indexed
  float cut;
  if (rank < 1) {
    cut = -std::numeric_limits<float>::infinity();  // q = 0: flag everything covered
  } else {
    std::nth_element(scores.begin(), scores.begin() + (rank - 1), scores.end());
    cut = scores[static_cast<std::size_t>(rank - 1)];
  }

  CellBox set_box = CellBox::none();
  for (int ix = field.box.x0; ix < field.box.x1; ++ix) {
    for (int iy = field.box.y0; iy < field.box.y1; ++iy) {
      if (!field.covered(iy, ix)) continue;
      if (field.score(iy, ix) > cut) {
        mask.a(iy, ix) = 1;
        set_box = set_box.unite(CellBox{ix, iy, ix + 1, iy + 1});
      }
    }
  }
  mask.box = set_box;
  return mask;
}

std::optional<Blob> largest_blob(const BinaryRaster& mask) {
  const CellBox& b = mask.box;
  if (b.empty()) return std::nullopt;
  const int bw = b.x1 - b.x0, bh = b.y1 - b.y0;
  std::vector<std::int32_t> label(static_cast<std::size_t>(bw) * bh, -1);
  auto lidx = [&](int ix, int iy) { return static_cast<std::size_t>(iy - b.y0) * bw + (ix - b.x0); };

  std::optional<Blob> best;
  std::vector<std::pair<int, int>> stack;
  std::int32_t next_label = 0;
  // Row-major scan fixes the label order (and thereby the final tiebreak).
  for (int iy = b.y0; iy < b.y1; ++iy) {
    for (int ix = b.x0; ix < b.x1; ++ix) {
      if (!mask.get(ix, iy) || label[lidx(ix, iy)] >= 0) continue;
      const std::int32_t cur = next_label++;
      Blob blob;
      stack.clear();
      stack.emplace_back(ix, iy);
      label[lidx(ix, iy)] = cur;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        blob.cells.emplace_back(cx, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = cx + dx, ny = cy + dy;
            if (!b.contains(nx, ny) || !mask.get(nx, ny)) continue;
            if (label[lidx(nx, ny)] >= 0) continue;
            label[lidx(nx, ny)] = cur;
            stack.emplace_back(nx, ny);
          }
        }
      }
      blob.member_count = static_cast<int>(blob.cells.size());
      // Contour: members with at least one 4-neighbor outside the blob
      // (unset cell or raster border).
      Vec2 csum = Vec2::Zero();
      int contour = 0;
      CellBox bbox = CellBox::none();
      for (auto [cx, cy] : blob.cells) {
        bbox = bbox.unite(CellBox{cx, cy, cx + 1, cy + 1});
        const int nbs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        bool edge = false;
        for (auto& nb : nbs) {
          const int nx = cx + nb[0], ny = cy + nb[1];
          if (nx < 0 || nx >= mask.spec.width || ny < 0 || ny >= mask.spec.height ||
              !b.contains(nx, ny) || !mask.get(nx, ny)) {
            edge = true;
            break;
          }
        }
        if (edge) {
          ++contour;
          csum += mask.spec.cell_center(cx, cy);
        }
      }
      blob.contour_size = contour;
      blob.bbox = bbox;
      blob.centroid = contour > 0 ? Vec2(csum / contour) : Vec2::Zero();

      if (!best || blob.contour_size > best->contour_size ||
          (blob.contour_size == best->contour_size && blob.member_count > best->member_count)) {
        best = std::move(blob);
      }
    }
  }
  return best;
}

Objective objective_of(const BinaryRaster& mask) {
  Objective obj;
  if (auto blob = largest_blob(mask)) {
    obj.score = blob->contour_size;
    obj.position = blob->centroid;
  }
  return obj;
}

}  // namespace saswarm::detection
