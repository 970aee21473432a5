#pragma once

#include "saswarm/raster.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace saswarm::detection {

/// Per-cell anomaly scores (squared Mahalanobis distance to the background
/// mean) together with the statistics used to compute them.
struct AnomalyField {
  RasterSpec spec;
  CellBox box = CellBox::none();
  ChannelArray score;       // valid where covered
  FlagArray covered;
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // after regularization
  long covered_count = 0;
};

/// Joint 4-band RX detector. Mean and covariance are taken over all covered
/// cells; the covariance is regularized by adding 1e-6 * trace/4 to the
/// diagonal. Throws DetectorUnavailable below 32 covered cells.
AnomalyField rx_scores(const GroundRaster& image);

/// Flags cells whose score strictly exceeds the empirical nearest-rank
/// q-quantile of covered-cell scores. q = 0 flags every covered cell,
/// q = 1 flags none.
BinaryRaster threshold_mask(const AnomalyField& field, double q);

struct Blob {
  std::vector<std::pair<int, int>> cells;  // (ix, iy) members
  int member_count = 0;
  int contour_size = 0;        // members with a 4-neighbor outside the blob
  Vec2 centroid{0.0, 0.0};     // world coords, centroid of the contour cells
  CellBox bbox = CellBox::none();
};

/// Largest 8-connected cluster, ranked by contour size, then member count,
/// then first-encountered label. Returns nullopt for an empty mask.
std::optional<Blob> largest_blob(const BinaryRaster& mask);

struct Objective {
  double score = 0.0;  // contour size of the largest blob, in cells
  std::optional<Vec2> position;
};

/// Objective score O of a (union) mask: contour size of its largest blob,
/// 0 when empty; the position estimate is the contour centroid.
Objective objective_of(const BinaryRaster& mask);

}  // namespace saswarm::detection
