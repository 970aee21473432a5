#pragma once

#include "saswarm/camera.hpp"
#include "saswarm/raster.hpp"
#include "saswarm/scene.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace saswarm::imaging {

/// Flat material responses (R, G, B, thermal). Background materials are
/// exactly constant: anomaly scores then separate target cells from
/// vegetation by whole value classes rather than by a noise tail. Bark is
/// given the soil response so that the rare trunk-top cells do not form
/// their own top-ranked score class.
struct Materials {
  Vec4f ground{0.30f, 0.28f, 0.20f, 20.0f};
  Vec4f trunk{0.30f, 0.28f, 0.20f, 20.0f};
  Vec4f crown{0.13f, 0.38f, 0.15f, 19.0f};
};

/// Orthorectified single capture: one ray per covered ground cell from the
/// camera center to the cell center. Nearest hit wins (occluder, then
/// target, else ground). Coverage is the square footprint at the pose's
/// altitude. Throws RejectedInput if the pose is below the canopy.
GroundRaster render_single(const scene::ForestScene& forest, const scene::TargetBody* target,
                           double t, const Vec3& pose, const CameraModel& camera,
                           const RasterSpec& spec, const Materials& materials = {});

/// One capture's detection result registered on the common raster.
struct CaptureRecord {
  int drone_id = 0;
  Vec3 pose{0.0, 0.0, 0.0};  // x, y, altitude
  double t = 0.0;
  double footprint_side = 0.0;
  CellBox footprint = CellBox::none();
  BinaryRaster mask;  // binarized anomaly mask, coverage within footprint
};

struct CaptureKey {
  double t = 0.0;
  int drone_id = 0;
  bool operator==(const CaptureKey&) const = default;
};

/// Union of accepted anomaly masks cropped to the reference footprint.
struct IntegralMask {
  Vec3 reference_pose{0.0, 0.0, 0.0};
  int reference_drone = -1;
  CellBox footprint = CellBox::none();
  BinaryRaster mask;
  std::vector<CaptureKey> contributors;
};

struct AcceptanceEvent {
  CaptureKey key;
  double score_before = 0.0;
  double score_after = 0.0;
  bool removal = false;
};

using ObjectiveFn = std::function<double(const BinaryRaster&)>;

struct IntegrationResult {
  IntegralMask integral;
  double score = 0.0;
  std::vector<AcceptanceEvent> log;  // every accepted add/removal
};

/// Best-reference selection plus conditional integration:
///  (a) score the OR of the latest masks cropped to each latest pose's
///      footprint; keep the best reference (ties: lowest drone id);
///  (b) add history records, most recent first, iff their footprint
///      overlaps the reference footprint and the score strictly improves;
///  (c) drop members of the latest set, ascending drone id, iff removal
///      strictly improves the score.
IntegrationResult integrate_conditional(std::span<const CaptureRecord> latest,
                                        std::span<const CaptureRecord> history,
                                        const ObjectiveFn& objective);

/// Full detection pipeline for one pose: render, score, threshold.
/// A detector-unavailable condition yields an empty mask.
CaptureRecord capture(const scene::ForestScene& forest, const scene::TargetBody* target, double t,
                      int drone_id, const Vec3& pose, const CameraModel& camera,
                      const RasterSpec& spec, double quantile, const Materials& materials = {});

}  // namespace saswarm::imaging
