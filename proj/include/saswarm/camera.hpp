#pragma once

#include "saswarm/errors.hpp"
#include "saswarm/geometry.hpp"

#include <cmath>

namespace saswarm::imaging {

/// Nadir-looking pinhole camera. `px` is the sensor resolution used for
/// per-pixel coverage arithmetic; image formation itself happens on the
/// shared ground raster.
struct CameraModel {
  double fov_deg = 50.0;
  int px = 512;  // sensor is px x px

  void validate() const {
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw RejectedInput("camera fov_deg must be in (0, 180)");
    if (px <= 0) throw RejectedInput("camera px must be positive");
  }

  /// Side of the square ground footprint at the given altitude.
  double footprint_side(double altitude) const {
    return 2.0 * altitude * std::tan(0.5 * deg_to_rad(fov_deg));
  }
};

}  // namespace saswarm::imaging
