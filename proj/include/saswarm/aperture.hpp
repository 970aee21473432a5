#pragma once

#include "saswarm/geometry.hpp"

#include <vector>

namespace saswarm::aperture {

/// Per-slot altitude assignment for the default line formation.
/// Altitudes are h_l, h_l+dh, ..., h_l+(n-1)dh, each used exactly once.
struct AltitudePlan {
  double h_l = 35.0;
  double dh = 1.0;
  int n = 1;
  std::vector<double> slot_altitudes;  // left-to-right along the line
};

/// Slot ordering alternates ends: 1st-, 3rd-, 5th-highest ... fill from the
/// left end inward; 2nd-, 4th-, ... from the right end inward.
AltitudePlan assign_altitudes(int n, double h_l, double dh);

/// Ground-coverage and sampling-loss figures for a swarm flying at
/// staggered altitudes with pose error e.
struct SamplingLossReport {
  int n = 0;
  double h_l = 0.0, dh = 0.0, fov_deg = 0.0, e = 0.0;
  long px = 0;            // pixel count of the sensor (e.g. 512*512)
  double c_l = 0.0;       // ground coverage of the lowest drone, m^2
  double c_h = 0.0;       // ground coverage of the highest drone, m^2
  double c_avg = 0.0;     // average coverage in the integral, m^2
  double c_pxl = 0.0;     // ground area of one pixel, lowest drone, m^2
  double c_pxh = 0.0;     // ground area of one pixel, highest drone, m^2
  double sl_dh = 0.0;     // sampling loss ratio from altitude staggering
  double sl_e = 0.0;      // sampling loss ratio from pose error
  double sl = 0.0;        // total sampling loss ratio = sl_e * sl_dh
  double c4 = 0.0;        // minimal horizontal sampling distance, m
};

/// All closed forms evaluated at once. c4 uses the dh*(n-1) maximum height
/// difference (n drones, n-1 vertical gaps).
SamplingLossReport sampling_loss(int n, double h_l, double dh, double fov_deg, long px, double e);

/// Ratio of enclosing-circle diameter to unit-circle diameter for the
/// packing-circles-in-a-circle problem, n in [1, 20].
double packing_ratio(int n);

/// Synthetic-aperture diameter for n drones at minimal spacing c4:
/// a = c4 * r_n.
double aperture_diameter(int n, double c4);

/// Feasibility witness: n points with pairwise distance >= 1 that fit in a
/// circle of diameter packing_ratio(n).
std::vector<Vec2> packing_witness(int n);

}  // namespace saswarm::aperture
