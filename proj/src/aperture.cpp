#include "saswarm/aperture.hpp"

#include "saswarm/errors.hpp"

#include <array>
#include <cmath>

namespace saswarm::aperture {

AltitudePlan assign_altitudes(int n, double h_l, double dh) {
  if (n < 1) throw RejectedInput("assign_altitudes: n must be >= 1");
  if (dh < 0.0) throw RejectedInput("assign_altitudes: dh must be >= 0");
  AltitudePlan plan;
  plan.h_l = h_l;
  plan.dh = dh;
  plan.n = n;
  plan.slot_altitudes.assign(n, h_l);
  // rank 0 = highest altitude = h_l + (n-1)dh.
  int left = 0, right = n - 1;
  for (int rank = 0; rank < n; ++rank) {
    double alt = h_l + (n - 1 - rank) * dh;
    if (rank % 2 == 0)
      plan.slot_altitudes[left++] = alt;
    else
      plan.slot_altitudes[right--] = alt;
  }
  return plan;
}

SamplingLossReport sampling_loss(int n, double h_l, double dh, double fov_deg, long px, double e) {
  if (n < 1) throw RejectedInput("sampling_loss: n must be >= 1");
  if (!(h_l > 0.0)) throw RejectedInput("sampling_loss: h_l must be positive");
  if (dh < 0.0) throw RejectedInput("sampling_loss: dh must be >= 0");
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw RejectedInput("sampling_loss: fov_deg must be in (0, 180)");
  if (px < 1) throw RejectedInput("sampling_loss: px must be >= 1");
  if (e < 0.0) throw RejectedInput("sampling_loss: e must be >= 0");

  SamplingLossReport rep;
  rep.n = n;
  rep.h_l = h_l;
  rep.dh = dh;
  rep.fov_deg = fov_deg;
  rep.px = px;
  rep.e = e;

  const double tf = std::tan(0.5 * deg_to_rad(fov_deg));
  rep.c_l = std::pow(2.0 * h_l * tf, 2);
  rep.c_h = std::pow(2.0 * (h_l + dh * n) * tf, 2);

  // Mean of (h_l + i*dh)^2 over i = 0..n-1; the quadratic coefficient is
  // (n-1)(2n-1)/6 = (2n^2-3n+1)/6.
  const double q = dh / h_l;
  rep.sl_dh = 1.0 + q * q * (2.0 * n * n - 3.0 * n + 1.0) / 6.0 + q * (n - 1.0);
  rep.c_avg = rep.c_l * rep.sl_dh;

  rep.c_pxl = rep.c_l / static_cast<double>(px);
  rep.c_pxh = rep.c_h / static_cast<double>(px);
  rep.sl_e = 1.0 + (4.0 * e * e + 4.0 * e * std::sqrt(rep.c_pxl)) / rep.c_pxl;
  rep.sl = rep.sl_e * rep.sl_dh;
  rep.c4 = dh * (n - 1.0) * tf;
  return rep;
}

namespace {

// Enclosing/unit diameter ratios for packing n unit circles in a circle
// (proven optimal for small n, best known otherwise).
constexpr std::array<double, 20> kPackingRatio = {
    1.0,
    2.0,
    2.154700538379252,   // 1 + 2/sqrt(3)
    2.414213562373095,   // 1 + sqrt(2)
    2.701301616704080,   // 1 + sqrt(2(1+1/sqrt(5)))
    3.0,
    3.0,
    3.304764871167089,   // 1 + 1/sin(pi/7)
    3.613125929752753,   // 1 + sqrt(2(2+sqrt(2)))
    3.813025701025092,
    3.923804420338770,   // 1 + 1/sin(pi/9)
    4.029602310903629,
    4.236067977499790,   // 2 + sqrt(5)
    4.328428885674460,
    4.521356515683623,
    4.615425794977917,
    4.792033926196553,
    4.863703305156273,   // 1 + sqrt(2) + sqrt(6)
    4.863703305156273,
    5.122307876106694,
};

std::vector<Vec2> ring(int k, double radius, double phase = 0.0) {
  std::vector<Vec2> pts;
  pts.reserve(k);
  for (int i = 0; i < k; ++i) {
    double a = phase + 2.0 * M_PI * i / k;
    pts.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  return pts;
}

void append(std::vector<Vec2>& out, const std::vector<Vec2>& in) {
  out.insert(out.end(), in.begin(), in.end());
}

// Circumradius of a regular k-gon with unit side.
double kgon_radius(int k) { return 1.0 / (2.0 * std::sin(M_PI / k)); }

}  // namespace

double packing_ratio(int n) {
  if (n < 1 || n > 20) throw UnsupportedSize("packing_ratio: n must be in [1, 20]");
  return kPackingRatio[static_cast<std::size_t>(n - 1)];
}

std::vector<Vec2> packing_witness(int n) {
  if (n < 1 || n > 20) throw UnsupportedSize("packing_witness: n must be in [1, 20]");
  std::vector<Vec2> pts;
  if (n == 1) {
    pts.emplace_back(0.0, 0.0);
  } else if (n == 2) {
    pts.emplace_back(-0.5, 0.0);
    pts.emplace_back(0.5, 0.0);
  } else if (n <= 6) {
    // Single regular ring with unit side.
    append(pts, ring(n, kgon_radius(n)));
  } else if (n <= 11) {
    // (n-1)-gon plus center; ring radius >= 1 for n-1 >= 6.
    pts.emplace_back(0.0, 0.0);
    append(pts, ring(n - 1, kgon_radius(n - 1)));
  } else {
    // Center + unit hexagon + outer ring of n-7 points. The outer radius is
    // at least hexagon radius + 1, so inter-ring distances are safe for any
    // rotation.
    const int k = n - 7;
    pts.emplace_back(0.0, 0.0);
    append(pts, ring(6, 1.0));
    append(pts, ring(k, std::max(2.0, kgon_radius(k)), M_PI / k));
  }
  return pts;
}

double aperture_diameter(int n, double c4) {
  if (!(c4 >= 0.0)) throw RejectedInput("aperture_diameter: c4 must be >= 0");
  return c4 * packing_ratio(n);
}

}  // namespace saswarm::aperture
