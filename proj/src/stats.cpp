#include "saswarm/stats.hpp"

#include "saswarm/errors.hpp"
#include "saswarm/rng.hpp"

#include <cmath>
#include <vector>

namespace saswarm::stats {

void VisibilityParams::validate() const {
  if (!(occlusion_density >= 0.0 && occlusion_density <= 1.0))
    throw RejectedInput("occlusion_density must be in [0, 1]");
  if (n_parallel < 1) throw RejectedInput("n_parallel must be >= 1");
  if (n_sequential < 1) throw RejectedInput("n_sequential must be >= 1");
  if (!(dt > 0.0)) throw RejectedInput("dt must be positive");
  if (!(target_length > 0.0)) throw RejectedInput("target_length must be positive");
  if (target_speed < 0.0) throw RejectedInput("target_speed must be >= 0");
  if (var_signal < 0.0 || var_occluder < 0.0) throw RejectedInput("variances must be >= 0");
}

double visibility_static(double density, double n_images) {
  if (!(density >= 0.0 && density <= 1.0)) throw RejectedInput("density must be in [0, 1]");
  if (!(n_images >= 1.0)) throw RejectedInput("n_images must be >= 1");
  return 1.0 - density * density - density * (1.0 - density) / n_images;
}

double mse_moving(const VisibilityParams& p) {
  p.validate();
  const double d = p.occlusion_density;
  const double n = p.n_total();
  const double nv = p.n_visible();
  const double seen = nv * (1.0 - d) / n;
  const double sig = p.var_signal + std::pow(p.mean_occluder - p.mean_signal, 2);
  return ((1.0 - seen) * (1.0 - seen) + nv * d * (1.0 - d) / (n * n)) * sig +
         (nv * d + n - nv) / (n * n) * p.var_occluder;
}

double visibility_moving(const VisibilityParams& p) {
  return 1.0 - mse_moving(p);
}

namespace {

double draw_signal(Rng& rng, double mean, double var, SignalDistribution dist) {
  if (dist == SignalDistribution::Gaussian) return rng.normal(mean, var);
  // Uniform with the same first two moments: half-width sqrt(3 var).
  double hw = std::sqrt(3.0 * var);
  return rng.uniform(mean - hw, mean + hw);
}

}  // namespace

MonteCarloResult monte_carlo_visibility(const VisibilityParams& p, long pixels, std::uint64_t seed,
                                        SignalDistribution dist) {
  p.validate();
  if (pixels < 1) throw RejectedInput("pixels must be >= 1");

  const int n = static_cast<int>(p.n_total());
  const double nv = std::min(p.n_visible(), static_cast<double>(n));
  const int nv_floor = static_cast<int>(std::floor(nv));
  const double nv_frac = nv - nv_floor;

  const Rng root(seed);
  // Fixed-size blocks accumulated in index order keep the reduction
  // independent of any sharding of the pixel loop.
  constexpr long kBlock = 1 << 16;
  double sum = 0.0, sum_sq = 0.0;
  for (long b0 = 0; b0 < pixels; b0 += kBlock) {
    const long b1 = std::min(pixels, b0 + kBlock);
    double bsum = 0.0, bsq = 0.0;
    for (long px = b0; px < b1; ++px) {
      Rng rng = root.split(static_cast<std::uint64_t>(px) + 1);
      const double s = draw_signal(rng, p.mean_signal, p.var_signal, dist);
      int visible_slots = nv_floor;
      if (nv_frac > 0.0 && rng.bernoulli(nv_frac)) ++visible_slots;
      double acc = 0.0;
      for (int i = 0; i < visible_slots; ++i) {
        if (rng.bernoulli(p.occlusion_density))
          acc += draw_signal(rng, p.mean_occluder, p.var_occluder, dist);
        else
          acc += s;
      }
      for (int i = visible_slots; i < n; ++i)
        acc += draw_signal(rng, p.mean_occluder, p.var_occluder, dist);
      const double err = acc / n - s;
      const double sq = err * err;
      bsum += sq;
      bsq += sq * sq;
    }
    sum += bsum;
    sum_sq += bsq;
  }

  const double m = sum / pixels;
  const double var = std::max(0.0, sum_sq / pixels - m * m);
  MonteCarloResult r;
  r.visibility = 1.0 - m;
  r.std_error = std::sqrt(var / pixels);
  r.pixels = pixels;
  return r;
}

}  // namespace saswarm::stats
