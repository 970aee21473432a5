#pragma once

#include <cstdint>
#include <limits>

namespace saswarm::stats {

/// Inputs of the parallel-sequential visibility model. N_p images are taken
/// in parallel at each of N_s instances spaced dt apart; a target of length
/// `target_length` moving at `target_speed` overlaps a given spot for
/// N_o = length / (speed * dt) instances, so it can appear in
/// N_v = N_p * min(N_o, N_s) of the N = N_p * N_s images.
struct VisibilityParams {
  double occlusion_density = 0.5;  // D, per-image probability a pixel is occluded
  int n_parallel = 1;              // N_p
  int n_sequential = 1;            // N_s
  double dt = 1.0;                 // s between sequential instances
  double target_length = 1.0;      // m
  double target_speed = 0.0;       // m/s; 0 = static
  double mean_signal = 0.0;        // E[S]
  double var_signal = 1.0;         // Var[S]
  double mean_occluder = 0.0;      // E[C]
  double var_occluder = 0.0;       // Var[C]

  double n_total() const { return static_cast<double>(n_parallel) * n_sequential; }
  double n_overlap() const {
    if (target_speed == 0.0) return std::numeric_limits<double>::infinity();
    return target_length / (target_speed * dt);
  }
  double n_visible() const {
    double no = n_overlap();
    double ns = static_cast<double>(n_sequential);
    return n_parallel * (no < ns ? no : ns);
  }

  void validate() const;
};

/// Static-target visibility of an N-image integral under occlusion
/// density D: V = 1 - D^2 - D(1-D)/N.
double visibility_static(double density, double n_images);

/// Mean squared error between the integral and the occlusion-free
/// reference for a moving target:
///   MSE = [(1 - N_v(1-D)/N)^2 + N_v D(1-D)/N^2] * (var_s + (mu_o-mu_s)^2)
///       + (N_v D + N - N_v)/N^2 * var_o.
double mse_moving(const VisibilityParams& p);

/// V = 1 - MSE.
double visibility_moving(const VisibilityParams& p);

struct MonteCarloResult {
  double visibility = 0.0;
  double std_error = 0.0;  // standard error of the visibility estimate
  long pixels = 0;
};

enum class SignalDistribution { Gaussian, Uniform };

/// Generative check of the closed forms: per pixel, draw the target signal,
/// occluder signals, and Bernoulli(D) occlusion flags, form the N-image
/// average, and measure 1 - mean((X - S)^2). Fractional N_v is handled by
/// flooring plus a probabilistic extra slot. Deterministic per (seed, pixel),
/// so sharding cannot change the result.
MonteCarloResult monte_carlo_visibility(const VisibilityParams& p, long pixels, std::uint64_t seed,
                                        SignalDistribution dist = SignalDistribution::Gaussian);

}  // namespace saswarm::stats
