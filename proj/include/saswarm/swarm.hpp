#pragma once

#include "saswarm/geometry.hpp"
#include "saswarm/imaging.hpp"
#include "saswarm/rng.hpp"

#include <optional>
#include <span>
#include <vector>

namespace saswarm::swarm {

/// PSO hyper-parameters and swarm geometry. Lengths in meters.
struct Hyperparams {
  double c1 = 1.0;          // cognitive step
  double c2 = 2.0;          // social step
  double c3 = 2.0;          // scan step per iteration
  double c4 = 4.2;          // minimal horizontal distance
  double c5 = 0.3;          // divergence rate toward the scan line, (0, 1]
  double s = 4.2;           // line spacing
  double threshold = 5.0;   // objective threshold T, contour cells
  int n = 10;               // drones
  double speed = 10.0;      // ground speed, m/s
  double fov_deg = 50.0;
  double h_l = 35.0;        // lowest altitude
  double dh = 1.0;          // altitude step
  double min_baseline = 0.1;  // smallest useful sampling baseline

  /// Throws ConfigError naming the violated constraint.
  void validate() const;
};

enum class Mode { Scanning, Converged };

struct TargetEstimate {
  Vec2 position{0.0, 0.0};
  double t = 0.0;
};

struct SwarmState {
  std::vector<Vec2> positions;       // horizontal, one per drone
  std::vector<double> altitudes;     // fixed per drone
  Vec2 scan_dir{0.0, 1.0};           // SD, unit
  double scan_speed = 2.0;           // current c3
  Mode mode = Mode::Scanning;
  Vec3 best_pose{0.0, 0.0, 0.0};
  std::optional<TargetEstimate> prev_estimate;
  std::optional<TargetEstimate> last_estimate;
  int iteration = 0;
  double t = 0.0;
  double last_duration = 0.0;
  Rng rng{0};

  Vec2 center_of_gravity() const;
};

/// n collinear slots perpendicular to the scan direction, spacing s,
/// symmetric about center. Returned left-to-right along perp(sd).
std::vector<Vec2> default_line_positions(const Vec2& center, const Vec2& sd, double s, int n);

/// One scanning move: slots from the current center of gravity, sorted-
/// projection slot assignment, velocity c3*SD + c5*(L_i - P_i).
std::vector<Vec2> scan_step(std::span<const Vec2> positions, const Vec2& sd, double c3, double c5,
                            double s);

/// Pairwise minimum-distance enforcement. Any pair closer than c4 moves
/// apart symmetrically by (c4-d)/2 + 1e-6 each; coincident pairs separate
/// along a pseudo-random direction from `rng`. Throws ConstraintInfeasible
/// after 1000 sweeps.
void rutherford_repel(std::vector<Vec2>& positions, double c4, Rng& rng);

/// One converged move: c1 times a random unit direction plus c2 toward the
/// best pose (norm(0) := 0), then minimum-distance enforcement reconciled
/// with the c1+c2 per-iteration displacement bound.
std::vector<Vec2> converge_step(std::span<const Vec2> positions, const Hyperparams& hp,
                                const Vec2& best_xy, Rng& rng);

struct HeadingUpdate {
  Vec2 scan_dir{0.0, 1.0};
  double scan_speed = 0.0;      // new c3
  double target_speed = 0.0;    // estimated, m/s
  Vec2 target_velocity{0.0, 0.0};
};

/// New default-scan direction and speed from the two most recent target
/// estimates. SD points from the swarm's center of gravity to the latest
/// estimate; c3 covers the target's per-iteration travel times a 1.25
/// safety factor, capped by what the drones can fly in one iteration.
/// Estimates closer than one raster cell keep the previous direction with
/// target speed 0.
HeadingUpdate update_scan_heading(const TargetEstimate& prev, const TargetEstimate& current,
                                  const Vec2& swarm_center, double iteration_duration,
                                  double drone_speed, double cell_size, const Vec2& prev_sd);

/// Classical velocity update (ablation baseline):
/// v = c0*v + c1*r1*(pbest - p) + c2*r2*(gbest - p), r1, r2 uniform (0,1).
Vec2 classic_pso_velocity(const Vec2& velocity, const Vec2& position, const Vec2& personal_best,
                          const Vec2& global_best, double c0, double c1, double c2, Rng& rng);

struct IterationOutcome {
  double score = 0.0;
  Mode mode = Mode::Scanning;
  std::optional<Vec2> estimate;
  imaging::IntegrationResult integration;
  double duration = 0.0;  // s, travel-bound
};

/// One full PSO iteration: evaluate the conditional integral at the current
/// poses, branch on the objective threshold, move, enforce the minimum
/// distance, and advance the swarm clock by the longest travel / speed.
IterationOutcome pso_iteration(SwarmState& state, const Hyperparams& hp,
                               std::span<const imaging::CaptureRecord> latest,
                               std::span<const imaging::CaptureRecord> history,
                               const imaging::ObjectiveFn& objective, double cell_size,
                               double min_duration);

}  // namespace saswarm::swarm
