#include "saswarm/swarm.hpp"

#include "saswarm/detection.hpp"
#include "saswarm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace saswarm::swarm {

void Hyperparams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string(name) + " must be positive and finite");
  };
  positive(c1, "c1_m");
  positive(c2, "c2_m");
  if (c3 < 0.0) throw ConfigError("c3_m must be >= 0");
  positive(c4, "c4_m");
  positive(s, "s_m");
  positive(speed, "speed_mps");
  positive(h_l, "h_l_m");
  if (dh < 0.0) throw ConfigError("dh_m must be >= 0");
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw ConfigError("fov_deg must be in (0, 180)");
  if (n < 1) throw ConfigError("n must be >= 1");
  if (threshold < 0.0) throw ConfigError("t_cells must be >= 0");
  if (c1 > c2) throw ConfigError("c1_m must be <= c2_m (cognitive step must not exceed social step)");
  if (c1 + c2 > c4 + 1e-12) throw ConfigError("c1_m + c2_m must be <= c4_m (minimal sampling distance)");
  if (s < c4 - 1e-12) throw ConfigError("s_m must be >= c4_m");
  if (!(c5 > 0.0 && c5 <= 1.0)) throw ConfigError("c5 must be in (0, 1]");
  if (c2 - c1 + 1e-12 < min_baseline)
    throw ConfigError("c2_m - c1_m must be >= min_baseline_m (smallest useful sampling step)");
}

Vec2 SwarmState::center_of_gravity() const {
  Vec2 sum = Vec2::Zero();
  for (const auto& p : positions) sum += p;
  return sum / static_cast<double>(positions.size());
}

std::vector<Vec2> default_line_positions(const Vec2& center, const Vec2& sd, double s, int n) {
  if (n < 1) throw RejectedInput("default_line_positions: n must be >= 1");
  if (!(s > 0.0)) throw RejectedInput("default_line_positions: spacing must be positive");
  const Vec2 axis = unit_or_zero(perp(sd));
  if (axis.isZero()) throw RejectedInput("default_line_positions: scan direction must be nonzero");
  std::vector<Vec2> slots;
  slots.reserve(static_cast<std::size_t>(n));
  const double mid = 0.5 * (n - 1);
  for (int i = 0; i < n; ++i) slots.push_back(center + (i - mid) * s * axis);
  return slots;
}

std::vector<Vec2> scan_step(std::span<const Vec2> positions, const Vec2& sd, double c3, double c5,
                            double s) {
  const int n = static_cast<int>(positions.size());
  Vec2 cog = Vec2::Zero();
  for (const auto& p : positions) cog += p;
  cog /= static_cast<double>(n);
  const std::vector<Vec2> slots = default_line_positions(cog, sd, s, n);
  const Vec2 axis = unit_or_zero(perp(sd));

  // Sorted-projection pairing: drones and slots ordered by signed
  // coordinate along the line axis, matched in order.
  std::vector<int> drone_order(n);
  std::iota(drone_order.begin(), drone_order.end(), 0);
  std::sort(drone_order.begin(), drone_order.end(), [&](int a, int b) {
    return positions[a].dot(axis) < positions[b].dot(axis);
  });

  std::vector<Vec2> next(positions.begin(), positions.end());
  for (int k = 0; k < n; ++k) {
    const int i = drone_order[k];
    next[i] = positions[i] + c3 * sd + c5 * (slots[static_cast<std::size_t>(k)] - positions[i]);
  }
  return next;
}

namespace {

constexpr double kDistanceTol = 1e-9;  // slack on the c4 constraint

bool min_distance_ok(std::span<const Vec2> positions, double c4) {
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      if ((positions[i] - positions[j]).norm() < c4 - kDistanceTol) return false;
  return true;
}

}  // namespace

void rutherford_repel(std::vector<Vec2>& positions, double c4, Rng& rng) {
  if (positions.empty()) throw RejectedInput("rutherford_repel: need at least one position");
  const int n = static_cast<int>(positions.size());
  for (int sweep = 0; sweep < 1000; ++sweep) {
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Vec2 delta = positions[j] - positions[i];
        double d = delta.norm();
        if (d >= c4 - kDistanceTol) continue;
        Vec2 dir;
        if (d < 1e-12) {
          dir = rng.unit_vec2();
          d = 0.0;
        } else {
          dir = delta / d;
        }
        const double push = 0.5 * (c4 - d) + 1e-6;
        positions[i] -= push * dir;
        positions[j] += push * dir;
        moved = true;
      }
    }
    if (!moved) return;
  }
  throw ConstraintInfeasible("rutherford_repel: no feasible arrangement after 1000 sweeps");
}

std::vector<Vec2> converge_step(std::span<const Vec2> positions, const Hyperparams& hp,
                                const Vec2& best_xy, Rng& rng) {
  const int n = static_cast<int>(positions.size());
  std::vector<Vec2> next(positions.begin(), positions.end());
  for (int i = 0; i < n; ++i) {
    const Vec2 social = unit_or_zero(best_xy - positions[static_cast<std::size_t>(i)]);
    next[static_cast<std::size_t>(i)] += hp.c1 * rng.unit_vec2() + hp.c2 * social;
  }
  rutherford_repel(next, hp.c4, rng);

  // The repulsion may have pushed a drone beyond its per-iteration reach of
  // c1 + c2. Clamp to the reach balls; if that reopens a spacing violation,
  // blend everyone back toward the (feasible) capture positions until both
  // constraints hold. Termination is guaranteed because the blend limit is
  // the previous arrangement, which satisfies c4.
  const double reach = hp.c1 + hp.c2;
  bool clamped = false;
  for (int i = 0; i < n; ++i) {
    const Vec2 d = next[static_cast<std::size_t>(i)] - positions[static_cast<std::size_t>(i)];
    const double len = d.norm();
    if (len > reach) {
      next[static_cast<std::size_t>(i)] = positions[static_cast<std::size_t>(i)] + d * (reach / len);
      clamped = true;
    }
  }
  if (clamped && !min_distance_ok(next, hp.c4)) {
    for (int halving = 0; halving < 64 && !min_distance_ok(next, hp.c4); ++halving)
      for (int i = 0; i < n; ++i)
        next[static_cast<std::size_t>(i)] =
            0.5 * (next[static_cast<std::size_t>(i)] + positions[static_cast<std::size_t>(i)]);
    if (!min_distance_ok(next, hp.c4))
      throw ConstraintInfeasible("converge_step: could not satisfy spacing within the step bound");
  }
  return next;
}

HeadingUpdate update_scan_heading(const TargetEstimate& prev, const TargetEstimate& current,
                                  const Vec2& swarm_center, double iteration_duration,
                                  double drone_speed, double cell_size, const Vec2& prev_sd) {
  HeadingUpdate up;
  const Vec2 delta = current.position - prev.position;
  if (delta.norm() < cell_size) {
    up.scan_dir = prev_sd;
    up.scan_speed = 0.0;
    up.target_speed = 0.0;
    return up;
  }
  const double dt = current.t - prev.t;
  if (!(dt > 0.0)) throw RejectedInput("update_scan_heading: estimates must be time-ordered");
  up.target_velocity = delta / dt;
  up.target_speed = up.target_velocity.norm();
  const Vec2 toward = unit_or_zero(current.position - swarm_center);
  up.scan_dir = toward.isZero() ? prev_sd : toward;
  up.scan_speed = up.target_speed * iteration_duration * 1.25;
  up.scan_speed = std::min(up.scan_speed, drone_speed * iteration_duration);
  return up;
}

Vec2 classic_pso_velocity(const Vec2& velocity, const Vec2& position, const Vec2& personal_best,
                          const Vec2& global_best, double c0, double c1, double c2, Rng& rng) {
  const double r1 = rng.uniform();
  const double r2 = rng.uniform();
  return c0 * velocity + c1 * r1 * (personal_best - position) + c2 * r2 * (global_best - position);
}

IterationOutcome pso_iteration(SwarmState& state, const Hyperparams& hp,
                               std::span<const imaging::CaptureRecord> latest,
                               std::span<const imaging::CaptureRecord> history,
                               const imaging::ObjectiveFn& objective, double cell_size,
                               double min_duration) {
  IterationOutcome out;
  out.integration = imaging::integrate_conditional(latest, history, objective);
  out.score = out.integration.score;

  const std::vector<Vec2> before = state.positions;
  const Vec2 cog_at_capture = state.center_of_gravity();
  if (out.score < hp.threshold) {
    out.mode = Mode::Scanning;
    state.mode = Mode::Scanning;
    state.positions = scan_step(state.positions, state.scan_dir, state.scan_speed, hp.c5, hp.s);
    // The scanning branch must also respect the minimal sampling distance.
    if (!min_distance_ok(state.positions, hp.c4)) rutherford_repel(state.positions, hp.c4, state.rng);
  } else {
    out.mode = Mode::Converged;
    state.mode = Mode::Converged;
    state.best_pose = out.integration.integral.reference_pose;
    const detection::Objective obj = detection::objective_of(out.integration.integral.mask);
    out.estimate = obj.position;
    if (obj.position) {
      state.prev_estimate = state.last_estimate;
      state.last_estimate = TargetEstimate{*obj.position, state.t};
    }
    state.positions = converge_step(state.positions, hp, state.best_pose.head<2>(), state.rng);
    if (state.prev_estimate && state.last_estimate) {
      const auto up =
          update_scan_heading(*state.prev_estimate, *state.last_estimate, cog_at_capture,
                              state.last_duration > 0.0 ? state.last_duration : min_duration,
                              hp.speed, cell_size, state.scan_dir);
      state.scan_dir = up.scan_dir;
      state.scan_speed = up.scan_speed;
    }
  }

  double longest = 0.0;
  for (std::size_t i = 0; i < state.positions.size(); ++i)
    longest = std::max(longest, (state.positions[i] - before[i]).norm());
  out.duration = std::max(longest / hp.speed, min_duration);
  state.t += out.duration;
  state.last_duration = out.duration;
  ++state.iteration;
  return out;
}

}  // namespace saswarm::swarm
