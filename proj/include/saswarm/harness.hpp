#pragma once

#include "saswarm/camera.hpp"
#include "saswarm/imaging.hpp"
#include "saswarm/scene.hpp"
#include "saswarm/swarm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace saswarm::harness {

enum class SamplerKind { Swarm, BlindSequential, BlindParallel, SwarmClassicPso };

std::string to_string(SamplerKind kind);
SamplerKind sampler_from_string(const std::string& name);

/// Occlusion preset: calibrated crown geometry so that the fraction of
/// occluded vertical rays over the scene matches `per_ray_density`.
struct OcclusionPreset {
  std::string name;
  double density = 300.0;       // trees/ha
  double per_ray_density = 0.5; // expected occluded fraction of vertical rays
  int crown_disc_count = 60;
  double crown_horizontal_radius = 2.5;
};

const OcclusionPreset& occlusion_preset(const std::string& name);  // sparse|medium|dense

/// Frozen objective thresholds T (contour cells), precomputed with the
/// calibrate-t recipe: 1.1 x the largest false-positive objective over five
/// target-free seeds per preset and swarm size.
std::optional<double> default_threshold(const std::string& preset, int n);

struct SceneSpec {
  std::uint64_t seed = 1;
  double density = 300.0;
  Rect bounds{{0.0, 0.0}, {100.0, 100.0}};
  scene::TreeParamRanges ranges;
  std::string preset = "sparse";
  std::string scene_file;  // optional: load an explicit tree list instead
};

struct TargetSpec {
  bool present = true;
  scene::TargetBody body;
};

struct ClassicParams {
  double c0 = 0.6;
  double c1 = 1.0;
  double c2 = 1.0;
};

struct ScenarioConfig {
  SceneSpec scene;
  TargetSpec target;
  imaging::CameraModel camera;
  RasterSpec raster;  // auto-sized in finalize() when width == 0
  double detection_quantile = 0.995;
  swarm::Hyperparams hp;
  std::optional<double> threshold_pct;  // alternative to hp.threshold, % of reference
  Rect flight_area{{0.0, 0.0}, {100.0, 100.0}};  // scan direction bounces at its edges
  Vec2 scan_dir{0.0, 1.0};
  Vec2 start_center{50.0, 20.0};
  int history_tau = 3;
  SamplerKind sampler = SamplerKind::Swarm;
  double duration = 45.0;
  double min_iter_duration = 0.05;
  std::uint64_t swarm_seed = 1;
  ClassicParams classic;
  std::string out_dir;
  bool dump_rasters = false;
  int workers = 1;

  void finalize();       // derive raster extent, apply preset geometry
  void validate() const; // cross-module invariants; throws ConfigError
};

struct MetricsRow {
  double t = 0.0;
  int iteration = 0;
  double score = 0.0;           // objective O, contour cells
  double visibility_pct = 0.0;  // O / reference * 100
  bool over_unity = false;      // flagged when visibility exceeds 100%
  double coverage_m2 = 0.0;     // area of the OR of all footprints so far
  std::optional<Vec2> est_pos;
  std::optional<double> est_speed;
  std::optional<double> est_dir_deg;
  Vec2 gt_pos{0.0, 0.0};
  std::optional<double> pos_err;
  std::optional<double> speed_err;
  std::optional<double> dir_err_deg;
  swarm::Mode mode = swarm::Mode::Scanning;
};

struct TrajectoryRow {
  double t = 0.0;
  int drone_id = 0;
  Vec3 pose{0.0, 0.0, 0.0};
  swarm::Mode mode = swarm::Mode::Scanning;
  double score = 0.0;
  bool best_pose = false;
};

struct RunResult {
  std::vector<MetricsRow> metrics;
  std::vector<TrajectoryRow> trajectory;
  double reference_contour = 0.0;
  double resolved_threshold = 0.0;
  double max_visibility_pct = 0.0;  // MTV
};

/// Unoccluded reference objective: brute-force probe grid (altitude h_l,
/// offsets 0..25 m in 1 m steps, 16 azimuths) over an occluder-free copy of
/// the scenario; the maximum O is the 100% denominator.
double reference_contour(const ScenarioConfig& cfg);

RunResult run_scenario(const ScenarioConfig& cfg,
                       std::optional<double> reference_override = std::nullopt);

struct TrackingErrors {
  double mean_position_m = 0.0;
  double mean_speed_mps = 0.0;
  double mean_direction_deg = 0.0;
  long detections = 0;
  long direction_samples = 0;
};

/// Mean errors over detected iterations; empty when fewer than two
/// detections exist.
std::optional<TrackingErrors> tracking_errors(const std::vector<MetricsRow>& metrics);

/// T calibration: largest false-positive objective over target-free runs of
/// the given seeds, times 1.1 (floor 0.5 when no false positives appear).
struct CalibrationResult {
  double threshold = 0.5;
  double largest_false_positive = 0.0;
  std::vector<double> per_seed_max;
};
CalibrationResult calibrate_threshold(const ScenarioConfig& base, const std::vector<std::uint64_t>& seeds);

std::string metrics_csv(const std::vector<MetricsRow>& metrics);
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

/// Deterministic shortest-round-trip formatting used in all CSV output.
std::string format_double(double v);

}  // namespace saswarm::harness
