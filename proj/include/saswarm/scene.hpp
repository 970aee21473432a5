#pragma once

#include "saswarm/geometry.hpp"
#include "saswarm/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace saswarm::scene {

/// Opaque horizontal disc (crown foliage stand-in).
struct CrownDisc {
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 0.0;
};

struct Tree {
  Vec2 base{0.0, 0.0};
  double trunk_height = 0.0;
  double trunk_radius = 0.0;
  double tree_height = 0.0;
  std::vector<CrownDisc> discs;
};

/// Draw ranges and crown shape for procedural trees.
struct TreeParamRanges {
  double trunk_height_min = 4.0, trunk_height_max = 8.0;
  double trunk_radius_min = 0.20, trunk_radius_max = 0.50;
  double tree_height_min = 20.0, tree_height_max = 25.0;
  int crown_disc_count = 60;
  double disc_radius_min = 0.2, disc_radius_max = 0.8;
  double crown_horizontal_radius = 2.5;  // horizontal semi-axis of the crown ellipsoid

  double max_reach() const;  // horizontal extent a tree can occupy
  void validate() const;
};

/// Piecewise-linear target motion: move to a waypoint at constant speed, or
/// hold position for a duration. Position beyond the script end is held.
struct MotionSegment {
  enum class Kind { MoveTo, Rest } kind = Kind::Rest;
  Vec2 waypoint{0.0, 0.0};  // MoveTo
  double speed = 0.0;       // MoveTo, m/s
  double duration = 0.0;    // Rest, s
};

struct TargetBody {
  Vec2 start{0.0, 0.0};     // footprint center at t = 0
  double heading = 0.0;     // rad, rotation of the footprint about z
  double height = 1.8;
  double width = 0.5;       // local y extent
  double depth = 0.3;       // local x extent
  Vec3 color{0.20, 0.25, 0.80};
  double thermal = 37.0;
  std::vector<MotionSegment> script;

  void validate() const;
};

struct TargetPose {
  Vec2 position{0.0, 0.0};
  Vec2 velocity{0.0, 0.0};
};

/// Footprint center and velocity at time t (piecewise linear, held after
/// the script ends).
TargetPose target_pose_at(const TargetBody& target, double t);

/// Segment-vs-target test at the target's time-t pose. Open segment; the
/// ray must point downward (from.z > to.z).
bool ray_hits_target(const TargetBody& target, double t, const Vec3& from, const Vec3& to);

/// Entry parameter of the segment into the target cuboid, if any.
std::optional<double> target_entry_param(const TargetBody& target, double t, const Vec3& from,
                                         const Vec3& to);

class ForestScene {
 public:
  ForestScene() = default;
  ForestScene(std::uint64_t seed, double density, Rect bounds, TreeParamRanges ranges,
              std::vector<Tree> trees);

  std::uint64_t seed() const { return seed_; }
  double density() const { return density_; }
  const Rect& bounds() const { return bounds_; }
  const TreeParamRanges& ranges() const { return ranges_; }
  const std::vector<Tree>& trees() const { return trees_; }
  double max_tree_height() const { return max_tree_height_; }

  /// True iff the open segment from->to intersects a trunk cylinder or a
  /// crown disc. Requires from.z > to.z and a non-degenerate segment.
  bool ray_occluded(const Vec3& from, const Vec3& to) const;

  struct OccluderHit {
    double t = 0.0;
    bool is_trunk = false;
  };

  /// Nearest occluder along the segment, if any.
  std::optional<OccluderHit> first_occluder(const Vec3& from, const Vec3& to) const;

  /// Smallest parameter t in (0, 1) at which the segment meets an occluder.
  std::optional<double> first_occluder_hit(const Vec3& from, const Vec3& to) const;

 private:
  void build_index();
  std::uint64_t seed_ = 0;
  double density_ = 0.0;
  Rect bounds_;
  TreeParamRanges ranges_;
  std::vector<Tree> trees_;
  double max_tree_height_ = 0.0;

  // Precomputed per-tree query acceleration: tight crown bounding circle,
  // crown z extent, and disc data in flat arrays.
  struct TreeIndex {
    double cx = 0.0, cy = 0.0;     // crown circle center
    double radius = 0.0;           // crown circle radius (incl. disc radii)
    double z_min = 0.0, z_max = 0.0;
    double trunk_top = 0.0, trunk_r2 = 0.0;
    double base_x = 0.0, base_y = 0.0;
    std::vector<double> disc_x, disc_y, disc_z, disc_r2;
  };
  std::vector<TreeIndex> tree_index_;

  // Uniform grid over the scene; each cell lists trees whose horizontal
  // reach overlaps it, so a 2D walk along the ray sees every candidate.
  double grid_cell_ = 5.0;
  int grid_w_ = 0, grid_h_ = 0;
  Vec2 grid_origin_{0.0, 0.0};
  std::vector<std::vector<std::int32_t>> grid_;

  template <typename Fn>
  void for_candidates(const Vec2& a, const Vec2& b, Fn&& fn) const;
};

/// Entry parameter of a downward open segment into one trunk cylinder.
std::optional<double> trunk_entry_param(const Tree& tree, const Vec3& from, const Vec3& to);

/// Deterministic procedural forest. Tree count = round(density * area_ha);
/// draws are ordered tree-index major, attribute minor, from a splittable
/// seeded stream, so regeneration is bit-identical.
ForestScene generate_forest(std::uint64_t seed, double density, const Rect& bounds,
                            const TreeParamRanges& ranges = {});

/// Exact-replay serialization (seed, density, explicit tree list).
std::string serialize_scene(const ForestScene& scene);
void save_scene(const ForestScene& scene, const std::string& path);
ForestScene load_scene(const std::string& path);

}  // namespace saswarm::scene
