#include "saswarm/scene.hpp"

#include "saswarm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace saswarm::scene {

double TreeParamRanges::max_reach() const {
  return std::max(trunk_radius_max, crown_horizontal_radius + disc_radius_max);
}

void TreeParamRanges::validate() const {
  auto range_ok = [](double lo, double hi) { return std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && hi >= lo; };
  if (!range_ok(trunk_height_min, trunk_height_max)) throw RejectedInput("invalid trunk height range");
  if (!range_ok(trunk_radius_min, trunk_radius_max)) throw RejectedInput("invalid trunk radius range");
  if (!range_ok(tree_height_min, tree_height_max)) throw RejectedInput("invalid tree height range");
  if (!range_ok(disc_radius_min, disc_radius_max)) throw RejectedInput("invalid disc radius range");
  if (tree_height_min <= trunk_height_max)
    throw RejectedInput("tree height range must lie above trunk height range");
  if (crown_disc_count < 0) throw RejectedInput("crown disc count must be >= 0");
  if (!(crown_horizontal_radius > 0.0)) throw RejectedInput("crown horizontal radius must be positive");
}

void TargetBody::validate() const {
  if (!(height > 0.0 && width > 0.0 && depth > 0.0))
    throw RejectedInput("target dimensions must be positive");
  for (const auto& seg : script) {
    if (seg.kind == MotionSegment::Kind::Rest && seg.duration < 0.0)
      throw RejectedInput("rest duration must be nonnegative");
    if (seg.kind == MotionSegment::Kind::MoveTo && !(seg.speed > 0.0))
      throw RejectedInput("move speed must be positive");
  }
}

TargetPose target_pose_at(const TargetBody& target, double t) {
  if (t < 0.0) throw RejectedInput("target_pose_at: t must be >= 0");
  Vec2 pos = target.start;
  double clock = 0.0;
  for (const auto& seg : target.script) {
    if (seg.kind == MotionSegment::Kind::Rest) {
      if (t < clock + seg.duration) return {pos, Vec2::Zero()};
      clock += seg.duration;
    } else {
      const Vec2 delta = seg.waypoint - pos;
      const double dist = delta.norm();
      const double dur = dist / seg.speed;
      if (dist > 0.0 && t < clock + dur) {
        const Vec2 dir = delta / dist;
        return {pos + dir * seg.speed * (t - clock), dir * seg.speed};
      }
      pos = seg.waypoint;
      clock += dur;
    }
  }
  return {pos, Vec2::Zero()};  // beyond script end: hold
}

namespace {

void check_segment(const Vec3& from, const Vec3& to) {
  if ((from - to).squaredNorm() < 1e-18) throw RejectedInput("degenerate ray segment");
  if (!(from.z() > to.z())) throw RejectedInput("ray must point downward (from.z > to.z)");
}

}  // namespace

std::optional<double> target_entry_param(const TargetBody& target, double t, const Vec3& from,
                                         const Vec3& to) {
  check_segment(from, to);
  const TargetPose pose = target_pose_at(target, t);
  const double c = std::cos(target.heading), s = std::sin(target.heading);
  // Into the target's local frame: translate, rotate by -heading.
  auto local = [&](const Vec3& w) {
    const double dx = w.x() - pose.position.x();
    const double dy = w.y() - pose.position.y();
    return Vec3(c * dx + s * dy, -s * dx + c * dy, w.z() - 0.5 * target.height);
  };
  const Vec3 p0 = local(from);
  const Vec3 d = local(to) - p0;
  const Vec3 half(0.5 * target.depth, 0.5 * target.width, 0.5 * target.height);

  double t0 = 0.0, t1 = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double p = p0[axis], dd = d[axis], h = half[axis];
    if (std::abs(dd) < 1e-15) {
      if (std::abs(p) > h) return std::nullopt;
      continue;
    }
    double ta = (-h - p) / dd, tb = (h - p) / dd;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  if (t1 <= 0.0 || t0 >= 1.0) return std::nullopt;
  return t0;  // entry (may be 0 if the segment starts inside)
}

bool ray_hits_target(const TargetBody& target, double t, const Vec3& from, const Vec3& to) {
  return target_entry_param(target, t, from, to).has_value();
}

ForestScene::ForestScene(std::uint64_t seed, double density, Rect bounds, TreeParamRanges ranges,
                         std::vector<Tree> trees)
    : seed_(seed), density_(density), bounds_(bounds), ranges_(ranges), trees_(std::move(trees)) {
  for (const auto& tree : trees_) max_tree_height_ = std::max(max_tree_height_, tree.tree_height);
  build_index();
}

void ForestScene::build_index() {
  tree_index_.clear();
  tree_index_.reserve(trees_.size());
  for (const auto& tree : trees_) {
    TreeIndex ti;
    ti.base_x = tree.base.x();
    ti.base_y = tree.base.y();
    ti.trunk_top = tree.trunk_height;
    ti.trunk_r2 = tree.trunk_radius * tree.trunk_radius;
    ti.cx = tree.base.x();
    ti.cy = tree.base.y();
    ti.z_min = tree.tree_height;
    ti.z_max = tree.trunk_height;
    double r = tree.trunk_radius;
    for (const auto& disc : tree.discs) {
      ti.disc_x.push_back(disc.center.x());
      ti.disc_y.push_back(disc.center.y());
      ti.disc_z.push_back(disc.center.z());
      ti.disc_r2.push_back(disc.radius * disc.radius);
      ti.z_min = std::min(ti.z_min, disc.center.z());
      ti.z_max = std::max(ti.z_max, disc.center.z());
      const double d = std::hypot(disc.center.x() - ti.cx, disc.center.y() - ti.cy) + disc.radius;
      r = std::max(r, d);
    }
    if (tree.discs.empty()) {
      ti.z_min = 0.0;
      ti.z_max = tree.trunk_height;
    }
    ti.radius = r;
    tree_index_.push_back(std::move(ti));
  }

  const double reach = ranges_.max_reach();
  grid_origin_ = bounds_.min - Vec2(reach, reach);
  const Vec2 span = bounds_.max + Vec2(reach, reach) - grid_origin_;
  grid_w_ = std::max(1, static_cast<int>(std::ceil(span.x() / grid_cell_)));
  grid_h_ = std::max(1, static_cast<int>(std::ceil(span.y() / grid_cell_)));
  grid_.assign(static_cast<std::size_t>(grid_w_) * grid_h_, {});
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    const Vec2& b = trees_[i].base;
    const double rr = tree_index_[i].radius;
    int x0 = std::clamp(static_cast<int>(std::floor((b.x() - rr - grid_origin_.x()) / grid_cell_)), 0, grid_w_ - 1);
    int x1 = std::clamp(static_cast<int>(std::floor((b.x() + rr - grid_origin_.x()) / grid_cell_)), 0, grid_w_ - 1);
    int y0 = std::clamp(static_cast<int>(std::floor((b.y() - rr - grid_origin_.y()) / grid_cell_)), 0, grid_h_ - 1);
    int y1 = std::clamp(static_cast<int>(std::floor((b.y() + rr - grid_origin_.y()) / grid_cell_)), 0, grid_h_ - 1);
    for (int gy = y0; gy <= y1; ++gy)
      for (int gx = x0; gx <= x1; ++gx)
        grid_[static_cast<std::size_t>(gy) * grid_w_ + gx].push_back(static_cast<std::int32_t>(i));
  }
}

template <typename Fn>
void ForestScene::for_candidates(const Vec2& a, const Vec2& b, Fn&& fn) const {
  if (grid_.empty()) return;
  double ax = (a.x() - grid_origin_.x()) / grid_cell_;
  double ay = (a.y() - grid_origin_.y()) / grid_cell_;
  double bx = (b.x() - grid_origin_.x()) / grid_cell_;
  double by = (b.y() - grid_origin_.y()) / grid_cell_;
  const double dx0 = bx - ax, dy0 = by - ay;

  // Liang-Barsky clip to the grid rectangle (in grid units).
  double t0 = 0.0, t1 = 1.0;
  auto clip = [&](double p, double q) {
    if (p == 0.0) return q >= 0.0;
    double r = q / p;
    if (p < 0.0) {
      if (r > t1) return false;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return false;
      if (r < t1) t1 = r;
    }
    return true;
  };
  if (!clip(-dx0, ax) || !clip(dx0, grid_w_ - ax) || !clip(-dy0, ay) || !clip(dy0, grid_h_ - ay))
    return;
  const double cx0 = ax + t0 * dx0, cy0 = ay + t0 * dy0;
  const double cx1 = ax + t1 * dx0, cy1 = ay + t1 * dy0;

  // 2D DDA over the grid cells crossed by the clipped segment. Cells are
  // visited in ray order, and fn returns the best hit parameter found so
  // far: once the next cell starts beyond it, no closer hit is possible
  // (trees are inserted into every cell their reach overlaps).
  int cx = std::clamp(static_cast<int>(std::floor(cx0)), 0, grid_w_ - 1);
  int cy = std::clamp(static_cast<int>(std::floor(cy0)), 0, grid_h_ - 1);
  const int ex = std::clamp(static_cast<int>(std::floor(cx1)), 0, grid_w_ - 1);
  const int ey = std::clamp(static_cast<int>(std::floor(cy1)), 0, grid_h_ - 1);
  const double dx = cx1 - cx0, dy = cy1 - cy0;
  const int sx = dx > 0 ? 1 : -1, sy = dy > 0 ? 1 : -1;
  double t_max_x = dx == 0.0 ? 1e30 : (((dx > 0 ? cx + 1 : cx) - cx0) / dx);
  double t_max_y = dy == 0.0 ? 1e30 : (((dy > 0 ? cy + 1 : cy) - cy0) / dy);
  const double t_dx = dx == 0.0 ? 1e30 : std::abs(1.0 / dx);
  const double t_dy = dy == 0.0 ? 1e30 : std::abs(1.0 / dy);
  // Clipped-segment params map to full-segment params via t0 + t*(t1-t0).
  const double t_span = t1 - t0;

  std::int32_t seen[64];
  int n_seen = 0;
  double best = 2.0;
  for (int guard = grid_w_ + grid_h_ + 2; guard > 0; --guard) {
    for (std::int32_t id : grid_[static_cast<std::size_t>(cy) * grid_w_ + cx]) {
      bool dup = false;
      for (int k = 0; k < n_seen; ++k)
        if (seen[k] == id) { dup = true; break; }
      if (!dup) {
        if (n_seen < 64) seen[n_seen++] = id;
        best = std::min(best, fn(static_cast<std::size_t>(id)));
      }
    }
    if (cx == ex && cy == ey) break;
    const double t_next = t0 + std::min(t_max_x, t_max_y) * t_span;
    if (t_next >= best) break;
    if (t_max_x < t_max_y) {
      cx += sx;
      t_max_x += t_dx;
      if (cx < 0 || cx >= grid_w_) break;
    } else {
      cy += sy;
      t_max_y += t_dy;
      if (cy < 0 || cy >= grid_h_) break;
    }
  }
}

namespace {

// First parameter at which the open segment overlaps a solid finite
// vertical cylinder (z in [0, top]), or nullopt. Assumes a downward segment
// (d.z < 0).
std::optional<double> cylinder_entry(const Vec3& p0, const Vec3& d, const Vec2& center,
                                     double radius, double top) {
  const double dz = d.z();
  const double tz0 = (top - p0.z()) / dz;  // z(t) <= top from here on
  const double tz1 = (0.0 - p0.z()) / dz;  // z(t) >= 0 up to here

  const double ox = p0.x() - center.x(), oy = p0.y() - center.y();
  const double a = d.x() * d.x() + d.y() * d.y();
  const double b = 2.0 * (ox * d.x() + oy * d.y());
  const double c = ox * ox + oy * oy - radius * radius;
  double th0, th1;
  if (a < 1e-14) {
    if (c > 0.0) return std::nullopt;  // vertical ray outside the column
    th0 = -1e30;
    th1 = 1e30;
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    th0 = (-b - sq) / (2.0 * a);
    th1 = (-b + sq) / (2.0 * a);
  }
  const double lo = std::max({th0, tz0, 0.0});
  const double hi = std::min({th1, tz1, 1.0});
  if (lo >= hi) return std::nullopt;
  return lo;
}

}  // namespace

std::optional<double> trunk_entry_param(const Tree& tree, const Vec3& from, const Vec3& to) {
  check_segment(from, to);
  return cylinder_entry(from, to - from, tree.base, tree.trunk_radius, tree.trunk_height);
}

std::optional<ForestScene::OccluderHit> ForestScene::first_occluder(const Vec3& from,
                                                                    const Vec3& to) const {
  check_segment(from, to);
  const Vec3 d = to - from;
  const double inv_dz = 1.0 / d.z();  // negative: z decreases along the ray
  const double ax = from.x(), ay = from.y();
  const double dx = d.x(), dy = d.y();
  const double seg_len2 = dx * dx + dy * dy;
  double best = 2.0;
  bool best_trunk = false;

  for_candidates(from.head<2>(), to.head<2>(), [&](std::size_t idx) -> double {
    const TreeIndex& ti = tree_index_[idx];

    // Whole-tree reject: 2D distance of the segment to the crown circle.
    double u = 0.0;
    if (seg_len2 > 0.0)
      u = std::clamp(((ti.cx - ax) * dx + (ti.cy - ay) * dy) / seg_len2, 0.0, 1.0);
    const double qx = ax + u * dx - ti.cx, qy = ay + u * dy - ti.cy;
    if (qx * qx + qy * qy > ti.radius * ti.radius) return best;

    const Tree& tree = trees_[idx];
    if (auto t = cylinder_entry(from, d, tree.base, tree.trunk_radius, tree.trunk_height)) {
      if (*t < best) {
        best = *t;
        best_trunk = true;
      }
    }

    if (ti.disc_z.empty()) return best;
    // Parameter window where the ray crosses this tree's crown z extent.
    const double t_enter = std::max((ti.z_max - from.z()) * inv_dz, 0.0);
    const double t_exit = std::min((ti.z_min - from.z()) * inv_dz, 1.0);
    if (t_enter >= t_exit || t_enter >= best) return best;

    const std::size_t k = ti.disc_z.size();
    for (std::size_t j = 0; j < k; ++j) {
      const double t = (ti.disc_z[j] - from.z()) * inv_dz;
      if (t <= 0.0 || t >= 1.0 || t >= best) continue;
      const double hx = ax + t * dx - ti.disc_x[j];
      const double hy = ay + t * dy - ti.disc_y[j];
      if (hx * hx + hy * hy <= ti.disc_r2[j]) {
        best = t;
        best_trunk = false;
      }
    }
    return best;
  });
  if (best > 1.0) return std::nullopt;
  return OccluderHit{best, best_trunk};
}

std::optional<double> ForestScene::first_occluder_hit(const Vec3& from, const Vec3& to) const {
  auto hit = first_occluder(from, to);
  if (!hit) return std::nullopt;
  return hit->t;
}

bool ForestScene::ray_occluded(const Vec3& from, const Vec3& to) const {
  return first_occluder(from, to).has_value();
}

ForestScene generate_forest(std::uint64_t seed, double density, const Rect& bounds,
                            const TreeParamRanges& ranges) {
  if (!std::isfinite(density) || density < 0.0)
    throw RejectedInput("density must be finite and >= 0");
  if (!bounds.valid()) throw RejectedInput("bounds area must be positive");
  ranges.validate();

  const long count = std::lround(density * bounds.area_ha());
  const Rect inset = bounds.inset(ranges.max_reach());
  if (count > 0 && !inset.valid())
    throw RejectedInput("bounds too small for the configured tree reach");

  const Rng master(seed);
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    Rng rng = master.split(static_cast<std::uint64_t>(i) + 1);
    Tree tree;
    tree.base.x() = rng.uniform(inset.min.x(), inset.max.x());
    tree.base.y() = rng.uniform(inset.min.y(), inset.max.y());
    tree.trunk_height = rng.uniform(ranges.trunk_height_min, ranges.trunk_height_max);
    tree.trunk_radius = rng.uniform(ranges.trunk_radius_min, ranges.trunk_radius_max);
    tree.tree_height = rng.uniform(ranges.tree_height_min, ranges.tree_height_max);
    const double mid = 0.5 * (tree.trunk_height + tree.tree_height);
    const double half_span = 0.5 * (tree.tree_height - tree.trunk_height);
    tree.discs.reserve(static_cast<std::size_t>(ranges.crown_disc_count));
    for (int j = 0; j < ranges.crown_disc_count; ++j) {
      // Uniform in the unit ball by rejection, then scaled to the crown
      // ellipsoid.
      double ux, uy, uz;
      do {
        ux = rng.uniform(-1.0, 1.0);
        uy = rng.uniform(-1.0, 1.0);
        uz = rng.uniform(-1.0, 1.0);
      } while (ux * ux + uy * uy + uz * uz > 1.0);
      CrownDisc disc;
      disc.center = Vec3(tree.base.x() + ux * ranges.crown_horizontal_radius,
                         tree.base.y() + uy * ranges.crown_horizontal_radius, mid + uz * half_span);
      disc.radius = rng.uniform(ranges.disc_radius_min, ranges.disc_radius_max);
      tree.discs.push_back(disc);
    }
    trees.push_back(std::move(tree));
  }
  return ForestScene(seed, density, bounds, ranges, std::move(trees));
}

namespace {

void put(std::ostream& os, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  os.write(buf, p - buf);
}

double take(std::istringstream& is, const char* what) {
  std::string tok;
  if (!(is >> tok)) throw ConfigError(std::string("scene file: missing ") + what);
  double v;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ConfigError(std::string("scene file: bad number for ") + what);
  return v;
}

}  // namespace

std::string serialize_scene(const ForestScene& scene) {
  std::ostringstream os;
  os << "saswarm-scene 1\n";
  os << "seed " << scene.seed() << "\n";
  os << "density_trees_per_ha ";
  put(os, scene.density());
  os << "\nbounds_m ";
  put(os, scene.bounds().min.x());
  os << " ";
  put(os, scene.bounds().min.y());
  os << " ";
  put(os, scene.bounds().max.x());
  os << " ";
  put(os, scene.bounds().max.y());
  const auto& rr = scene.ranges();
  os << "\nranges ";
  for (double v : {rr.trunk_height_min, rr.trunk_height_max, rr.trunk_radius_min, rr.trunk_radius_max,
                   rr.tree_height_min, rr.tree_height_max, static_cast<double>(rr.crown_disc_count),
                   rr.disc_radius_min, rr.disc_radius_max, rr.crown_horizontal_radius}) {
    put(os, v);
    os << " ";
  }
  os << "\ntree_count " << scene.trees().size() << "\n";
  for (const auto& tree : scene.trees()) {
    os << "tree ";
    for (double v : {tree.base.x(), tree.base.y(), tree.trunk_height, tree.trunk_radius, tree.tree_height}) {
      put(os, v);
      os << " ";
    }
    os << tree.discs.size() << "\n";
    for (const auto& disc : tree.discs) {
      os << "disc ";
      put(os, disc.center.x());
      os << " ";
      put(os, disc.center.y());
      os << " ";
      put(os, disc.center.z());
      os << " ";
      put(os, disc.radius);
      os << "\n";
    }
  }
  return os.str();
}

void save_scene(const ForestScene& scene, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << serialize_scene(scene);
}

ForestScene load_scene(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scene file: " + path);
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(f, line)) throw ConfigError(std::string("scene file: missing ") + what);
    return std::istringstream(line);
  };

  {
    auto is = next_line("magic");
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "saswarm-scene" || version != 1) throw ConfigError("scene file: bad header");
  }
  std::uint64_t seed = 0;
  {
    auto is = next_line("seed");
    std::string key;
    is >> key >> seed;
    if (key != "seed") throw ConfigError("scene file: expected seed");
  }
  double density;
  {
    auto is = next_line("density");
    std::string key;
    is >> key;
    density = take(is, "density");
  }
  Rect bounds;
  {
    auto is = next_line("bounds");
    std::string key;
    is >> key;
    bounds.min.x() = take(is, "bounds");
    bounds.min.y() = take(is, "bounds");
    bounds.max.x() = take(is, "bounds");
    bounds.max.y() = take(is, "bounds");
  }
  TreeParamRanges rr;
  {
    auto is = next_line("ranges");
    std::string key;
    is >> key;
    rr.trunk_height_min = take(is, "ranges");
    rr.trunk_height_max = take(is, "ranges");
    rr.trunk_radius_min = take(is, "ranges");
    rr.trunk_radius_max = take(is, "ranges");
    rr.tree_height_min = take(is, "ranges");
    rr.tree_height_max = take(is, "ranges");
    rr.crown_disc_count = static_cast<int>(take(is, "ranges"));
    rr.disc_radius_min = take(is, "ranges");
    rr.disc_radius_max = take(is, "ranges");
    rr.crown_horizontal_radius = take(is, "ranges");
  }
  std::size_t count = 0;
  {
    auto is = next_line("tree_count");
    std::string key;
    is >> key >> count;
    if (key != "tree_count") throw ConfigError("scene file: expected tree_count");
  }
  std::vector<Tree> trees;
  trees.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto is = next_line("tree");
    std::string key;
    is >> key;
    if (key != "tree") throw ConfigError("scene file: expected tree record");
    Tree tree;
    tree.base.x() = take(is, "tree");
    tree.base.y() = take(is, "tree");
    tree.trunk_height = take(is, "tree");
    tree.trunk_radius = take(is, "tree");
    tree.tree_height = take(is, "tree");
    std::size_t nd = 0;
    is >> nd;
    tree.discs.reserve(nd);
    for (std::size_t j = 0; j < nd; ++j) {
      auto ds = next_line("disc");
      std::string dk;
      ds >> dk;
      if (dk != "disc") throw ConfigError("scene file: expected disc record");
      CrownDisc disc;
      disc.center.x() = take(ds, "disc");
      disc.center.y() = take(ds, "disc");
      disc.center.z() = take(ds, "disc");
      disc.radius = take(ds, "disc");
      tree.discs.push_back(disc);
    }
    trees.push_back(std::move(tree));
  }
  return ForestScene(seed, density, bounds, rr, std::move(trees));
}

}  // namespace saswarm::scene
