#include "saswarm/imaging.hpp"

#include "saswarm/detection.hpp"
#include "saswarm/errors.hpp"

#include <algorithm>

namespace saswarm::imaging {

// Image formation by shadow splatting. Projecting a horizontal circle from
// the camera point onto the ground plane is again a circle (scaled by
// f = z_cam / (z_cam - z)), and the ray camera->cell hits a primitive
// exactly when the cell center lies inside its projected shadow. Painting
// per-primitive shadows into a depth buffer therefore computes the same
// nearest-hit classification as casting one ray per cell, at a fraction of
// the cost.
GroundRaster render_single(const scene::ForestScene& forest, const scene::TargetBody* target,
                           double t, const Vec3& pose, const CameraModel& camera,
                           const RasterSpec& spec, const Materials& materials) {
  camera.validate();
  spec.validate();
  const double alt = pose.z();
  double canopy = forest.max_tree_height();
  if (target) canopy = std::max(canopy, target->height);
  if (!(alt > canopy)) throw RejectedInput("render_single: pose altitude must be above the canopy");

  GroundRaster img = GroundRaster::zeros(spec);
  const double side = camera.footprint_side(alt);
  const CellBox box = cells_in_square(spec, pose.head<2>(), side);
  img.box = box;
  if (box.empty()) return img;

  const int bw = box.x1 - box.x0, bh = box.y1 - box.y0;
  img.covered.block(box.y0, box.x0, bh, bw).setConstant(1);
  img.red.block(box.y0, box.x0, bh, bw).setConstant(materials.ground[0]);
  img.green.block(box.y0, box.x0, bh, bw).setConstant(materials.ground[1]);
  img.blue.block(box.y0, box.x0, bh, bw).setConstant(materials.ground[2]);
  img.thermal.block(box.y0, box.x0, bh, bw).setConstant(materials.ground[3]);

  // Hit parameter and primitive kind per cell: 0 none, 1 trunk, 2 crown.
  std::vector<float> tbuf(static_cast<std::size_t>(bw) * bh, 2.0f);
  std::vector<std::uint8_t> kind(static_cast<std::size_t>(bw) * bh, 0);
  auto at = [&](int ix, int iy) -> std::size_t {
    return static_cast<std::size_t>(ix - box.x0) * bh + (iy - box.y0);
  };

  auto cell_range_x = [&](double lo, double hi, int& i0, int& i1) {
    i0 = std::max(box.x0, spec.cell_of_x(lo));
    i1 = std::min(box.x1 - 1, spec.cell_of_x(hi));
  };
  auto cell_range_y = [&](double lo, double hi, int& i0, int& i1) {
    i0 = std::max(box.y0, spec.cell_of_y(lo));
    i1 = std::min(box.y1 - 1, spec.cell_of_y(hi));
  };

  for (const auto& tree : forest.trees()) {
    for (const auto& disc : tree.discs) {
      const double dz = disc.center.z();
      if (dz >= alt || dz <= 0.0) continue;
      const double hit_t = 1.0 - dz / alt;
      const double f = alt / (alt - dz);
      const double sx = pose.x() + f * (disc.center.x() - pose.x());
      const double sy = pose.y() + f * (disc.center.y() - pose.y());
      const double sr = disc.radius * f;
      int x0, x1, y0, y1;
      cell_range_x(sx - sr, sx + sr, x0, x1);
      cell_range_y(sy - sr, sy + sr, y0, y1);
      const double sr2 = sr * sr;
      for (int ix = x0; ix <= x1; ++ix) {
        const double px = spec.origin.x() + (ix + 0.5) * spec.cell - sx;
        for (int iy = y0; iy <= y1; ++iy) {
          const double py = spec.origin.y() + (iy + 0.5) * spec.cell - sy;
          if (px * px + py * py > sr2) continue;
          const std::size_t idx = at(ix, iy);
          if (hit_t < tbuf[idx]) {
            tbuf[idx] = static_cast<float>(hit_t);
            kind[idx] = 2;
          }
        }
      }
    }

    // Trunk shadow: hull of the base circle and the projected top circle;
    // exact per-cell ray test within its bounding box.
    {
      const double f = alt / (alt - tree.trunk_height);
      const double txp = pose.x() + f * (tree.base.x() - pose.x());
      const double typ = pose.y() + f * (tree.base.y() - pose.y());
      const double rp = tree.trunk_radius * f;
      int x0, x1, y0, y1;
      cell_range_x(std::min(tree.base.x() - tree.trunk_radius, txp - rp),
                   std::max(tree.base.x() + tree.trunk_radius, txp + rp), x0, x1);
      cell_range_y(std::min(tree.base.y() - tree.trunk_radius, typ - rp),
                   std::max(tree.base.y() + tree.trunk_radius, typ + rp), y0, y1);
      for (int ix = x0; ix <= x1; ++ix) {
        for (int iy = y0; iy <= y1; ++iy) {
          const Vec2 c = spec.cell_center(ix, iy);
          const auto hit = scene::trunk_entry_param(tree, pose, Vec3(c.x(), c.y(), 0.0));
          if (!hit) continue;
          const std::size_t idx = at(ix, iy);
          if (*hit < tbuf[idx]) {
            tbuf[idx] = static_cast<float>(*hit);
            kind[idx] = 1;
          }
        }
      }
    }
  }

  for (int ix = box.x0; ix < box.x1; ++ix) {
    for (int iy = box.y0; iy < box.y1; ++iy) {
      const std::uint8_t k = kind[at(ix, iy)];
      if (k == 0) continue;
      const Vec4f& value = k == 1 ? materials.trunk : materials.crown;
      img.red(iy, ix) = value[0];
      img.green(iy, ix) = value[1];
      img.blue(iy, ix) = value[2];
      img.thermal(iy, ix) = value[3];
    }
  }

  if (target) {
    // Bounding box of the projected cuboid: the eight corner shadows.
    const auto tp = scene::target_pose_at(*target, t);
    const double ch = std::cos(target->heading), sh = std::sin(target->heading);
    double lox = 1e30, hix = -1e30, loy = 1e30, hiy = -1e30;
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int sz : {0, 1}) {
          const double lx = sx * 0.5 * target->depth, ly = sy * 0.5 * target->width;
          const double wx = tp.position.x() + ch * lx - sh * ly;
          const double wy = tp.position.y() + sh * lx + ch * ly;
          const double wz = sz * target->height;
          const double f = alt / (alt - wz);
          const double gx = pose.x() + f * (wx - pose.x());
          const double gy = pose.y() + f * (wy - pose.y());
          lox = std::min(lox, gx);
          hix = std::max(hix, gx);
          loy = std::min(loy, gy);
          hiy = std::max(hiy, gy);
        }
    int x0, x1, y0, y1;
    cell_range_x(lox, hix, x0, x1);
    cell_range_y(loy, hiy, y0, y1);
    const Vec4f value(static_cast<float>(target->color.x()), static_cast<float>(target->color.y()),
                      static_cast<float>(target->color.z()), static_cast<float>(target->thermal));
    for (int ix = x0; ix <= x1; ++ix) {
      for (int iy = y0; iy <= y1; ++iy) {
        const Vec2 c = spec.cell_center(ix, iy);
        const auto hit = scene::target_entry_param(*target, t, pose, Vec3(c.x(), c.y(), 0.0));
        if (!hit) continue;
        // Occluders win ties, matching the nearest-hit rule.
        if (static_cast<float>(*hit) < tbuf[at(ix, iy)]) {
          img.red(iy, ix) = value[0];
          img.green(iy, ix) = value[1];
          img.blue(iy, ix) = value[2];
          img.thermal(iy, ix) = value[3];
        }
      }
    }
  }
  return img;
}

CaptureRecord capture(const scene::ForestScene& forest, const scene::TargetBody* target, double t,
                      int drone_id, const Vec3& pose, const CameraModel& camera,
                      const RasterSpec& spec, double quantile, const Materials& materials) {
  CaptureRecord rec;
  rec.drone_id = drone_id;
  rec.pose = pose;
  rec.t = t;
  rec.footprint_side = camera.footprint_side(pose.z());
  rec.footprint = cells_in_square(spec, pose.head<2>(), rec.footprint_side);

  const GroundRaster img = render_single(forest, target, t, pose, camera, spec, materials);
  try {
    const auto field = detection::rx_scores(img);
    rec.mask = detection::threshold_mask(field, quantile);
  } catch (const DetectorUnavailable&) {
    rec.mask = BinaryRaster::zeros(spec);  // score 0 everywhere: nothing flagged
  }
  return rec;
}

namespace {

BinaryRaster union_of(std::span<const CaptureRecord> latest,
                      const std::vector<const CaptureRecord*>& extra, const CellBox& crop,
                      const std::vector<bool>& keep_latest, const RasterSpec& spec) {
  BinaryRaster u = BinaryRaster::zeros(spec);
  for (std::size_t i = 0; i < latest.size(); ++i)
    if (keep_latest[i]) u.or_with(latest[i].mask, crop);
  for (const CaptureRecord* rec : extra) u.or_with(rec->mask, crop);
  return u;
}

}  // namespace

IntegrationResult integrate_conditional(std::span<const CaptureRecord> latest,
                                        std::span<const CaptureRecord> history,
                                        const ObjectiveFn& objective) {
  if (latest.empty()) throw RejectedInput("integrate_conditional: latest set must be nonempty");
  const RasterSpec& spec = latest.front().mask.spec;
  for (const auto& rec : latest)
    if (!(rec.mask.spec == spec)) throw RejectedInput("integrate_conditional: raster spec mismatch");
  for (const auto& rec : history)
    if (!(rec.mask.spec == spec)) throw RejectedInput("integrate_conditional: raster spec mismatch");

  // (a) Best reference among the latest poses; ties favor the lowest drone id.
  std::vector<std::size_t> order(latest.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return latest[a].drone_id < latest[b].drone_id; });

  std::vector<bool> keep(latest.size(), true);
  std::size_t best_ref = order.front();
  double best_score = -1.0;
  BinaryRaster best_union;
  for (std::size_t idx : order) {
    BinaryRaster u = union_of(latest, {}, latest[idx].footprint, keep, spec);
    const double s = objective(u);
    if (s > best_score) {
      best_score = s;
      best_ref = idx;
      best_union = std::move(u);
    }
  }

  IntegrationResult res;
  res.score = best_score;
  res.integral.reference_pose = latest[best_ref].pose;
  res.integral.reference_drone = latest[best_ref].drone_id;
  res.integral.footprint = latest[best_ref].footprint;
  res.integral.mask = std::move(best_union);
  for (std::size_t idx : order)
    res.integral.contributors.push_back({latest[idx].t, latest[idx].drone_id});

  // (b) History, most recent first, only on footprint overlap and strict
  // improvement.
  std::vector<const CaptureRecord*> hist;
  hist.reserve(history.size());
  for (const auto& rec : history) hist.push_back(&rec);
  std::sort(hist.begin(), hist.end(), [](const CaptureRecord* a, const CaptureRecord* b) {
    if (a->t != b->t) return a->t > b->t;
    return a->drone_id < b->drone_id;
  });
  std::vector<const CaptureRecord*> accepted;
  for (const CaptureRecord* rec : hist) {
    if (!rec->footprint.overlaps(res.integral.footprint)) continue;
    const CaptureKey key{rec->t, rec->drone_id};
    if (std::find(res.integral.contributors.begin(), res.integral.contributors.end(), key) !=
        res.integral.contributors.end())
      continue;
    BinaryRaster trial = res.integral.mask;
    trial.or_with(rec->mask, res.integral.footprint);
    const double s = objective(trial);
    if (s > res.score) {
      res.log.push_back({key, res.score, s, false});
      res.integral.mask = std::move(trial);
      res.integral.contributors.push_back(key);
      accepted.push_back(rec);
      res.score = s;
    }
  }

  // (c) Removal pass over the latest set, ascending drone id.
  for (std::size_t idx : order) {
    if (!keep[idx]) continue;
    keep[idx] = false;
    BinaryRaster trial = union_of(latest, accepted, res.integral.footprint, keep, spec);
    const double s = objective(trial);
    if (s > res.score) {
      const CaptureKey key{latest[idx].t, latest[idx].drone_id};
      res.log.push_back({key, res.score, s, true});
      res.integral.mask = std::move(trial);
      std::erase(res.integral.contributors, key);
      res.score = s;
    } else {
      keep[idx] = true;
    }
  }
  return res;
}

}  // namespace saswarm::imaging
