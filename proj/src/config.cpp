#include "saswarm/config.hpp"

#include "saswarm/aperture.hpp"
#include "saswarm/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace saswarm::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_num(const std::string& v, const std::string& key) {
  double out;
  const std::string t = trim(v);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size())
    throw ConfigError("bad numeric value for key '" + key + "': " + v);
  return out;
}

long parse_int(const std::string& v, const std::string& key) {
  const double d = parse_num(v, key);
  if (d != std::floor(d)) throw ConfigError("key '" + key + "' expects an integer, got " + v);
  return static_cast<long>(d);
}

bool parse_bool(const std::string& v, const std::string& key) {
  const std::string t = trim(v);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("key '" + key + "' expects true/false, got " + v);
}

Vec2 parse_vec2(const std::string& v, const std::string& key) {
  std::istringstream is(v);
  double x, y;
  if (!(is >> x >> y)) throw ConfigError("key '" + key + "' expects two numbers, got " + v);
  std::string rest;
  if (is >> rest) throw ConfigError("key '" + key + "' expects exactly two numbers, got " + v);
  return {x, y};
}

std::vector<scene::MotionSegment> parse_script(const std::string& v, const std::string& key) {
  std::vector<scene::MotionSegment> script;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, '|')) {
    part = trim(part);
    if (part.empty()) continue;
    std::istringstream is(part);
    std::string kind;
    is >> kind;
    scene::MotionSegment seg;
    if (kind == "move") {
      double x, y, speed;
      if (!(is >> x >> y >> speed))
        throw ConfigError("key '" + key + "': move expects 'move x y speed', got '" + part + "'");
      seg.kind = scene::MotionSegment::Kind::MoveTo;
      seg.waypoint = {x, y};
      seg.speed = speed;
    } else if (kind == "rest") {
      double dur;
      if (!(is >> dur))
        throw ConfigError("key '" + key + "': rest expects 'rest seconds', got '" + part + "'");
      seg.kind = scene::MotionSegment::Kind::Rest;
      seg.duration = dur;
    } else {
      throw ConfigError("key '" + key + "': unknown script segment '" + kind + "'");
    }
    script.push_back(seg);
  }
  return script;
}

void apply_preset(harness::ScenarioConfig& cfg, const std::string& name) {
  const auto& p = harness::occlusion_preset(name);
  cfg.scene.preset = name;
  cfg.scene.density = p.density;
  cfg.scene.ranges.crown_disc_count = p.crown_disc_count;
  cfg.scene.ranges.crown_horizontal_radius = p.crown_horizontal_radius;
}

using Setter = std::function<void(harness::ScenarioConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scene.preset", [](auto& c, auto& v, auto&) { apply_preset(c, trim(v)); }},
      {"scene.seed", [](auto& c, auto& v, auto& k) { c.scene.seed = static_cast<std::uint64_t>(parse_int(v, k)); }},
      {"scene.density_trees_per_ha", [](auto& c, auto& v, auto& k) { c.scene.density = parse_num(v, k); }},
      {"scene.bounds_min_m", [](auto& c, auto& v, auto& k) { c.scene.bounds.min = parse_vec2(v, k); }},
      {"scene.bounds_max_m", [](auto& c, auto& v, auto& k) { c.scene.bounds.max = parse_vec2(v, k); }},
      {"scene.file", [](auto& c, auto& v, auto&) { c.scene.scene_file = trim(v); }},
      {"scene.crown_disc_count", [](auto& c, auto& v, auto& k) { c.scene.ranges.crown_disc_count = static_cast<int>(parse_int(v, k)); }},
      {"scene.crown_horizontal_radius_m", [](auto& c, auto& v, auto& k) { c.scene.ranges.crown_horizontal_radius = parse_num(v, k); }},
      {"scene.trunk_height_min_m", [](auto& c, auto& v, auto& k) { c.scene.ranges.trunk_height_min = parse_num(v, k); }},
      {"scene.trunk_height_max_m", [](auto& c, auto& v, auto& k) { c.scene.ranges.trunk_height_max = parse_num(v, k); }},
      {"scene.trunk_radius_min_m", [](auto& c, auto& v, auto& k) { c.scene.ranges.trunk_radius_min = parse_num(v, k); }},
      {"scene.trunk_radius_max_m", [](auto& c, auto& v, auto& k) { c.scene.ranges.trunk_radius_max = parse_num(v, k); }},
      {"scene.tree_height_min_m", [](auto& c, auto& v, auto& k) { c.scene.ranges.tree_height_min = parse_num(v, k); }},
      {"scene.tree_height_max_m", [](auto& c, auto& v, auto& k) { c.scene.ranges.tree_height_max = parse_num(v, k); }},
      {"scene.disc_radius_min_m", [](auto& c, auto& v, auto& k) { c.scene.ranges.disc_radius_min = parse_num(v, k); }},
      {"scene.disc_radius_max_m", [](auto& c, auto& v, auto& k) { c.scene.ranges.disc_radius_max = parse_num(v, k); }},

      {"target.present", [](auto& c, auto& v, auto& k) { c.target.present = parse_bool(v, k); }},
      {"target.start_m", [](auto& c, auto& v, auto& k) { c.target.body.start = parse_vec2(v, k); }},
      {"target.heading_rad", [](auto& c, auto& v, auto& k) { c.target.body.heading = parse_num(v, k); }},
      {"target.height_m", [](auto& c, auto& v, auto& k) { c.target.body.height = parse_num(v, k); }},
      {"target.width_m", [](auto& c, auto& v, auto& k) { c.target.body.width = parse_num(v, k); }},
      {"target.depth_m", [](auto& c, auto& v, auto& k) { c.target.body.depth = parse_num(v, k); }},
      {"target.color_rgb", [](auto& c, auto& v, auto& k) {
         std::istringstream is(v);
         double r, g, b;
         if (!(is >> r >> g >> b)) throw ConfigError("key '" + k + "' expects three numbers");
         c.target.body.color = Vec3(r, g, b);
       }},
      {"target.thermal", [](auto& c, auto& v, auto& k) { c.target.body.thermal = parse_num(v, k); }},
      {"target.script", [](auto& c, auto& v, auto& k) { c.target.body.script = parse_script(v, k); }},

      {"camera.fov_deg", [](auto& c, auto& v, auto& k) { c.camera.fov_deg = parse_num(v, k); }},
      {"camera.px", [](auto& c, auto& v, auto& k) { c.camera.px = static_cast<int>(parse_int(v, k)); }},

      {"raster.cell_m", [](auto& c, auto& v, auto& k) { c.raster.cell = parse_num(v, k); }},
      {"raster.origin_m", [](auto& c, auto& v, auto& k) { c.raster.origin = parse_vec2(v, k); }},
      {"raster.width_cells", [](auto& c, auto& v, auto& k) { c.raster.width = static_cast<int>(parse_int(v, k)); }},
      {"raster.height_cells", [](auto& c, auto& v, auto& k) { c.raster.height = static_cast<int>(parse_int(v, k)); }},

      {"detection.quantile", [](auto& c, auto& v, auto& k) { c.detection_quantile = parse_num(v, k); }},

      {"swarm.n", [](auto& c, auto& v, auto& k) { c.hp.n = static_cast<int>(parse_int(v, k)); }},
      {"swarm.c1_m", [](auto& c, auto& v, auto& k) { c.hp.c1 = parse_num(v, k); }},
      {"swarm.c2_m", [](auto& c, auto& v, auto& k) { c.hp.c2 = parse_num(v, k); }},
      {"swarm.c3_m", [](auto& c, auto& v, auto& k) { c.hp.c3 = parse_num(v, k); }},
      {"swarm.c4_m", [](auto& c, auto& v, auto& k) { c.hp.c4 = parse_num(v, k); }},
      {"swarm.c5", [](auto& c, auto& v, auto& k) { c.hp.c5 = parse_num(v, k); }},
      {"swarm.s_m", [](auto& c, auto& v, auto& k) { c.hp.s = parse_num(v, k); }},
      {"swarm.t_cells", [](auto& c, auto& v, auto& k) { c.hp.threshold = parse_num(v, k); c.threshold_pct.reset(); }},
      {"swarm.t_pct", [](auto& c, auto& v, auto& k) { c.threshold_pct = parse_num(v, k); }},
      {"swarm.speed_mps", [](auto& c, auto& v, auto& k) { c.hp.speed = parse_num(v, k); }},
      {"swarm.h_l_m", [](auto& c, auto& v, auto& k) { c.hp.h_l = parse_num(v, k); }},
      {"swarm.dh_m", [](auto& c, auto& v, auto& k) { c.hp.dh = parse_num(v, k); }},
      {"swarm.min_baseline_m", [](auto& c, auto& v, auto& k) { c.hp.min_baseline = parse_num(v, k); }},
      {"swarm.scan_dir", [](auto& c, auto& v, auto& k) { c.scan_dir = parse_vec2(v, k); }},
      {"swarm.start_center_m", [](auto& c, auto& v, auto& k) { c.start_center = parse_vec2(v, k); }},
      {"swarm.seed", [](auto& c, auto& v, auto& k) { c.swarm_seed = static_cast<std::uint64_t>(parse_int(v, k)); }},

      {"imaging.history_tau", [](auto& c, auto& v, auto& k) { c.history_tau = static_cast<int>(parse_int(v, k)); }},

      {"run.sampler", [](auto& c, auto& v, auto&) { c.sampler = harness::sampler_from_string(trim(v)); }},
      {"run.flight_min_m", [](auto& c, auto& v, auto& k) { c.flight_area.min = parse_vec2(v, k); }},
      {"run.flight_max_m", [](auto& c, auto& v, auto& k) { c.flight_area.max = parse_vec2(v, k); }},
      {"run.duration_s", [](auto& c, auto& v, auto& k) { c.duration = parse_num(v, k); }},
      {"run.min_iter_duration_s", [](auto& c, auto& v, auto& k) { c.min_iter_duration = parse_num(v, k); }},
      {"run.out_dir", [](auto& c, auto& v, auto&) { c.out_dir = trim(v); }},
      {"run.dump_rasters", [](auto& c, auto& v, auto& k) { c.dump_rasters = parse_bool(v, k); }},
      {"run.workers", [](auto& c, auto& v, auto& k) { c.workers = static_cast<int>(parse_int(v, k)); }},

      {"classic.c0", [](auto& c, auto& v, auto& k) { c.classic.c0 = parse_num(v, k); }},
      {"classic.c1", [](auto& c, auto& v, auto& k) { c.classic.c1 = parse_num(v, k); }},
      {"classic.c2", [](auto& c, auto& v, auto& k) { c.classic.c2 = parse_num(v, k); }},
  };
  return table;
}

}  // namespace

harness::ScenarioConfig parse_scenario(const std::string& text) {
  harness::ScenarioConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' outside a section");
    const std::string full = section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end())
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    it->second(cfg, value, full);
  }
  cfg.finalize();
  cfg.validate();
  return cfg;
}

harness::ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

std::string fd(double v) { return harness::format_double(v); }

std::string script_str(const std::vector<scene::MotionSegment>& script) {
  std::ostringstream os;
  bool first = true;
  for (const auto& seg : script) {
    if (!first) os << " | ";
    first = false;
    if (seg.kind == scene::MotionSegment::Kind::MoveTo)
      os << "move " << fd(seg.waypoint.x()) << " " << fd(seg.waypoint.y()) << " " << fd(seg.speed);
    else
      os << "rest " << fd(seg.duration);
  }
  return os.str();
}

}  // namespace

std::string echo_scenario(const harness::ScenarioConfig& cfg) {
  std::ostringstream os;
  const auto& rr = cfg.scene.ranges;
  os << "[scene]\n";
  os << "seed = " << cfg.scene.seed << "\n";
  os << "density_trees_per_ha = " << fd(cfg.scene.density) << "\n";
  os << "bounds_min_m = " << fd(cfg.scene.bounds.min.x()) << " " << fd(cfg.scene.bounds.min.y()) << "\n";
  os << "bounds_max_m = " << fd(cfg.scene.bounds.max.x()) << " " << fd(cfg.scene.bounds.max.y()) << "\n";
  if (!cfg.scene.scene_file.empty()) os << "file = " << cfg.scene.scene_file << "\n";
  os << "crown_disc_count = " << rr.crown_disc_count << "\n";
  os << "crown_horizontal_radius_m = " << fd(rr.crown_horizontal_radius) << "\n";
  os << "trunk_height_min_m = " << fd(rr.trunk_height_min) << "\n";
  os << "trunk_height_max_m = " << fd(rr.trunk_height_max) << "\n";
  os << "trunk_radius_min_m = " << fd(rr.trunk_radius_min) << "\n";
  os << "trunk_radius_max_m = " << fd(rr.trunk_radius_max) << "\n";
  os << "tree_height_min_m = " << fd(rr.tree_height_min) << "\n";
  os << "tree_height_max_m = " << fd(rr.tree_height_max) << "\n";
  os << "disc_radius_min_m = " << fd(rr.disc_radius_min) << "\n";
  os << "disc_radius_max_m = " << fd(rr.disc_radius_max) << "\n";
  os << "\n[target]\n";
  os << "present = " << (cfg.target.present ? "true" : "false") << "\n";
  os << "start_m = " << fd(cfg.target.body.start.x()) << " " << fd(cfg.target.body.start.y()) << "\n";
  os << "heading_rad = " << fd(cfg.target.body.heading) << "\n";
  os << "height_m = " << fd(cfg.target.body.height) << "\n";
  os << "width_m = " << fd(cfg.target.body.width) << "\n";
  os << "depth_m = " << fd(cfg.target.body.depth) << "\n";
  os << "color_rgb = " << fd(cfg.target.body.color.x()) << " " << fd(cfg.target.body.color.y())
     << " " << fd(cfg.target.body.color.z()) << "\n";
  os << "thermal = " << fd(cfg.target.body.thermal) << "\n";
  if (!cfg.target.body.script.empty()) os << "script = " << script_str(cfg.target.body.script) << "\n";
  os << "\n[camera]\n";
  os << "fov_deg = " << fd(cfg.camera.fov_deg) << "\n";
  os << "px = " << cfg.camera.px << "\n";
  os << "\n[raster]\n";
  os << "cell_m = " << fd(cfg.raster.cell) << "\n";
  os << "origin_m = " << fd(cfg.raster.origin.x()) << " " << fd(cfg.raster.origin.y()) << "\n";
  os << "width_cells = " << cfg.raster.width << "\n";
  os << "height_cells = " << cfg.raster.height << "\n";
  os << "\n[detection]\n";
  os << "quantile = " << fd(cfg.detection_quantile) << "\n";
  os << "\n[swarm]\n";
  os << "n = " << cfg.hp.n << "\n";
  os << "c1_m = " << fd(cfg.hp.c1) << "\n";
  os << "c2_m = " << fd(cfg.hp.c2) << "\n";
  os << "c3_m = " << fd(cfg.hp.c3) << "\n";
  os << "c4_m = " << fd(cfg.hp.c4) << "\n";
  os << "c5 = " << fd(cfg.hp.c5) << "\n";
  os << "s_m = " << fd(cfg.hp.s) << "\n";
  if (cfg.threshold_pct)
    os << "t_pct = " << fd(*cfg.threshold_pct) << "\n";
  else
    os << "t_cells = " << fd(cfg.hp.threshold) << "\n";
  os << "speed_mps = " << fd(cfg.hp.speed) << "\n";
  os << "h_l_m = " << fd(cfg.hp.h_l) << "\n";
  os << "dh_m = " << fd(cfg.hp.dh) << "\n";
  os << "min_baseline_m = " << fd(cfg.hp.min_baseline) << "\n";
  os << "scan_dir = " << fd(cfg.scan_dir.x()) << " " << fd(cfg.scan_dir.y()) << "\n";
  os << "start_center_m = " << fd(cfg.start_center.x()) << " " << fd(cfg.start_center.y()) << "\n";
  os << "seed = " << cfg.swarm_seed << "\n";
  os << "\n[imaging]\n";
  os << "history_tau = " << cfg.history_tau << "\n";
  os << "\n[run]\n";
  os << "sampler = " << harness::to_string(cfg.sampler) << "\n";
  os << "flight_min_m = " << fd(cfg.flight_area.min.x()) << " " << fd(cfg.flight_area.min.y()) << "\n";
  os << "flight_max_m = " << fd(cfg.flight_area.max.x()) << " " << fd(cfg.flight_area.max.y()) << "\n";
  os << "duration_s = " << fd(cfg.duration) << "\n";
  os << "min_iter_duration_s = " << fd(cfg.min_iter_duration) << "\n";
  if (!cfg.out_dir.empty()) os << "out_dir = " << cfg.out_dir << "\n";
  os << "dump_rasters = " << (cfg.dump_rasters ? "true" : "false") << "\n";
  os << "workers = " << cfg.workers << "\n";
  os << "\n[classic]\n";
  os << "c0 = " << fd(cfg.classic.c0) << "\n";
  os << "c1 = " << fd(cfg.classic.c1) << "\n";
  os << "c2 = " << fd(cfg.classic.c2) << "\n";
  return os.str();
}

harness::ScenarioConfig preset_scenario(const std::string& preset, int n) {
  harness::ScenarioConfig cfg;
  apply_preset(cfg, preset);
  cfg.hp.n = n;
  // Paper-style geometry: c4 follows the collision-avoidance closed form,
  // cognitive/social steps scale with it, the swarm average altitude is
  // held near 40 m.
  const auto rep = aperture::sampling_loss(n, 35.0, 1.0, 50.0, 512L * 512L, 0.05);
  const double c4 = n == 10 ? 4.2 : rep.c4;
  cfg.hp.c4 = std::max(c4, 0.2);
  cfg.hp.s = cfg.hp.c4;
  cfg.hp.c1 = cfg.hp.c4 / 4.2;
  cfg.hp.c2 = 2.0 * cfg.hp.c1;
  cfg.hp.c3 = 2.0;
  cfg.hp.h_l = n == 10 ? 35.0 : (n == 5 ? 39.0 : (n == 3 ? 38.0 : 40.0 - 0.5 * (n - 1)));
  if (auto t = harness::default_threshold(preset, n)) cfg.hp.threshold = *t;

  // The forest extends beyond the flight area by the widest lateral reach
  // of any footprint, so patrol sweeps never image past the tree line.
  cfg.flight_area = {{0.0, 0.0}, {100.0, 100.0}};
  const double top_alt = std::max(41.0, cfg.hp.h_l + (n - 1) * cfg.hp.dh);
  const double margin =
      0.5 * (n - 1) * cfg.hp.s + 0.5 * cfg.camera.footprint_side(top_alt) + 2.0;
  cfg.scene.bounds = {cfg.flight_area.min - Vec2(margin, margin),
                      cfg.flight_area.max + Vec2(margin, margin)};
  cfg.start_center = {50.0, 20.0};
  cfg.target.body.start = {50.0, 55.0};
  cfg.finalize();
  return cfg;
}

}  // namespace saswarm::config
