#include "saswarm/aperture.hpp"
#include "saswarm/config.hpp"
#include "saswarm/errors.hpp"
#include "saswarm/harness.hpp"
#include "saswarm/scene.hpp"
#include "saswarm/stats.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using saswarm::harness::format_double;

std::string default_out_dir() {
  if (const char* env = std::getenv("SASWARM_OUT_DIR")) return env;
  return "saswarm_out";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    seeds.push_back(std::stoull(tok));
  }
  return seeds;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

int run_one(saswarm::harness::ScenarioConfig cfg, const std::string& tag, bool verbose) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto result = saswarm::harness::run_scenario(cfg);
  const std::string prefix = cfg.out_dir + "/" + (tag.empty() ? "" : tag + "_");
  write_file(prefix + "metrics.csv", saswarm::harness::metrics_csv(result.metrics));
  if (!result.trajectory.empty())
    write_file(prefix + "trajectory.csv", saswarm::harness::trajectory_csv(result.trajectory));
  write_file(prefix + "config_echo.ini", saswarm::config::echo_scenario(cfg));
  if (verbose) {
    std::cout << "sampler=" << saswarm::harness::to_string(cfg.sampler)
              << " seed=" << cfg.scene.seed << " iterations=" << result.metrics.size()
              << " reference=" << format_double(result.reference_contour)
              << " T=" << format_double(result.resolved_threshold)
              << " MTV=" << format_double(result.max_visibility_pct) << "%\n";
  }
  if (auto err = saswarm::harness::tracking_errors(result.metrics); err && verbose) {
    std::cout << "tracking: pos_err=" << format_double(err->mean_position_m)
              << "m speed_err=" << format_double(err->mean_speed_mps)
              << "mps dir_err=" << format_double(err->mean_direction_deg)
              << "deg over " << err->detections << " detections\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive drone-swarm synthetic-aperture sampling simulator"};
  app.require_subcommand(1);

  // ---- run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Execute a scenario from a config file");
  std::string run_config, run_out, run_seeds;
  std::int64_t run_seed = -1;
  int run_workers = 0;
  bool run_dump = false, run_verbose = true;
  run->add_option("--config", run_config, "Scenario config file")->required();
  run->add_option("--out", run_out, "Output directory (default $SASWARM_OUT_DIR or ./saswarm_out)");
  run->add_option("--seed", run_seed, "Override scene seed");
  run->add_option("--seeds", run_seeds, "Comma-separated scene seeds (one run each)");
  run->add_option("--workers", run_workers, "Worker threads for rendering");
  run->add_flag("--dump-rasters", run_dump, "Dump best-integral masks per iteration");
  run->add_flag("--quiet{false}", run_verbose, "Suppress the summary line");

  // ---- aperture -----------------------------------------------------------
  auto* ap = app.add_subcommand("aperture", "Collision-avoidance and sampling-loss calculators");
  int ap_n = 10;
  double ap_hl = 35.0, ap_dh = 1.0, ap_fov = 50.0, ap_e = 0.05, ap_c4 = -1.0;
  long ap_px = 512L * 512L;
  bool ap_csv = false;
  ap->add_option("--n", ap_n, "Swarm size");
  ap->add_option("--h-l", ap_hl, "Lowest altitude, m");
  ap->add_option("--dh", ap_dh, "Altitude step, m");
  ap->add_option("--fov", ap_fov, "Field of view, deg");
  ap->add_option("--px", ap_px, "Pixel count (e.g. 262144 for 512x512)");
  ap->add_option("--e", ap_e, "Pose error, m");
  ap->add_option("--c4", ap_c4, "Spacing override for the aperture diameter, m");
  ap->add_flag("--csv", ap_csv, "Emit CSV instead of aligned text");

  // ---- stats --------------------------------------------------------------
  auto* st = app.add_subcommand("stats", "Closed-form visibility models vs Monte-Carlo oracle");
  double st_static_d = -1.0;
  int st_static_nmax = 100;
  std::string st_d_list, st_ns_list, st_no_mult;
  int st_np = 10;
  long st_pixels = 1000000;
  std::uint64_t st_seed = 7;
  st->add_option("--static-d", st_static_d, "Static sweep: occlusion density D");
  st->add_option("--static-n-max", st_static_nmax, "Static sweep: N = 1..n_max");
  st->add_option("--d-list", st_d_list, "Moving sweep: comma-separated D values");
  st->add_option("--ns-list", st_ns_list, "Moving sweep: comma-separated N_s values");
  st->add_option("--no-mult", st_no_mult, "Moving sweep: N_o as multiples of N_s");
  st->add_option("--np", st_np, "Moving sweep: N_p");
  st->add_option("--pixels", st_pixels, "Monte-Carlo pixels per row");
  st->add_option("--seed", st_seed, "Monte-Carlo seed");

  // ---- calibrate-t ----------------------------------------------------------
  auto* ct = app.add_subcommand("calibrate-t", "Objective threshold from target-free runs");
  std::string ct_preset = "sparse", ct_seeds = "101,102,103,104,105";
  int ct_n = 10, ct_workers = 0;
  double ct_duration = 15.0;
  ct->add_option("--preset", ct_preset, "Occlusion preset: sparse|medium|dense");
  ct->add_option("--n", ct_n, "Swarm size");
  ct->add_option("--seeds", ct_seeds, "Comma-separated target-free scene seeds");
  ct->add_option("--duration", ct_duration, "Scan duration per seed, s");
  ct->add_option("--workers", ct_workers, "Worker threads");

  // ---- dump-scene -----------------------------------------------------------
  auto* ds = app.add_subcommand("dump-scene", "Write a procedural scene to a replay file");
  std::uint64_t ds_seed = 1;
  std::string ds_preset = "sparse", ds_out = "scene.txt", ds_in;
  double ds_density = -1.0;
  ds->add_option("--seed", ds_seed, "Scene seed");
  ds->add_option("--preset", ds_preset, "Occlusion preset: sparse|medium|dense");
  ds->add_option("--density", ds_density, "Override trees/ha");
  ds->add_option("--out", ds_out, "Output path");
  ds->add_option("--in", ds_in, "Load this scene file and re-dump it (replay check)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = saswarm::config::load_scenario(run_config);
      if (!run_out.empty())
        cfg.out_dir = run_out;
      else if (cfg.out_dir.empty())
        cfg.out_dir = default_out_dir();
      if (run_workers > 0) cfg.workers = run_workers;
      if (run_dump) cfg.dump_rasters = true;
      if (run_seed >= 0) cfg.scene.seed = static_cast<std::uint64_t>(run_seed);
      if (!run_seeds.empty()) {
        for (std::uint64_t seed : parse_seed_list(run_seeds)) {
          auto c = cfg;
          c.scene.seed = seed;
          run_one(c, "seed" + std::to_string(seed), run_verbose);
        }
        return 0;
      }
      return run_one(cfg, "", run_verbose);
    }

    if (*ap) {
      const auto rep = saswarm::aperture::sampling_loss(ap_n, ap_hl, ap_dh, ap_fov, ap_px, ap_e);
      const double c4 = ap_c4 >= 0.0 ? ap_c4 : rep.c4;
      const double diameter = saswarm::aperture::aperture_diameter(ap_n, c4);
      if (ap_csv) {
        std::cout << "n,h_l_m,dh_m,fov_deg,px,e_m,c_l_m2,c_h_m2,c_avg_m2,c_pxl_m2,c_pxh_m2,"
                     "sl_dh,sl_e,sl,c4_m,aperture_m\n";
        std::cout << rep.n << ',' << format_double(rep.h_l) << ',' << format_double(rep.dh) << ','
                  << format_double(rep.fov_deg) << ',' << rep.px << ',' << format_double(rep.e)
                  << ',' << format_double(rep.c_l) << ',' << format_double(rep.c_h) << ','
                  << format_double(rep.c_avg) << ',' << format_double(rep.c_pxl) << ','
                  << format_double(rep.c_pxh) << ',' << format_double(rep.sl_dh) << ','
                  << format_double(rep.sl_e) << ',' << format_double(rep.sl) << ','
                  << format_double(c4) << ',' << format_double(diameter) << '\n';
      } else {
        auto line = [](const char* k, double v, const char* unit) {
          std::cout << "  " << k;
          for (int i = static_cast<int>(std::string(k).size()); i < 22; ++i) std::cout << ' ';
          std::cout << format_double(v) << " " << unit << "\n";
        };
        std::cout << "sampling geometry (n=" << rep.n << ")\n";
        line("c_l", rep.c_l, "m^2");
        line("c_h", rep.c_h, "m^2");
        line("c_avg", rep.c_avg, "m^2");
        line("c_pxl", rep.c_pxl, "m^2/px");
        line("c_pxh", rep.c_pxh, "m^2/px");
        line("SL_dh", rep.sl_dh, "");
        line("SL_e", rep.sl_e, "");
        line("SL", rep.sl, "");
        line("c4", rep.c4, "m");
        line("aperture diameter", diameter, ap_c4 >= 0.0 ? "m (at given c4)" : "m");
      }
      return 0;
    }

    if (*st) {
      if (st_static_d >= 0.0) {
        std::cout << "d,n,v_static\n";
        for (int n = 1; n <= st_static_nmax; ++n)
          std::cout << format_double(st_static_d) << ',' << n << ','
                    << format_double(saswarm::stats::visibility_static(st_static_d, n)) << '\n';
        return 0;
      }
      if (st_d_list.empty() || st_ns_list.empty() || st_no_mult.empty())
        throw saswarm::ConfigError(
            "stats: pass either --static-d or all of --d-list/--ns-list/--no-mult");
      std::cout << "d,np,ns,no,nv,v_closed,v_mc,stderr\n";
      for (const auto& dtok : parse_seed_list(st_d_list)) (void)dtok;  // validated below
      std::stringstream ds_(st_d_list), ns_(st_ns_list);
      std::string tok;
      std::vector<double> dvals, nmults;
      std::vector<int> nsvals;
      while (std::getline(ds_, tok, ',')) dvals.push_back(std::stod(tok));
      while (std::getline(ns_, tok, ',')) nsvals.push_back(std::stoi(tok));
      std::stringstream ms_(st_no_mult);
      while (std::getline(ms_, tok, ',')) nmults.push_back(std::stod(tok));
      for (double d : dvals) {
        for (int ns : nsvals) {
          for (double mult : nmults) {
            saswarm::stats::VisibilityParams p;
            p.occlusion_density = d;
            p.n_parallel = st_np;
            p.n_sequential = ns;
            p.dt = 1.0;
            p.target_speed = 1.0;
            p.target_length = mult * ns;  // N_o = mult * N_s
            p.mean_signal = 0.0;
            p.var_signal = 0.75;
            p.mean_occluder = 0.5;
            p.var_occluder = 0.25;
            const double closed = saswarm::stats::visibility_moving(p);
            const auto mc = saswarm::stats::monte_carlo_visibility(p, st_pixels, st_seed);
            std::cout << format_double(d) << ',' << st_np << ',' << ns << ','
                      << format_double(p.n_overlap()) << ',' << format_double(p.n_visible()) << ','
                      << format_double(closed) << ',' << format_double(mc.visibility) << ','
                      << format_double(mc.std_error) << '\n';
          }
        }
      }
      return 0;
    }

    if (*ct) {
      auto cfg = saswarm::config::preset_scenario(ct_preset, ct_n);
      cfg.duration = ct_duration;
      if (ct_workers > 0) cfg.workers = ct_workers;
      const auto seeds = parse_seed_list(ct_seeds);
      const auto res = saswarm::harness::calibrate_threshold(cfg, seeds);
      std::cout << "preset=" << ct_preset << " n=" << ct_n << "\n";
      for (std::size_t i = 0; i < seeds.size(); ++i)
        std::cout << "  seed " << seeds[i]
                  << " max_false_positive=" << format_double(res.per_seed_max[i]) << "\n";
      std::cout << "largest_false_positive=" << format_double(res.largest_false_positive) << "\n";
      std::cout << "T=" << format_double(res.threshold) << "\n";
      return 0;
    }

    if (*ds) {
      if (!ds_in.empty()) {
        const auto scn = saswarm::scene::load_scene(ds_in);
        saswarm::scene::save_scene(scn, ds_out);
        std::cout << "re-dumped " << scn.trees().size() << " trees to " << ds_out << "\n";
        return 0;
      }
      const auto& preset = saswarm::harness::occlusion_preset(ds_preset);
      saswarm::scene::TreeParamRanges ranges;
      ranges.crown_disc_count = preset.crown_disc_count;
      ranges.crown_horizontal_radius = preset.crown_horizontal_radius;
      const double density = ds_density >= 0.0 ? ds_density : preset.density;
      const auto scn = saswarm::scene::generate_forest(
          ds_seed, density, saswarm::Rect{{0.0, 0.0}, {100.0, 100.0}}, ranges);
      saswarm::scene::save_scene(scn, ds_out);
      std::cout << "wrote " << scn.trees().size() << " trees to " << ds_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
