// Command-line front end: scenario runs, paired mechanism comparisons, trace
// synthesis, and hull/density inspection. Exit codes: 0 success, 2 bad usage
// or config, 3 I/O or data failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "vidfec/harness.hpp"
#include "vidfec/netstate.hpp"

namespace {

bool log_enabled() {
  const char* v = std::getenv("VIDFEC_LOG");
  return v != nullptr && std::string(v) != "0";
}

void log_note(const std::string& msg) {
  if (log_enabled()) std::fprintf(stderr, "vidfec: %s\n", msg.c_str());
}

void print_table(const std::vector<vidfec::QoeRow>& rows) {
  std::printf("%-15s %8s %8s %10s %10s %8s %10s\n", "mechanism", "seed", "plr%", "decodable",
              "psnr_db", "ssim", "overhead");
  for (const auto& r : rows)
    std::printf("%-15s %8llu %8.3g %10.4f %10.4g %8.4f %10.4f\n", r.mechanism.c_str(),
                static_cast<unsigned long long>(r.seed), r.plr_setting, r.decodable_ratio,
                r.mean_psnr_db, r.mean_ssim, r.overhead_pct);
}

void write_reports(const std::string& out_dir, const std::string& stem,
                   const std::vector<vidfec::QoeRow>& rows) {
  std::filesystem::create_directories(out_dir);
  const std::string csv = out_dir + "/" + stem + ".csv";
  const std::string dat = out_dir + "/" + stem + ".dat";
  vidfec::save_qoe_csv(csv, rows);
  vidfec::save_qoe_dat(dat, rows);
  std::printf("wrote %s and %s\n", csv.c_str(), dat.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic packet-level lab for FEC-protected video over lossy channels"};
  app.require_subcommand(1);

  // --- run -------------------------------------------------------------------
  std::string run_config;
  std::string run_out = ".";
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  auto* run_cmd = app.add_subcommand("run", "run one scenario config, one QoE row per repetition");
  run_cmd->add_option("config", run_config, "scenario config file")->required();
  run_cmd->add_option("--seed", run_seed, "override [run].seed")->each([&](const std::string&) {
    run_seed_set = true;
  });
  run_cmd->add_option("--out", run_out, "output directory (default .)");
  run_cmd->callback([&] {
    vidfec::ScenarioConfig cfg = vidfec::load_scenario_config(run_config);
    if (run_seed_set) cfg.run.seed = run_seed;
    log_note("running " + run_config + " with seed " + std::to_string(cfg.run.seed));
    const auto rows = vidfec::run_scenario(cfg);
    print_table(rows);
    write_reports(run_out, "qoe", rows);
  });

  // --- compare ---------------------------------------------------------------
  std::vector<std::string> cmp_configs;
  std::string cmp_out = ".";
  auto* cmp_cmd =
      app.add_subcommand("compare", "paired mechanism comparison over a shared loss realization");
  cmp_cmd->add_option("configs", cmp_configs, "scenario configs differing only in [mechanism]")
      ->required()
      ->expected(-1);
  cmp_cmd->add_option("--out", cmp_out, "output directory (default .)");
  cmp_cmd->callback([&] {
    std::vector<vidfec::ScenarioConfig> cfgs;
    cfgs.reserve(cmp_configs.size());
    for (const auto& path : cmp_configs) {
      log_note("loading " + path);
      cfgs.push_back(vidfec::load_scenario_config(path));
    }
    const auto table = vidfec::compare_mechanisms(cfgs);
    print_table(table);
    write_reports(cmp_out, "compare", table);
  });

  // --- trace synth -------------------------------------------------------------
  auto* trace_cmd = app.add_subcommand("trace", "trace tooling");
  trace_cmd->require_subcommand(1);
  std::string synth_out;
  std::string synth_motion = "medium";
  std::uint64_t synth_seed = 1;
  vidfec::SynthesisSpec spec;
  auto* synth_cmd = trace_cmd->add_subcommand("synth", "synthesize a frame trace and save it as CSV");
  synth_cmd->add_option("--out", synth_out, "output trace file")->required();
  synth_cmd->add_option("--gops", spec.gop_count, "GoP count (default 5)");
  synth_cmd->add_option("--n-ratio", spec.gop.n_ratio, "GoP length (default 19)");
  synth_cmd->add_option("--m-ratio", spec.gop.m_ratio, "anchor spacing (default 3)");
  synth_cmd->add_option("--motion", synth_motion, "low|medium|high (default medium)")
      ->check(CLI::IsMember({"low", "medium", "high"}));
  synth_cmd->add_option("--width", spec.width, "frame width (default 176)");
  synth_cmd->add_option("--height", spec.height, "frame height (default 144)");
  synth_cmd->add_option("--fps", spec.fps, "frame rate (default 30)");
  synth_cmd->add_option("--size-i", spec.size_i, "pin I-frame size in bytes (0 = sampled)");
  synth_cmd->add_option("--size-p", spec.size_p, "pin P-frame size in bytes (0 = sampled)");
  synth_cmd->add_option("--size-b", spec.size_b, "pin B-frame size in bytes (0 = sampled)");
  synth_cmd->add_option("--seed", synth_seed, "synthesis seed (default 1)");
  synth_cmd->callback([&] {
    spec.motion = vidfec::detail::motion_profile_from_string("--motion", synth_motion);
    const auto video = vidfec::synthesize_video(spec, synth_seed);
    vidfec::save_trace(video.trace, synth_out);
    std::printf("wrote %s (%zu frames, %s motion)\n", synth_out.c_str(), video.trace.frames.size(),
                synth_motion.c_str());
  });

  // --- hull --------------------------------------------------------------------
  std::string hull_method;
  std::string hull_csv;
  int hull_strips = 64;
  auto* hull_cmd = app.add_subcommand("hull", "node coverage hull: area and density");
  hull_cmd->add_option("method", hull_method, "quick (exact) or bfp (approximate)")
      ->required()
      ->check(CLI::IsMember({"quick", "bfp"}));
  hull_cmd->add_option("positions", hull_csv, "node positions CSV")->required();
  hull_cmd->add_option("--strips", hull_strips, "bfp strip count (default 64)")
      ->check(CLI::PositiveNumber);
  hull_cmd->callback([&] {
    const auto nodes = vidfec::load_positions_csv(hull_csv);
    const auto pts = vidfec::to_points(nodes);
    const auto poly =
        hull_method == "quick" ? vidfec::quickhull(pts) : vidfec::bfp_hull(pts, hull_strips);
    const double area_m2 = vidfec::polygon_area(poly);
    std::printf("nodes: %zu\nhull vertices: %zu\narea_m2: %.17g\n", pts.size(), poly.size(), area_m2);
    if (area_m2 > 0.0)
      std::printf("density_per_km2: %.17g\n", static_cast<double>(pts.size()) / (area_m2 / 1e6));
    else
      std::printf("density_per_km2: undefined (degenerate hull)\n");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
