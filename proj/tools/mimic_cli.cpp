// Command-line front end: scenario generation, closed-loop runs, the
// collision-geometry benchmark, and plot-data emission.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mimic/bench.hpp"
#include "mimic/pipeline.hpp"

namespace {

int cmd_gen(const std::string& scenario, double duration, double rate,
            const std::string& out_path) {
  const auto frames = mimic::generate_scenario(scenario, duration, rate);
  if (out_path.empty() || out_path == "-") {
    mimic::serialize_stream(frames, std::cout);
  } else {
    std::ofstream os(out_path);
    if (!os) throw mimic::ConfigError("cannot open output: " + out_path);
    mimic::serialize_stream(frames, os);
  }
  std::cerr << "wrote " << frames.size() << " frames (" << scenario << ")\n";
  return 0;
}

mimic::RunConfig make_config(const std::string& config_path,
                             const std::string& scenario,
                             const std::string& input, bool no_safety,
                             const std::string& out_dir, long seed) {
  mimic::RunConfig cfg;
  if (!config_path.empty())
    cfg = mimic::load_config(config_path);
  else if (!scenario.empty())
    cfg = mimic::scenario_defaults(scenario);
  else
    cfg = mimic::scenario_defaults("cross-arm-reach");
  if (!scenario.empty()) cfg.scenario = scenario;
  if (!input.empty()) cfg.input_path = input;
  if (no_safety) cfg.safety = false;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);
  cfg.validate();
  return cfg;
}

int cmd_run(const mimic::RunConfig& cfg, bool check) {
  if (check) {
    // Re-assert forward invariance on the built-in scenarios.
    bool ok = true;
    for (const char* name : {"cross-arm-reach", "side-by-side-arm-raise"}) {
      mimic::RunConfig c = mimic::scenario_defaults(name);
      c.safety = true;
      const auto result = mimic::run_pipeline(c);
      const bool pass = result.summary.min_h >= -1e-3;
      std::cout << (pass ? "PASS " : "FAIL ") << name
                << " min_h=" << result.summary.min_h << "\n";
      ok = ok && pass;
    }
    return ok ? 0 : 3;
  }
  const auto result = mimic::run_pipeline(cfg);
  mimic::write_run_artifacts(result, cfg, cfg.out_dir);
  std::cout << "steps=" << result.summary.steps
            << " min_h=" << result.summary.min_h
            << " violation_steps=" << result.summary.violation_steps
            << " mean_rate_hz=" << result.summary.mean_rate_hz << "\n";
  std::cout << "artifacts written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_bench(const mimic::RunConfig& base, long steps,
              const std::string& out_dir) {
  mimic::RunConfig cfg = base;
  cfg.barrier.activation_distance =
      std::numeric_limits<double>::infinity();  // worst-case pairing
  const std::vector<mimic::GeomKind> kinds = {
      mimic::GeomKind::SpheresK0, mimic::GeomKind::SpheresK1,
      mimic::GeomKind::Boxes, mimic::GeomKind::Capsules};
  const auto results = mimic::run_bench(cfg, kinds, steps);
  mimic::print_bench_table(results, std::cout);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir + "/bench.csv");
    mimic::write_bench_csv(results, os);
    std::cout << "bench table written to " << out_dir << "/bench.csv\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe human-to-humanoid motion imitation toolkit"};
  app.require_subcommand(1);

  std::string config_path, scenario, input, out, run_out;
  bool no_safety = false, check = false;
  long seed = -1, steps = 300;
  double duration = 5.0, rate = 100.0;

  auto* gen = app.add_subcommand("gen", "generate a scenario stream");
  gen->add_option("--scenario", scenario, "scenario name")->required();
  gen->add_option("--duration", duration, "seconds");
  gen->add_option("--rate", rate, "frames per second");
  gen->add_option("--out", out, "output file (default stdout)");

  auto* run = app.add_subcommand("run", "run the imitation pipeline");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--scenario", scenario, "built-in scenario name");
  run->add_option("--input", input, "skeleton stream file");
  run->add_flag("--no-safety", no_safety, "bypass the CBF-QP filter");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--seed", seed, "run seed");
  run->add_flag("--check", check, "acceptance self-check mode");

  auto* bench = app.add_subcommand("bench", "collision geometry benchmark");
  bench->add_option("--config", config_path, "JSON config file");
  bench->add_option("--scenario", scenario, "built-in scenario name");
  bench->add_option("--steps", steps, "control steps per geometry");
  bench->add_option("--out", run_out, "output directory");

  std::string plot_run_dir, plot_out_dir;
  auto* plot = app.add_subcommand("plot-data", "emit plot-shaped CSVs");
  plot->add_option("--run", plot_run_dir, "run artifact directory")
      ->required();
  plot->add_option("--out", plot_out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(scenario, duration, rate, out);
    if (run->parsed())
      return cmd_run(
          make_config(config_path, scenario, input, no_safety, run_out, seed),
          check);
    if (bench->parsed())
      return cmd_bench(
          make_config(config_path, scenario, input, false, run_out, seed),
          steps, run_out);
    if (plot->parsed()) {
      mimic::emit_plot_data(plot_run_dir, plot_out_dir);
      return 0;
    }
  } catch (const mimic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
