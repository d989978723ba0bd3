#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "microsim/harness.hpp"

using namespace microsim;

int main(int argc, char** argv) {
  CLI::App app{"Event-driven epidemic microsimulation"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  bool no_optimize = false;
  std::string trace_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "global simulation seed");
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic base file, MicroSim files and care map");
  add_common(synth);

  auto* run = app.add_subcommand("run", "run one simulation and write the infection log");
  add_common(run);
  run->add_flag("--no-optimize", no_optimize, "keep every entity on the timeline");
  run->add_option("--trace", trace_path, "write one line per executed event");

  std::uint32_t replicates = 10;
  std::uint32_t workers = std::max(1u, std::thread::hardware_concurrency());
  bool write_logs = false;
  auto* reps = app.add_subcommand("replicates", "run consecutive seeds and aggregate attack rates");
  add_common(reps);
  reps->add_flag("--no-optimize", no_optimize, "keep every entity on the timeline");
  reps->add_option("-n,--count", replicates, "number of replicates")->check(CLI::PositiveNumber);
  reps->add_option("-j,--jobs", workers, "worker threads")->check(CLI::PositiveNumber);
  reps->add_flag("--logs", write_logs, "write <log>.<seed> for every replicate");

  std::string log_path;
  std::string out_dir = ".";
  auto* plot = app.add_subcommand("plot", "write incidence and place-type CSV files and SVG charts");
  plot->add_option("log", log_path, "infection log")->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plot->parsed()) {
      const PlotReport r = cmd_plot(log_path, out_dir);
      std::cout << "entries\t" << r.entries << "\nwrote\t" << r.incidence_csv.string() << "\nwrote\t"
                << r.place_csv.string() << "\nwrote\t" << r.incidence_svg.string() << "\nwrote\t"
                << r.place_svg.string() << '\n';
      return 0;
    }
    RunConfig cfg = load_run_config(config);
    if (seed) {
      cfg.sim.seed = *seed;
      cfg.synth.rng_seed = *seed;
    }
    if (no_optimize) cfg.sim.optimize = false;

    if (synth->parsed()) {
      const SynthReport r = cmd_synth(cfg);
      std::cout << "persons\t" << r.persons << "\nworkplaces\t" << r.workplaces << "\nsquares\t" << r.squares
                << "\ncare_units\t" << r.care_units << '\n';
      for (const auto& e : r.exceptions) std::cerr << "exception: " << e << '\n';
    } else if (run->parsed()) {
      std::ofstream trace;
      if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) throw Error("cannot write trace file " + trace_path);
      }
      cmd_run(cfg, std::cout, trace_path.empty() ? nullptr : &trace);
    } else if (reps->parsed()) {
      cmd_replicates(cfg, replicates, workers, write_logs, &std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
