#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "microsim/harness.hpp"
#include "microsim/infection_log.hpp"

namespace microsim {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.empty()) throw ConfigError("missing output path");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

template <class F>
void write_file(const fs::path& path, F&& writer) {
  std::ofstream out = open_out(path);
  writer(out);
  out.flush();
  if (!out) throw Error("writing " + path.string() + " failed");
}

}  // namespace

SynthReport cmd_synth(const RunConfig& cfg) {
  SynthConfig s = cfg.synth;
  s.hospital_branch_code = cfg.population.hospital_branch_code;
  s.validate();
  const std::vector<BaseFileRow> rows = synthesize_population(s);
  BuildOptions bo;
  bo.reference_year = s.reference_year;
  MicroSimFiles files = build_microsim_files(rows, bo);
  const GridIndex grid = GridIndex::build(files.xy);
  const Population pop = Population::build(files.persons, files.workplaces, grid, cfg.population);

  if (!cfg.files.base_file.empty()) write_file(cfg.files.base_file, [&](std::ostream& o) { write_base_file(o, rows); });
  write_file(cfg.files.popfile, [&](std::ostream& o) { write_popfile(o, files.persons); });
  write_file(cfg.files.workplacefile, [&](std::ostream& o) { write_workplacefile(o, files.workplaces); });
  write_file(cfg.files.xyfile, [&](std::ostream& o) { write_xyfile(o, files.xy); });
  SynthReport r;
  if (!cfg.files.caremap.empty()) {
    if (pop.er_units().empty()) throw Error("the synthetic population has no hospital for the care map");
    const CareUnitMap care = precompute_care_map(grid, pop.er_units(), pop.did_units());
    write_file(cfg.files.caremap, [&](std::ostream& o) { write_care_map(o, care); });
  }
  r.persons = files.persons.size();
  r.workplaces = files.workplaces.size();
  r.squares = files.xy.size();
  r.care_units = pop.er_units().size() + pop.did_units().size();
  r.exceptions = std::move(files.exceptions);
  return r;
}

RunResult run_simulation(const LoadedData& data, const RunConfig& cfg, std::ostream& log, std::ostream* trace) {
  Simulation sim = make_simulation(data, cfg);
  InfectionLogWriter writer(log, cfg.log_batch);
  sim.set_log_sink([&](const InfectionLogEntry& e) { writer.append(e); });
  if (trace) sim.set_trace(trace);
  sim.seed_outbreak(cfg.outbreak);
  RunResult r;
  r.summary = sim.run();
  writer.flush();
  r.log_entries = writer.written();
  return r;
}

RunResult cmd_run(const RunConfig& cfg, std::ostream& report, std::ostream* trace) {
  const LoadedData data = load_data(cfg);
  std::ofstream log = open_out(cfg.files.log);
  const RunResult r = run_simulation(data, cfg, log, trace);
  report << format_summary(r.summary);
  return r;
}

fs::path replicate_log_path(const fs::path& log, std::uint64_t seed) {
  fs::path p = log;
  p += "." + std::to_string(seed);
  return p;
}

ReplicateReport run_replicates(const LoadedData& data, const RunConfig& cfg, std::uint32_t n,
                               std::uint32_t parallelism, const std::optional<fs::path>& log_prefix) {
  if (n == 0) throw ConfigError("replicate count must be >= 1");
  ReplicateReport rep;
  rep.runs.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) rep.seeds.push_back(cfg.sim.seed + i);

  std::atomic<std::uint32_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::uint32_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        RunConfig c = cfg;
        c.sim.seed = rep.seeds[i];
        if (log_prefix) {
          std::ofstream log = open_out(replicate_log_path(*log_prefix, c.sim.seed));
          rep.runs[i] = run_simulation(data, c, log).summary;
        } else {
          std::ostringstream sink;
          rep.runs[i] = run_simulation(data, c, sink).summary;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const std::uint32_t threads = std::max<std::uint32_t>(1, std::min(parallelism, n));
  std::vector<std::thread> pool;
  for (std::uint32_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  double sum = 0.0;
  for (const auto& r : rep.runs) sum += r.attack_rate;
  rep.mean_attack_rate = sum / n;
  if (n > 1) {
    double ss = 0.0;
    for (const auto& r : rep.runs) ss += (r.attack_rate - rep.mean_attack_rate) * (r.attack_rate - rep.mean_attack_rate);
    rep.sd_attack_rate = std::sqrt(ss / (n - 1));
  }
  return rep;
}

ReplicateReport cmd_replicates(const RunConfig& cfg, std::uint32_t n, std::uint32_t parallelism, bool write_logs,
                               std::ostream* report) {
  const LoadedData data = load_data(cfg);
  std::optional<fs::path> prefix;
  if (write_logs) prefix = cfg.files.log;
  ReplicateReport rep = run_replicates(data, cfg, n, parallelism, prefix);
  if (report) {
    *report << "seed\tinfections\tattack_rate\tpeak_day\tpeak_active\tend_hour\n";
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
      const auto& r = rep.runs[i];
      *report << rep.seeds[i] << '\t' << r.infections << '\t' << r.attack_rate << '\t' << r.peak_day << '\t'
              << r.peak_active_entities << '\t' << r.end_hour << '\n';
    }
    *report << "mean_attack_rate\t" << rep.mean_attack_rate << "\nsd_attack_rate\t" << rep.sd_attack_rate << '\n';
  }
  return rep;
}

namespace {

void write_bar_svg(std::ostream& o, const std::string& title, const std::vector<std::string>& labels,
                   const std::vector<double>& values, bool show_labels) {
  const double width = 800, height = 400, left = 60, bottom = 40, top = 30;
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, v);
  if (vmax <= 0.0) vmax = 1.0;
  const double plot_w = width - left - 20, plot_h = height - bottom - top;
  const double bar = values.empty() ? 0.0 : plot_w / values.size();
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\">" << title
    << "</text>\n"
    << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\"" << top + plot_h
    << "\" stroke=\"black\"/>\n"
    << "<text x=\"" << left - 5 << "\" y=\"" << top + 5 << "\" text-anchor=\"end\" font-size=\"11\">" << vmax
    << "</text>\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double h = plot_h * values[i] / vmax;
    o << "<rect x=\"" << left + i * bar << "\" y=\"" << top + plot_h - h << "\" width=\"" << std::max(bar - 1, 0.5)
      << "\" height=\"" << h << "\" fill=\"steelblue\"/>\n";
    if (show_labels) {
      o << "<text x=\"" << left + (i + 0.5) * bar << "\" y=\"" << height - bottom + 15
        << "\" text-anchor=\"middle\" font-size=\"11\">" << labels[i] << "</text>\n";
    }
  }
  o << "</svg>\n";
}

}  // namespace

PlotReport cmd_plot(const fs::path& log_path, const fs::path& out_dir) {
  std::ifstream in(log_path);
  if (!in) throw Error("cannot open log " + log_path.string());
  const std::vector<InfectionLogEntry> entries = parse_log(in);
  const LogSummary s = summarize(entries, 0);
  PlotReport r;
  r.entries = entries.size();
  r.incidence_csv = out_dir / "incidence.csv";
  r.place_csv = out_dir / "place_types.csv";
  r.incidence_svg = out_dir / "incidence.svg";
  r.place_svg = out_dir / "place_types.svg";

  write_file(r.incidence_csv, [&](std::ostream& o) {
    o << "day,infections\n";
    for (std::size_t d = 0; d < s.daily.size(); ++d) o << d << ',' << s.daily[d] << '\n';
  });
  write_file(r.place_csv, [&](std::ostream& o) {
    o << "place_type,infections,share\n" << std::setprecision(17);
    for (const auto& [type, n] : s.place_counts) o << type << ',' << n << ',' << s.place_shares.at(type) << '\n';
  });
  std::vector<std::string> days;
  std::vector<double> daily;
  for (std::size_t d = 0; d < s.daily.size(); ++d) {
    days.push_back(std::to_string(d));
    daily.push_back(static_cast<double>(s.daily[d]));
  }
  write_file(r.incidence_svg, [&](std::ostream& o) { write_bar_svg(o, "Infections per day", days, daily, false); });
  std::vector<std::string> types;
  std::vector<double> shares;
  for (const auto& [type, share] : s.place_shares) {
    types.push_back(type);
    shares.push_back(share);
  }
  write_file(r.place_svg, [&](std::ostream& o) { write_bar_svg(o, "Share of infections by place", types, shares, true); });
  return r;
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream o;
  o << "population\t" << s.population << "\ninfections\t" << s.infections << "\nattack_rate\t" << s.attack_rate
    << "\npeak_day\t" << s.peak_day << "\npeak_day_infections\t" << s.peak_day_infections
    << "\npeak_active_entities\t" << s.peak_active_entities << "\nend_hour\t" << s.end_hour << "\nextinct\t"
    << (s.extinct ? "yes" : "no") << "\ndeceased\t" << s.deceased << "\ncare_refusals\t" << s.care_refusals
    << "\nexecuted_events\t" << s.executed_events << "\nruntime_seconds\t" << std::fixed << std::setprecision(3)
    << s.runtime_seconds << '\n';
  return o.str();
}

}  // namespace microsim
