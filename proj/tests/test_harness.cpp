#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "microsim/harness.hpp"
#include "microsim/infection_log.hpp"

using namespace microsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("microsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string small_config(std::uint64_t synth_seed = 3, const std::string& extra = "") {
  return "[files]\n"
         "base_file = base.tsv\npopfile = pop.bin\nworkplacefile = wp.bin\nxyfile = xy.bin\n"
         "caremap = care.bin\nlog = out/infections.log\n"
         "[synth]\nn_persons = 3000\neast_max = 1520000\nnorth_max = 6520000\noccupied_fraction = 0.1\n"
         "persons_per_hospital = 1500\nseed = " +
         std::to_string(synth_seed) +
         "\n[run]\nseed = 11\nhorizon_hours = 2160\n"
         "[outbreak]\ncount = 5\n" +
         extra;
}

RunConfig write_config(const fs::path& dir, const std::string& text) {
  spit(dir / "run.ini", text);
  return load_run_config(dir / "run.ini");
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(MICROSIM_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config parsing") {
    std::istringstream in(
        "[files]\npopfile = data/pop.bin\nlog = /tmp/x.log\n"
        "[run]\nseed = 9\nhorizon_hours = 480\noptimize = false\nhouse_idle_days = 3\ndepartment_size = 12\n"
        "seed_hour = 17\ner_capacity = 4\nlog_batch = 10\n"
        "[outbreak]\nind_ids = 5, 6,7\n"
        "[interventions]\nmass_coverage = 0.5\nmass_efficacy = 0.7\nisolation = true\nsocial_distancing = 0.4\n"
        "[synth]\nn_persons = 1234\nhousehold_sizes = 0.5, 0.5\n");
    const RunConfig c = parse_run_config(in, "/base");
    CHECK(c.files.popfile == fs::path("/base/data/pop.bin"));
    CHECK(c.files.log == fs::path("/tmp/x.log"));
    CHECK(c.files.caremap.empty());
    CHECK(c.sim.seed == 9);
    CHECK(c.sim.horizon == 480);
    CHECK_FALSE(c.sim.optimize);
    CHECK(c.sim.house_idle_days == 3);
    CHECK(c.sim.seed_hour == 17);
    CHECK(c.population.department_size == 12);
    CHECK(c.population.er_capacity == 4);
    CHECK(c.log_batch == 10);
    CHECK(c.outbreak.ind_ids == std::vector<std::uint64_t>{5, 6, 7});
    CHECK(c.sim.interventions.mass_coverage == 0.5);
    CHECK(c.sim.interventions.isolation);
    CHECK(c.sim.interventions.social_distancing == 0.4);
    CHECK(c.synth.n_persons == 1234);
    CHECK(c.synth.household_size_distribution == std::vector<double>{0.5, 0.5});

    for (const char* bad : {"[run]\nhorizon_hours = 0\n", "[run]\ndepartment_size = 0\n", "[run]\nseed_hour = 12\n",
                            "[interventions]\nmass_coverage = 2\n", "[run]\nseed = abc\n"}) {
      std::istringstream b(bad);
      CHECK_THROWS_AS(parse_run_config(b), ConfigError);
    }
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.ini"), ConfigError);
  }

  TEST_CASE("synth writes cross-validating, deterministic files") {
    const fs::path a = scratch("synth_a"), b = scratch("synth_b");
    const SynthReport ra = cmd_synth(write_config(a, small_config()));
    cmd_synth(write_config(b, small_config()));
    CHECK(ra.persons == 3000);
    CHECK(ra.care_units == 4);
    for (const char* f : {"base.tsv", "pop.bin", "wp.bin", "xy.bin", "care.bin"}) {
      CHECK(fs::exists(a / f));
      CHECK(slurp(a / f) == slurp(b / f));
    }
    const RunConfig cfg = load_run_config(a / "run.ini");
    const LoadedData data = load_data(cfg);
    CHECK(data.persons.size() == 3000);
    CHECK(data.care.size() == data.grid.size());

    const fs::path c = scratch("synth_c");
    cmd_synth(write_config(c, small_config(4)));
    CHECK(slurp(a / "pop.bin") != slurp(c / "pop.bin"));
  }

  TEST_CASE("synthesized file tallies follow the configuration") {
    const fs::path dir = scratch("tallies");
    std::string text = small_config();
    text.replace(text.find("n_persons = 3000"), 16, "n_persons = 60000");
    text.replace(text.find("persons_per_hospital = 1500"), 27, "persons_per_hospital = 30000");
    const RunConfig cfg = write_config(dir, text);
    cmd_synth(cfg);
    const LoadedData data = load_data(cfg);
    std::map<std::uint64_t, std::uint64_t> fam_size;
    std::uint64_t employed = 0, working_age = 0;
    std::map<std::uint64_t, WorkplaceType> type;
    for (const auto& w : data.workplaces) type[w.workplace_id] = w.wp_type;
    for (const auto& p : data.persons) {
      ++fam_size[p.fam_id];
      if (p.age >= cfg.synth.working_age_min && p.age <= cfg.synth.working_age_max) {
        ++working_age;
        if (p.workplace_id && type[p.workplace_id] == WorkplaceType::workplace) ++employed;
      }
    }
    std::vector<double> hist(cfg.synth.household_size_distribution.size(), 0.0);
    for (const auto& [f, n] : fam_size) hist.at(n - 1) += 1;
    for (std::size_t i = 0; i < hist.size(); ++i) {
      CHECK(std::abs(hist[i] / fam_size.size() - cfg.synth.household_size_distribution[i]) < 0.02);
    }
    CHECK(std::abs(static_cast<double>(employed) / working_age - cfg.synth.employment_rate) < 0.02);
  }

  TEST_CASE("runs are deterministic and zero seeds exit at once") {
    const fs::path dir = scratch("run");
    RunConfig cfg = write_config(dir, small_config());
    cmd_synth(cfg);
    std::ostringstream report;
    const RunResult first = cmd_run(cfg, report);
    const std::string log1 = slurp(cfg.files.log);
    cmd_run(cfg, report);
    CHECK(slurp(cfg.files.log) == log1);
    CHECK(first.log_entries == first.summary.infections);
    CHECK(report.str().find("attack_rate") != std::string::npos);
    CHECK(report.str().find("peak_active_entities") != std::string::npos);

    std::istringstream in(log1);
    CHECK(parse_log(in).size() == static_cast<std::size_t>(first.summary.attack_rate * first.summary.population + 0.5));

    cfg.outbreak.count = 0;
    const RunResult none = cmd_run(cfg, report);
    CHECK(none.summary.infections == 0);
    CHECK(none.summary.extinct);
    CHECK(none.summary.end_hour == cfg.sim.seed_hour);
    CHECK(slurp(cfg.files.log) == std::string(kLogHeader) + "\n");
  }

  TEST_CASE("replicates agree with single runs and their logs") {
    const fs::path dir = scratch("replicates");
    const RunConfig cfg = write_config(dir, small_config());
    cmd_synth(cfg);
    const LoadedData data = load_data(cfg);

    std::ostringstream sink;
    const RunResult single = run_simulation(data, cfg, sink);
    const ReplicateReport one = run_replicates(data, cfg, 1, 1);
    CHECK(one.runs[0].infections == single.summary.infections);
    CHECK(one.runs[0].peak_day == single.summary.peak_day);
    CHECK(one.mean_attack_rate == single.summary.attack_rate);

    const ReplicateReport serial = cmd_replicates(cfg, 6, 1, true);
    const ReplicateReport parallel = run_replicates(data, cfg, 6, 4);
    REQUIRE(serial.runs.size() == 6);
    double sum = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(serial.seeds[i] == cfg.sim.seed + i);
      CHECK(serial.runs[i].infections == parallel.runs[i].infections);
      CHECK(serial.runs[i].end_hour == parallel.runs[i].end_hour);
      std::ifstream in(replicate_log_path(cfg.files.log, serial.seeds[i]));
      const auto entries = parse_log(in);
      CHECK(entries.size() == serial.runs[i].infections);
      sum += static_cast<double>(entries.size()) / static_cast<double>(data.persons.size());
    }
    CHECK(serial.mean_attack_rate == parallel.mean_attack_rate);
    CHECK(serial.sd_attack_rate == parallel.sd_attack_rate);
    CHECK(std::abs(serial.mean_attack_rate - sum / 6) < 1e-12);
    CHECK_THROWS_AS(run_replicates(data, cfg, 0, 1), ConfigError);
  }

  TEST_CASE("plot CSVs match a group-by over the log") {
    const fs::path dir = scratch("plot");
    const RunConfig cfg = write_config(dir, small_config());
    cmd_synth(cfg);
    std::ostringstream report;
    const RunResult r = cmd_run(cfg, report);
    REQUIRE(r.log_entries > 0);
    const PlotReport p = cmd_plot(cfg.files.log, dir / "plots");
    CHECK(p.entries == r.log_entries);
    CHECK(fs::exists(p.incidence_svg));
    CHECK(slurp(p.place_svg).rfind("<svg", 0) == 0);

    std::map<long, std::uint64_t> by_day;
    std::map<std::string, std::uint64_t> by_place;
    std::ifstream log(cfg.files.log);
    std::string line;
    std::uint64_t lines = 0;
    while (std::getline(log, line)) {
      if (line[0] == '#') continue;
      ++lines;
      std::istringstream f(line);
      std::string seed, hour, place;
      std::getline(f, seed, '\t');
      std::getline(f, hour, '\t');
      std::getline(f, place, '\t');
      ++by_day[std::stol(hour) / 24];
      ++by_place[place];
    }
    std::ifstream inc(p.incidence_csv);
    std::getline(inc, line);
    CHECK(line == "day,infections");
    std::uint64_t total = 0;
    while (std::getline(inc, line)) {
      const auto comma = line.find(',');
      const long day = std::stol(line.substr(0, comma));
      const std::uint64_t n = std::stoull(line.substr(comma + 1));
      CHECK(n == (by_day.count(day) ? by_day[day] : 0));
      total += n;
    }
    CHECK(total == lines);
    std::ifstream places(p.place_csv);
    std::getline(places, line);
    CHECK(line == "place_type,infections,share");
    std::map<std::string, std::uint64_t> csv_places;
    double share = 0.0;
    while (std::getline(places, line)) {
      std::istringstream f(line);
      std::string type, n, s;
      std::getline(f, type, ',');
      std::getline(f, n, ',');
      std::getline(f, s, ',');
      csv_places[type] = std::stoull(n);
      share += std::stod(s);
    }
    CHECK(csv_places == by_place);
    CHECK(std::abs(share - 1.0) < 1e-12);

    spit(dir / "empty.log", std::string(kLogHeader) + "\n");
    const PlotReport e = cmd_plot(dir / "empty.log", dir / "empty");
    CHECK(e.entries == 0);
    CHECK(slurp(e.incidence_csv) == "day,infections\n");
    CHECK(slurp(e.place_csv) == "place_type,infections,share\n");

    spit(dir / "bad.log", std::string(kLogHeader) + "\n1\t2\n");
    CHECK_THROWS_AS(cmd_plot(dir / "bad.log", dir / "bad"), FormatError);
  }

  TEST_CASE("load errors name the inconsistent file") {
    const fs::path dir = scratch("load");
    RunConfig cfg = write_config(dir, small_config());
    cmd_synth(cfg);
    fs::remove(dir / "wp.bin");
    try {
      load_data(cfg);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("workplacefile") != std::string::npos);
    }
    const fs::path other = scratch("load_other");
    std::string text = small_config(9);
    text.replace(text.find("n_persons = 3000"), 16, "n_persons = 500");
    cmd_synth(write_config(other, text));
    cmd_synth(cfg);
    fs::copy_file(other / "care.bin", dir / "care.bin", fs::copy_options::overwrite_existing);
    CHECK_THROWS_AS(load_data(cfg), Error);
  }

  TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    write_config(dir, small_config());
    const fs::path out = dir / "stdout.txt";
    const std::string conf = "--config " + (dir / "run.ini").string();
    CHECK(run_cli("synth " + conf, out) == 0);
    CHECK(slurp(out).find("persons\t3000") != std::string::npos);
    CHECK(run_cli("run " + conf + " --seed 5 --trace " + (dir / "trace.txt").string(), out) == 0);
    CHECK(slurp(out).find("infections") != std::string::npos);
    CHECK(fs::file_size(dir / "trace.txt") > 0);
    CHECK(run_cli("replicates " + conf + " -n 2 -j 2", out) == 0);
    CHECK(slurp(out).find("mean_attack_rate") != std::string::npos);
    CHECK(run_cli("plot " + (dir / "out" / "infections.log").string() + " -o " + (dir / "plots").string(), out) == 0);
    CHECK(fs::exists(dir / "plots" / "incidence.csv"));

    CHECK(run_cli("run", out) != 0);
    CHECK(run_cli("run --config /nonexistent.ini", out) != 0);
    spit(dir / "bad.ini", "[run]\nhorizon_hours = -4\n");
    CHECK(run_cli("run --config " + (dir / "bad.ini").string(), out) == 1);
    CHECK(slurp(out).find("error:") != std::string::npos);
    spit(dir / "nodata.ini", "[files]\npopfile = missing.bin\n");
    CHECK(run_cli("run --config " + (dir / "nodata.ini").string(), out) == 1);
  }
}
