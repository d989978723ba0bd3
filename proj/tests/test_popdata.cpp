#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "microsim/error.hpp"
#include "microsim/popdata.hpp"

using namespace microsim;

namespace {

// Three rows of a register extract; the coordinates, truncated in print,
// are completed with arbitrary valid digits.
const char* kTable1 =
    "2544587\t1978\t1\t3\t15943006571200\t\t\t2543583\t\t\t\t\t\t\t2555897\t2543583\n"
    "2035042\t1978\t2\t1\t16230006570000\t\t13350006450000\t2018599\t999992\t\t\t279737\t022\tHSK\t2018599\t2020201\n"
    "1712109\t1978\t1\t4\t16210006600000\t16280006610000\t\t1712109\t200415\t45230\t1283\t387818\t\t\t1687754\t1689503\n";

std::vector<BaseFileRow> table1() {
  std::istringstream in(kTable1);
  return parse_base_file(in).rows;
}

SynthConfig small_synth(std::uint64_t n, std::uint64_t seed = 3) {
  SynthConfig c;
  c.n_persons = n;
  c.rng_seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("popdata") {
  TEST_CASE("parse the three printed base file entries") {
    const auto rows = table1();
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].ind_id == 2544587);
    CHECK(rows[0].sex == 1);
    CHECK(rows[0].fam_type == 3);
    CHECK(rows[0].fam_id == 2543583);
    CHECK(rows[0].birth_y == 1978);
    CHECK_FALSE(rows[0].workplace_id.has_value());
    CHECK(rows[0].father_id == 2555897u);
    CHECK(rows[1].school_type == SchoolType::HSK);
    CHECK(rows[1].school_id == 22u);
    CHECK(rows[1].workplace_id == 999992u);
    CHECK_FALSE(rows[1].wp_square.has_value());
    CHECK(rows[2].workplace_id == 200415u);
    CHECK(rows[2].wp_branchcode == 45230u);
    CHECK(rows[2].wp_mun == 1283);
    CHECK(rows[2].company_id == 387818u);
  }

  TEST_CASE("invalid rows are rejected with their line") {
    std::string bad_coord = kTable1;
    bad_coord.replace(bad_coord.find("15943006571200"), 14, "1594300657120");
    std::istringstream in(bad_coord);
    BaseFileOptions lenient;
    lenient.strict = false;
    const auto parsed = parse_base_file(in, lenient);
    CHECK(parsed.rows.size() == 2);
    REQUIRE(parsed.rejected.size() == 1);
    CHECK(parsed.rejected[0].line == 1);

    std::string bad_sex = kTable1;
    bad_sex.replace(bad_sex.find("\t1978\t2\t"), 8, "\t1978\t3\t");
    std::istringstream strict_in(bad_sex);
    try {
      parse_base_file(strict_in);
      FAIL("expected a FormatError");
    } catch (const FormatError& e) {
      CHECK(e.position() == 2);
    }

    std::string bad_fam = kTable1;
    bad_fam.replace(bad_fam.find("\t1978\t1\t4\t"), 10, "\t1978\t1\t6\t");
    std::istringstream fam_in(bad_fam);
    CHECK_THROWS_AS(parse_base_file(fam_in), FormatError);
  }

  TEST_CASE("header row is optional") {
    std::ostringstream out;
    write_base_file(out, table1(), true);
    std::istringstream in(out.str());
    BaseFileOptions opt;
    opt.has_header = true;
    CHECK(parse_base_file(in, opt).rows == table1());
  }

  TEST_CASE("synthesized rows roundtrip through the text format") {
    const auto rows = synthesize_population(small_synth(10000));
    std::ostringstream out;
    write_base_file(out, rows, false);
    std::istringstream in(out.str());
    CHECK(parse_base_file(in).rows == rows);
  }

  TEST_CASE("minimal build") {
    BaseFileRow r;
    r.ind_id = 1;
    r.birth_y = 1970;
    r.fam_id = 1;
    r.dw_square = 15943006571200ULL;
    const auto files = build_microsim_files({r});
    REQUIRE(files.persons.size() == 1);
    CHECK(files.persons[0].age == 32);
    CHECK(files.workplaces.empty());
    REQUIRE(files.xy.size() == 1);
    CHECK(files.xy[0] == XYRecord{0, 1594300, 6571200});
  }

  TEST_CASE("register workplace becomes a WorkplaceRecord") {
    const auto files = build_microsim_files(table1());
    const auto it = std::find_if(files.workplaces.begin(), files.workplaces.end(),
                                 [](const WorkplaceRecord& w) { return w.workplace_id == 200415; });
    REQUIRE(it != files.workplaces.end());
    CHECK(it->branch_code == 45230);
    CHECK(it->wp_mun == 1283);
    CHECK(it->no_of_employees == 1);
    CHECK(it->wp_type == WorkplaceType::workplace);
    // The second person's workplace has no square: flagged, falls back to the college.
    CHECK(files.persons[1].workplace_id == kSchoolIdOffset + 22);
    CHECK_FALSE(files.exceptions.empty());
    const auto school = std::find_if(files.workplaces.begin(), files.workplaces.end(),
                                     [](const WorkplaceRecord& w) { return w.workplace_id == kSchoolIdOffset + 22; });
    REQUIRE(school != files.workplaces.end());
    CHECK(school->wp_type == WorkplaceType::college);
    CHECK(files.xy.size() == 5);
  }

  TEST_CASE("employee tallies match a brute-force count") {
    auto rows = synthesize_population(small_synth(1000));
    const auto files = build_microsim_files(rows);
    std::map<std::uint64_t, std::uint32_t> counts;
    for (const auto& p : files.persons) {
      if (p.workplace_id) ++counts[p.workplace_id];
    }
    for (const auto& w : files.workplaces) CHECK(w.no_of_employees == counts[w.workplace_id]);
    CHECK(counts.size() == files.workplaces.size());
  }

  TEST_CASE("referential integrity and dense xy indices") {
    const auto files = build_microsim_files(synthesize_population(small_synth(5000)));
    std::set<std::uint64_t> squares, wps;
    for (const auto& x : files.xy) squares.insert(combine_coords(x.east, x.north));
    for (std::size_t i = 0; i < files.xy.size(); ++i) CHECK(files.xy[i].xy_index == i);
    CHECK(squares.size() == files.xy.size());
    for (const auto& w : files.workplaces) {
      wps.insert(w.workplace_id);
      CHECK(squares.count(w.wp_square) == 1);
    }
    for (const auto& p : files.persons) {
      CHECK(squares.count(p.dwelling_square) == 1);
      if (p.workplace_id) CHECK(wps.count(p.workplace_id) == 1);
    }
    CHECK(files.xy.size() < (1u << 20));
  }

  TEST_CASE("binary files roundtrip") {
    std::stringstream empty;
    write_popfile(empty, {});
    CHECK(empty.str().size() == 20);
    CHECK(read_popfile(empty).empty());

    PersonRecord one{2544587, 1, 24, 2543583, 15943006571200ULL, 0, 0, 506};
    std::stringstream buf;
    write_popfile(buf, {one});
    CHECK(buf.str().size() == 20 + 39);
    const auto back = read_popfile(buf);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == one);
  }

  TEST_CASE("100,000 synthetic records re-serialize byte-identically") {
    const auto files = build_microsim_files(synthesize_population(small_synth(100000)));
    std::stringstream p1, w1, x1;
    write_popfile(p1, files.persons);
    write_workplacefile(w1, files.workplaces);
    write_xyfile(x1, files.xy);
    const std::string pb = p1.str(), wb = w1.str(), xb = x1.str();
    std::stringstream p2, w2, x2;
    write_popfile(p2, read_popfile(p1));
    write_workplacefile(w2, read_workplacefile(w1));
    const XyTable t = read_xyfile(x1);
    write_xyfile(x2, t.records);
    CHECK(p2.str() == pb);
    CHECK(w2.str() == wb);
    CHECK(x2.str() == xb);
    CHECK(t.records == files.xy);
    CHECK(pb.size() == 20 + 39 * files.persons.size());
    CHECK(wb.size() == 20 + 25 * files.workplaces.size());
  }

  TEST_CASE("truncated files and bad headers are errors") {
    std::stringstream buf;
    write_workplacefile(buf, {WorkplaceRecord{200415, 16280006610000ULL, 1, 45230, 1283, WorkplaceType::workplace}});
    const std::string bytes = buf.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 1));
    try {
      read_workplacefile(truncated);
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("45") != std::string::npos);
      CHECK(msg.find("44") != std::string::npos);
    }
    std::string wrong_magic = bytes;
    wrong_magic[1] = '?';
    std::stringstream m(wrong_magic);
    CHECK_THROWS_AS(read_workplacefile(m), Error);
    std::string wrong_version = bytes;
    wrong_version[8] = 2;
    std::stringstream v(wrong_version);
    CHECK_THROWS_AS(read_workplacefile(v), Error);
    std::stringstream pop_as_work(bytes);
    CHECK_THROWS_AS(read_popfile(pop_as_work), Error);
  }

  TEST_CASE("single one-person household") {
    SynthConfig c = small_synth(1);
    c.household_size_distribution = {1.0};
    const auto rows = synthesize_population(c);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].dw_square.has_value());
    CHECK(rows[0].fam_type >= 1);
  }

  TEST_CASE("household-size histogram follows the configuration") {
    const SynthConfig c = small_synth(100000);
    const auto rows = synthesize_population(c);
    std::map<std::uint64_t, std::uint64_t> size_of;
    for (const auto& r : rows) ++size_of[r.fam_id];
    std::vector<double> hist(c.household_size_distribution.size(), 0.0);
    for (const auto& [fam, n] : size_of) {
      REQUIRE(n >= 1);
      if (n - 1 < hist.size()) hist[n - 1] += 1;
    }
    // the last household may be cut short by n_persons
    for (std::size_t i = 0; i < hist.size(); ++i) {
      CHECK(std::abs(hist[i] / size_of.size() - c.household_size_distribution[i]) < 0.02);
    }
  }

  TEST_CASE("synthesis is deterministic and seed dependent") {
    CHECK(synthesize_population(small_synth(2000, 5)) == synthesize_population(small_synth(2000, 5)));
    CHECK(synthesize_population(small_synth(2000, 5)) != synthesize_population(small_synth(2000, 6)));
  }

  TEST_CASE("school bands attach children to the matching school type") {
    const auto files = build_microsim_files(synthesize_population(small_synth(20000)));
    std::map<std::uint64_t, WorkplaceType> type_of;
    for (const auto& w : files.workplaces) type_of[w.workplace_id] = w.wp_type;
    for (const auto& p : files.persons) {
      if (p.age >= 1 && p.age <= 5) CHECK(type_of.at(p.workplace_id) == WorkplaceType::daycare);
      if (p.age >= 6 && p.age <= 15) CHECK(type_of.at(p.workplace_id) == WorkplaceType::school);
      if (p.age >= 16 && p.age <= 18) CHECK(type_of.at(p.workplace_id) == WorkplaceType::college);
      if (p.age == 0 || p.age > 65) CHECK(p.workplace_id == 0);
    }
  }

  TEST_CASE("infeasible synth configurations are rejected") {
    SynthConfig c = small_synth(10);
    c.occupied_square_fraction = 0.0;
    CHECK_THROWS_AS(synthesize_population(c), ConfigError);
    c = small_synth(10);
    c.household_size_distribution = {0.5, 0.4};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_synth(10);
    c.east_max = c.east_min + 50;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
}
