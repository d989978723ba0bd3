#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "microsim/geography.hpp"
#include "microsim/popdata.hpp"
#include "microsim/rng.hpp"

using namespace microsim;

namespace {

Coord random_square(RngStream& r) {
  return {static_cast<std::uint32_t>(1'000'000 + 100 * r.below(90'000)),
          static_cast<std::uint32_t>(1'000'000 + 100 * r.below(90'000))};
}

ActorId brute_nearest(Coord q, const std::vector<CareUnit>& units) {
  ActorId best = ActorId::none();
  double best_d = 0;
  for (const auto& u : units) {
    const double de = double(u.at.east) - q.east, dn = double(u.at.north) - q.north;
    const double d = de * de + dn * dn;
    if (best.is_none() || d < best_d || (d == best_d && u.house < best)) {
      best = u.house;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("geography") {
  TEST_CASE("combine and split the printed coordinate") {
    CHECK(combine_coords(1594300, 6571200) == 15943006571200ULL);
    CHECK(split_coords(15943006571200ULL) == Coord{1594300, 6571200});
    CHECK(combine_coords(1000000, 1000000) == 10000001000000ULL);
  }

  TEST_CASE("combine rejects non seven-digit halves") {
    CHECK_THROWS_AS(combine_coords(999900, 6571200), Error);
    CHECK_THROWS_AS(combine_coords(1594300, 10000000), Error);
    CHECK_THROWS_AS(split_coords(1594300657120ULL), Error);
    CHECK_THROWS_AS(split_coords(159430065712000ULL), Error);
    CHECK_THROWS_AS(split_coords(15943000571200ULL), Error);
  }

  TEST_CASE("split agrees with string slicing and inverts combine") {
    RngStream r(1, 0, Purpose::synth);
    for (int i = 0; i < 10000; ++i) {
      const Coord c = random_square(r);
      const std::uint64_t v = combine_coords(c);
      const std::string s = std::to_string(v);
      REQUIRE(s.size() == 14);
      CHECK(std::stoul(s.substr(0, 7)) == c.east);
      CHECK(std::stoul(s.substr(7)) == c.north);
      CHECK(split_coords(v) == c);
    }
  }

  TEST_CASE("compress packs 100 m cells") {
    const Coord origin{1500000, 6500000};
    CHECK(compress_coord(origin, origin) == 0u);
    CHECK(compress_coord({1500100, 6500000}, origin) == 0x00010000u);
    CHECK(compress_coord({1500000, 6500100}, origin) == 0x00000001u);
    CHECK_THROWS_AS(compress_coord({1499900, 6500000}, origin), Error);
    CHECK_THROWS_AS(compress_coord({1500050, 6500000}, origin), Error);
    CHECK_THROWS_AS(compress_coord({1500000 + 100 * 65536, 6500000}, origin), Error);
  }

  TEST_CASE("compress roundtrips over the synthetic grid") {
    SynthConfig cfg;
    cfg.occupied_square_fraction = 0.02;
    const auto squares = synthesize_occupied_squares(cfg);
    const Coord origin{cfg.east_min, cfg.north_min};
    for (const Coord c : squares) CHECK(decompress_coord(compress_coord(c, origin), origin) == c);
  }

  TEST_CASE("grid index") {
    const XYRecord one{0, 1594300, 6571200};
    const GridIndex g = GridIndex::build(std::vector<XYRecord>{one});
    CHECK(g.size() == 1);
    CHECK(g.coord(0) == Coord{1594300, 6571200});
    CHECK(g.find({1594300, 6571200}) == 0u);
    CHECK(g.find_combined(15943006571200ULL) == 0u);
    CHECK_FALSE(g.find({1594400, 6571200}).has_value());

    CHECK_THROWS_AS(GridIndex::build(std::vector<XYRecord>{{0, 1594300, 6571200}, {1, 1594300, 6571200}}), Error);
    CHECK_THROWS_AS(GridIndex::build(std::vector<XYRecord>{{0, 1594300, 6571200}, {2, 1594400, 6571200}}), Error);
  }

  TEST_CASE("grid index size equals record count and is bijective") {
    std::vector<XYRecord> recs;
    RngStream r(2, 0, Purpose::synth);
    std::vector<Coord> cs;
    for (std::uint32_t i = 0; i < 5000; ++i) cs.push_back(random_square(r));
    std::sort(cs.begin(), cs.end(), [](Coord a, Coord b) { return combine_coords(a) < combine_coords(b); });
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    for (std::uint32_t i = 0; i < cs.size(); ++i) recs.push_back({i, cs[i].east, cs[i].north});
    const GridIndex g = GridIndex::build(recs);
    CHECK(g.size() == recs.size());
    for (const auto& rec : recs) {
      CHECK(g.find({rec.east, rec.north}) == rec.xy_index);
      CHECK(g.coord(rec.xy_index) == Coord{rec.east, rec.north});
    }
  }

  TEST_CASE("nearest care unit") {
    const std::vector<CareUnit> single{{ActorId::encode(ActorKind::er, 3), {1500000, 6500000}}};
    CHECK(nearest_care_unit({1600000, 6600000}, single) == single[0].house);
    CHECK_THROWS_AS(nearest_care_unit({1600000, 6600000}, std::vector<CareUnit>{}), Error);

    const std::vector<CareUnit> tie{{ActorId::encode(ActorKind::er, 9), {1500200, 6500000}},
                                    {ActorId::encode(ActorKind::er, 4), {1499800, 6500000}}};
    CHECK(nearest_care_unit({1500000, 6500000}, tie) == ActorId::encode(ActorKind::er, 4));
    CHECK(CareUnitIndex(tie).nearest({1500000, 6500000}) == ActorId::encode(ActorKind::er, 4));
  }

  TEST_CASE("nearest care unit matches a linear scan and ignores unit order") {
    RngStream r(5, 0, Purpose::synth);
    std::vector<CareUnit> units;
    for (std::uint64_t i = 0; i < 40; ++i) {
      units.push_back({ActorId::encode(ActorKind::did, 2 * i + 1),
                       {static_cast<std::uint32_t>(1'500'000 + 100 * r.below(200)),
                        static_cast<std::uint32_t>(6'500'000 + 100 * r.below(200))}});
    }
    std::vector<CareUnit> shuffled = units;
    std::mt19937 g(4);
    std::shuffle(shuffled.begin(), shuffled.end(), g);
    const CareUnitIndex idx(shuffled);
    for (int q = 0; q < 1000; ++q) {
      const Coord c{static_cast<std::uint32_t>(1'500'000 + 100 * r.below(200)),
                    static_cast<std::uint32_t>(6'500'000 + 100 * r.below(200))};
      const ActorId expect = brute_nearest(c, units);
      CHECK(nearest_care_unit(c, units) == expect);
      CHECK(nearest_care_unit(c, shuffled) == expect);
      CHECK(idx.nearest(c) == expect);
    }
  }

  TEST_CASE("care map entries equal direct nearest search and roundtrip") {
    std::vector<XYRecord> recs;
    for (std::uint32_t i = 0; i < 300; ++i) recs.push_back({i, 1'500'000 + 100 * (i % 20), 6'500'000 + 100 * (i / 20)});
    const GridIndex grid = GridIndex::build(recs);
    const std::vector<CareUnit> er{{ActorId::encode(ActorKind::er, 10), {1500000, 6500000}},
                                   {ActorId::encode(ActorKind::er, 12), {1501900, 6501400}}};
    const std::vector<CareUnit> did{{ActorId::encode(ActorKind::did, 11), {1500000, 6500000}},
                                    {ActorId::encode(ActorKind::did, 13), {1501900, 6501400}}};
    const CareUnitMap map = precompute_care_map(grid, er, did);
    REQUIRE(map.size() == grid.size());
    for (std::uint32_t i = 0; i < grid.size(); ++i) {
      CHECK(map.at(i).er == nearest_care_unit(grid.coord(i), er));
      CHECK(map.at(i).did == nearest_care_unit(grid.coord(i), did));
    }
    std::stringstream buf;
    write_care_map(buf, map);
    CHECK(buf.str().size() == 20 + 20 * map.size());
    CHECK(read_care_map(buf) == map);

    const GridIndex tiny = GridIndex::build(std::vector<XYRecord>{{0, 1500000, 6500000}});
    const CareUnitMap one = precompute_care_map(tiny, {er.data(), 1}, {did.data(), 1});
    CHECK(one.at(0) == CareAssignment{er[0].house, did[0].house});
    CHECK_THROWS_AS(precompute_care_map(tiny, {}, did), Error);
  }

  TEST_CASE("care map reader rejects truncation and bad magic") {
    const CareUnitMap map(std::vector<CareAssignment>{{ActorId::encode(ActorKind::er, 1), ActorId::encode(ActorKind::did, 2)}});
    std::stringstream buf;
    write_care_map(buf, map);
    std::string bytes = buf.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_care_map(truncated), Error);
    bytes[0] = 'X';
    std::stringstream bad(bytes);
    CHECK_THROWS_AS(read_care_map(bad), Error);
  }

  TEST_CASE("region of square") {
    CHECK(region_of_square({1000000, 1000000}) == 1);
    CHECK(region_of_square({1594300, 6571200}) == (15 - 10) * 90 + (65 - 10) + 1);
  }
}
