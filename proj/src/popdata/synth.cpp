#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "microsim/error.hpp"
#include "microsim/popdata.hpp"
#include "microsim/rng.hpp"

namespace microsim {

namespace {

void check_distribution(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string(what) + " is empty");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ConfigError(std::string(what) + " has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError(std::string(what) + " sums to " + std::to_string(sum) + ", expected 1");
  }
}

/// Categorical sampler over 0..n-1 by inverse CDF.
class Categorical {
 public:
  explicit Categorical(const std::vector<double>& p) : cdf_(p.size()) {
    std::partial_sum(p.begin(), p.end(), cdf_.begin());
  }
  std::size_t operator()(RngStream& rng) const {
    const double u = rng.uniform() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

template <class T>
void shuffle(std::vector<T>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

std::uint8_t fam_type_for(std::size_t adults, std::size_t children) {
  if (adults + children == 1) return 4;
  if (children > 0) return adults >= 2 ? 1 : 3;
  return adults == 2 ? 2 : 5;
}

SchoolType school_type_for(WorkplaceType t) {
  switch (t) {
    case WorkplaceType::daycare: return SchoolType::D;
    case WorkplaceType::college: return SchoolType::HSK;
    default: return SchoolType::H;
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (n_persons == 0) throw ConfigError("n_persons must be positive");
  check_distribution(household_size_distribution, "household_size_distribution");
  if (!workplace_size_distribution.empty()) {
    check_distribution(workplace_size_distribution, "workplace_size_distribution");
  } else if (workplace_size_max == 0) {
    throw ConfigError("workplace_size_max must be positive");
  }
  if (east_max <= east_min || north_max <= north_min) throw ConfigError("grid extent must be positive");
  for (auto v : {east_min, east_max, north_min, north_max}) {
    if (v % kSquareMeters != 0) throw ConfigError("grid extent must be a multiple of 100 m");
    if (v < 1'000'000 || v > 9'999'999) throw ConfigError("grid extent must use seven-digit coordinates");
  }
  if (!(occupied_square_fraction >= 0.0 && occupied_square_fraction <= 1.0)) {
    throw ConfigError("occupied_square_fraction must lie in [0,1]");
  }
  if (occupied_squares() == 0) throw ConfigError("configuration yields zero occupied squares");
  if (!(employment_rate >= 0.0 && employment_rate <= 1.0)) {
    throw ConfigError("employment_rate must lie in [0,1]");
  }
  if (max_age == 0) throw ConfigError("max_age must be positive");
  if (persons_per_hospital == 0) throw ConfigError("persons_per_hospital must be positive");
  for (const auto& b : school_age_bands) {
    if (b.max_age < b.min_age || b.school_size == 0 || b.wp_type == WorkplaceType::workplace) {
      throw ConfigError("invalid school age band");
    }
  }
}

std::vector<double> SynthConfig::resolved_workplace_sizes() const {
  if (!workplace_size_distribution.empty()) return workplace_size_distribution;
  // Log-uniform on [1, max + 1): P(s) proportional to log((s+1)/s).
  std::vector<double> p(workplace_size_max);
  const double norm = std::log(static_cast<double>(workplace_size_max) + 1.0);
  for (std::uint32_t s = 1; s <= workplace_size_max; ++s) {
    p[s - 1] = std::log((s + 1.0) / s) / norm;
  }
  return p;
}

std::uint64_t SynthConfig::total_squares() const {
  if (east_max <= east_min || north_max <= north_min) return 0;
  return static_cast<std::uint64_t>((east_max - east_min) / kSquareMeters) *
         ((north_max - north_min) / kSquareMeters);
}

std::uint64_t SynthConfig::occupied_squares() const {
  return static_cast<std::uint64_t>(std::llround(occupied_square_fraction * total_squares()));
}

std::vector<Coord> synthesize_occupied_squares(const SynthConfig& cfg) {
  cfg.validate();
  const std::uint64_t total = cfg.total_squares();
  const std::uint64_t k = cfg.occupied_squares();
  const std::uint32_t rows = (cfg.north_max - cfg.north_min) / kSquareMeters;
  RngStream rng(cfg.rng_seed, 0, Purpose::synth, 1);

  std::vector<std::uint64_t> picked;
  picked.reserve(k);
  if (k * 4 < total) {
    // Floyd's sampling without replacement.
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(k * 2);
    for (std::uint64_t j = total - k; j < total; ++j) {
      const std::uint64_t t = rng.below(j + 1);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    picked.assign(chosen.begin(), chosen.end());
    std::sort(picked.begin(), picked.end());
  } else {
    // Selection sampling, already in order.
    std::uint64_t needed = k;
    for (std::uint64_t i = 0; i < total && needed > 0; ++i) {
      if (rng.below(total - i) < needed) {
        picked.push_back(i);
        --needed;
      }
    }
  }

  std::vector<Coord> out;
  out.reserve(picked.size());
  for (std::uint64_t lin : picked) {
    out.push_back({cfg.east_min + static_cast<std::uint32_t>(lin / rows) * kSquareMeters,
                   cfg.north_min + static_cast<std::uint32_t>(lin % rows) * kSquareMeters});
  }
  return out;
}

std::vector<BaseFileRow> synthesize_population(const SynthConfig& cfg) {
  const std::vector<Coord> squares = synthesize_occupied_squares(cfg);
  RngStream rng(cfg.rng_seed, 0, Purpose::synth, 2);
  auto random_square = [&] { return combine_coords(squares[rng.below(squares.size())]); };

  const Categorical household_size(cfg.household_size_distribution);
  std::vector<BaseFileRow> rows;
  rows.reserve(cfg.n_persons);

  // Households.
  std::uint64_t fam_id = 0;
  while (rows.size() < cfg.n_persons) {
    const std::size_t want = household_size(rng) + 1;
    const std::size_t size = std::min<std::size_t>(want, cfg.n_persons - rows.size());
    ++fam_id;
    const std::uint64_t square = random_square();
    const std::size_t first = rows.size();
    std::size_t adults = 0;
    for (std::size_t m = 0; m < size; ++m) {
      BaseFileRow r;
      r.ind_id = rows.size() + 1;
      const auto age = static_cast<std::int32_t>(rng.below(cfg.max_age));
      r.birth_y = cfg.reference_year - age;
      r.sex = static_cast<std::uint8_t>(1 + rng.below(2));
      r.dw_square = square;
      r.fam_id = fam_id;
      adults += age >= 18 ? 1 : 0;
      rows.push_back(r);
    }
    const auto ft = fam_type_for(adults, size - adults);
    for (std::size_t i = first; i < rows.size(); ++i) rows[i].fam_type = ft;
  }

  auto age_of = [&](const BaseFileRow& r) { return cfg.reference_year - r.birth_y; };

  // Schools by age band.
  std::uint64_t school_id = 0;
  std::vector<bool> in_school(rows.size(), false);
  for (const auto& band : cfg.school_age_bands) {
    std::vector<std::size_t> pupils;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto a = age_of(rows[i]);
      if (!in_school[i] && a >= band.min_age && a <= band.max_age) pupils.push_back(i);
    }
    if (pupils.empty()) continue;
    const std::size_t n_schools = (pupils.size() + band.school_size - 1) / band.school_size;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> schools;  // (id, square)
    for (std::size_t s = 0; s < n_schools; ++s) schools.emplace_back(++school_id, random_square());
    for (std::size_t i : pupils) {
      const auto& [id, sq] = schools[rng.below(schools.size())];
      rows[i].school_id = id;
      rows[i].school_square = sq;
      if (band.wp_type != WorkplaceType::other_school) rows[i].school_type = school_type_for(band.wp_type);
      in_school[i] = true;
    }
  }

  // Workplaces.
  std::vector<std::size_t> workers;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto a = age_of(rows[i]);
    if (in_school[i] || a < cfg.working_age_min || a > cfg.working_age_max) continue;
    if (rng.uniform() < cfg.employment_rate) workers.push_back(i);
  }
  shuffle(workers, rng);
  const Categorical workplace_size(cfg.resolved_workplace_sizes());
  const std::uint64_t n_hospitals =
      std::min<std::uint64_t>(std::max<std::uint64_t>(1, cfg.n_persons / cfg.persons_per_hospital),
                              workers.size());
  std::uint64_t workplace_id = 0;
  std::size_t next = 0;
  while (next < workers.size()) {
    ++workplace_id;
    const bool hospital = workplace_id <= n_hospitals;
    std::size_t size = workplace_size(rng) + 1;
    if (hospital) {
      // Leave at least one worker for each remaining hospital.
      size = std::min<std::size_t>(size, workers.size() - next - (n_hospitals - workplace_id));
    }
    size = std::min(size, workers.size() - next);
    const std::uint64_t square = random_square();
    std::uint16_t branch = cfg.hospital_branch_code;
    while (!hospital && branch == cfg.hospital_branch_code) {
      branch = static_cast<std::uint16_t>(1 + rng.below(65535));
    }
    const std::uint16_t mun = region_of_square(split_coords(square));
    for (std::size_t k = 0; k < size; ++k) {
      auto& r = rows[workers[next++]];
      r.workplace_id = workplace_id;
      r.company_id = workplace_id;
      r.wp_square = square;
      r.wp_branchcode = branch;
      r.wp_mun = mun;
    }
  }
  return rows;
}

}  // namespace microsim
