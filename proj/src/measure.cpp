#include "scl/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scl/error.hpp"
#include "scl/parallel.hpp"

namespace scl {

namespace {

double quantile(std::vector<double> v, double p) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ReturnLengths checked_theta(const RotationNumber& rho, int n_max, bool truncate, std::optional<int>& truncated_at) {
  try {
    return return_lengths(rho, n_max);
  } catch (const PrecisionError& e) {
    if (!truncate || e.level() <= 1) throw;
    truncated_at = e.level();
    return return_lengths(rho, e.level() - 1);
  }
}

void summarize(ExponentEstimate& est) {
  const int levels = est.n_max - est.n_min + 1;
  est.levels.clear();
  for (int j = 0; j < levels; ++j) {
    std::vector<double> column;
    column.reserve(est.samples.size());
    for (const auto& s : est.samples) column.push_back(s.r[static_cast<std::size_t>(j)]);
    const double mean = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(column.size());
    est.levels.push_back(
        {est.n_min + j, mean, quantile(column, 0.05), quantile(column, 0.5), quantile(column, 0.95)});
  }
  double final_sum = 0, min_sum = 0, max_sum = 0;
  for (auto& s : est.samples) {
    const auto tail_begin = s.r.end() - std::min<std::ptrdiff_t>(kTailLevels, static_cast<std::ptrdiff_t>(s.r.size()));
    s.tail_min = *std::min_element(tail_begin, s.r.end());
    s.tail_max = *std::max_element(tail_begin, s.r.end());
    final_sum += s.r.back();
    min_sum += s.tail_min;
    max_sum += s.tail_max;
  }
  const auto count = static_cast<double>(est.samples.size());
  est.mean_final = final_sum / count;
  est.tail_min = min_sum / count;
  est.tail_max = max_sum / count;
}

}  // namespace

std::size_t ConjugacyGrid::locate(double x) const {
  x -= std::floor(x);
  auto it = std::upper_bound(atoms.begin(), atoms.end(), x,
                             [](double v, const AtomMeasurePair& a) { return v < a.left; });
  return it == atoms.begin() ? 0 : static_cast<std::size_t>(std::distance(atoms.begin(), it) - 1);
}

ConjugacyGrid conjugacy_grid(const DynamicalPartition& map_partition, const DynamicalPartition& rotation_partition,
                             const ReturnLengths& theta) {
  const int n = map_partition.level;
  if (rotation_partition.level != n) throw DomainError("grid needs partitions of the same level");
  if (theta.depth() < n) throw DomainError("return lengths too shallow for the grid level");
  if (map_partition.atoms.size() != rotation_partition.atoms.size())
    throw StructureError("map and rotation partitions differ in atom count at level " + std::to_string(n));
  ConjugacyGrid grid;
  grid.level = n;
  grid.atoms.reserve(map_partition.atoms.size());
  grid.mass_before.reserve(map_partition.atoms.size());
  const double short_mass = theta[static_cast<std::size_t>(n)];
  const double lengthy_mass = theta[static_cast<std::size_t>(n - 1)];
  double cumulative = 0.0;
  for (std::size_t i = 0; i < map_partition.atoms.size(); ++i) {
    const Atom& a = map_partition.atoms[i];
    const Atom& b = rotation_partition.atoms[i];
    if (a.label != b.label || a.k != b.k)
      throw StructureError("conjugacy does not preserve cyclic order at level " + std::to_string(n) + ", position " +
                           std::to_string(i));
    const double mass = a.label == AtomLabel::Short ? short_mass : lengthy_mass;
    grid.atoms.push_back({a.left, a.length, mass, b.left, a.label, a.k});
    grid.mass_before.push_back(cumulative);
    cumulative += mass;
  }
  return grid;
}

ConjugacyLadder::ConjugacyLadder(const CircleMap& f, const RotationNumber& rho, int n_max, bool truncate)
    : map_(f),
      rho_(rho),
      theta_(checked_theta(rho, n_max, truncate, truncated_at_)),
      map_ladder_(f, rho.cf(), theta_.depth(), truncate),
      rotation_ladder_(PartitionLadder::rotation(rho, theta_.depth(), truncate)) {
  const int depth = std::min(map_ladder_.n_max(), rotation_ladder_.n_max());
  if (depth < theta_.depth()) {
    const int cut = depth + 1;
    truncated_at_ = truncated_at_ ? std::min(*truncated_at_, cut) : cut;
  }
  grids_.reserve(static_cast<std::size_t>(depth));
  for (int n = 1; n <= depth; ++n)
    grids_.push_back(conjugacy_grid(map_ladder_.level(n), rotation_ladder_.level(n), theta_));
}

const ConjugacyGrid& ConjugacyLadder::grid(int n) const {
  if (n < 1 || n > n_max()) throw DomainError("level " + std::to_string(n) + " not in ladder");
  return grids_[static_cast<std::size_t>(n - 1)];
}

double distribution(const ConjugacyLadder& ladder, double x, int n) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const auto& grid = ladder.grid(n);
  return grid.mass_before[grid.locate(x)];
}

std::vector<double> exponent_sequence(const ConjugacyLadder& ladder, double x, int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max) throw DomainError("exponent levels must satisfy 1 <= n_min <= n_max");
  std::vector<double> r;
  r.reserve(static_cast<std::size_t>(n_max - n_min + 1));
  for (int n = n_min; n <= n_max; ++n) {
    const auto& grid = ladder.grid(n);
    const auto& atom = grid.atoms[grid.locate(x)];
    if (atom.lebesgue_length < kPrecisionFloor) throw PrecisionError("atom below precision floor", n);
    r.push_back(std::log(atom.mu_mass) / std::log(atom.lebesgue_length));
  }
  return r;
}

const char* to_string(SamplingMeasure m) noexcept { return m == SamplingMeasure::Lebesgue ? "lebesgue" : "mu"; }

const char* to_string(SamplingScheme s) noexcept {
  return s == SamplingScheme::Independent ? "independent" : "stratified";
}

SamplingScheme sampling_scheme_from_string(const std::string& name) {
  if (name == "independent") return SamplingScheme::Independent;
  if (name == "stratified") return SamplingScheme::Stratified;
  throw DomainError("unknown sampling scheme '" + name + "'");
}

ExponentEstimate estimate_exponents(const ConjugacyLadder& ladder, SamplingMeasure sampling, int sample_count,
                                    int n_min, int n_max, std::uint64_t seed, int threads, SamplingScheme scheme) {
  if (sample_count < 1) throw DomainError("sample count must be >= 1");
  const auto& top = ladder.grid(n_max);
  ExponentEstimate est;
  est.sampling = sampling;
  est.scheme = scheme;
  est.n_min = n_min;
  est.n_max = n_max;
  est.seed = seed;
  est.samples.resize(static_cast<std::size_t>(sample_count));
  const double total_mass = top.mass_before.back() + top.atoms.back().mu_mass;

  parallel_for(est.samples.size(), threads, [&](std::size_t i) {
    auto rng = SplitMix64::for_index(seed, i);
    double u = rng.uniform();
    if (scheme == SamplingScheme::Stratified)
      u = (static_cast<double>(i) + u) / static_cast<double>(est.samples.size());
    double x = 0.0;
    if (sampling == SamplingMeasure::Lebesgue) {
      x = u;
    } else {
      const double target = u * total_mass;
      auto it = std::upper_bound(top.mass_before.begin(), top.mass_before.end(), target);
      const auto j = static_cast<std::size_t>(std::distance(top.mass_before.begin(), it) - 1);
      const auto& atom = top.atoms[j];
      x = atom.left + rng.uniform() * atom.lebesgue_length;
      if (x >= 1.0) x = std::nextafter(1.0, 0.0);
    }
    auto& s = est.samples[i];
    s.index = i;
    s.x = x;
    s.r = exponent_sequence(ladder, x, n_min, n_max);
  });
  summarize(est);
  return est;
}

double expected_exponent(const ConjugacyLadder& ladder, SamplingMeasure sampling, int n) {
  double sum = 0.0;
  for (const auto& a : ladder.grid(n).atoms) {
    const double weight = sampling == SamplingMeasure::Invariant ? a.mu_mass : a.lebesgue_length;
    sum += weight * std::log(a.mu_mass) / std::log(a.lebesgue_length);
  }
  return sum;
}

ExponentEstimate gamma_exponents(const ExponentEstimate& est) {
  ExponentEstimate out = est;
  out.sampling = est.sampling == SamplingMeasure::Invariant ? SamplingMeasure::Lebesgue : SamplingMeasure::Invariant;
  for (auto& s : out.samples)
    for (double& r : s.r) {
      if (!(r > 0.0)) throw DomainError("gamma exponents need positive tail statistics");
      r = 1.0 / r;
    }
  summarize(out);
  return out;
}

std::vector<SingularityLevel> singularity_profile(const ConjugacyLadder& ladder, int n_min, int n_max, double mass) {
  std::vector<SingularityLevel> out;
  for (int n = std::max(n_min, 1); n <= n_max; ++n) {
    const auto& grid = ladder.grid(n);
    std::vector<std::size_t> order(grid.atoms.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return grid.atoms[i].mu_mass / grid.atoms[i].lebesgue_length >
             grid.atoms[j].mu_mass / grid.atoms[j].lebesgue_length;
    });
    double mu = 0.0, leb = 0.0;
    for (std::size_t i : order) {
      const auto& a = grid.atoms[i];
      if (mu + a.mu_mass >= mass) {
        // uniform density inside the last atom
        leb += a.lebesgue_length * (mass - mu) / a.mu_mass;
        mu = mass;
        break;
      }
      mu += a.mu_mass;
      leb += a.lebesgue_length;
    }
    out.push_back({n, leb});
  }
  return out;
}

HausdorffEstimate hausdorff_estimate(const ExponentEstimate& est) {
  if (est.sampling != SamplingMeasure::Invariant) throw DomainError("requires mu sampling");
  const auto& last = est.levels.back();
  return {est.tail_min, last.q05, last.q95};
}

nlohmann::json summary_json(const ExponentEstimate& est) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : est.levels)
    levels.push_back({{"level", l.level}, {"mean", l.mean}, {"q05", l.q05}, {"q50", l.q50}, {"q95", l.q95}});
  return {{"sampling", to_string(est.sampling)},
          {"scheme", to_string(est.scheme)},
          {"n_min", est.n_min},
          {"n_max", est.n_max},
          {"seed", est.seed},
          {"samples", est.samples.size()},
          {"mean_final", est.mean_final},
          {"tail_min", est.tail_min},
          {"tail_max", est.tail_max},
          {"levels", std::move(levels)}};
}

}  // namespace scl
