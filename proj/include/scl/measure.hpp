#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scl/cf.hpp"
#include "scl/circle_map.hpp"
#include "scl/partition.hpp"

namespace scl {

/// An atom of B(n; f) with its Lebesgue length and its invariant-measure mass,
/// the latter read off the conjugate atom of B(n; rho).
struct AtomMeasurePair {
  double left = 0.0;
  double lebesgue_length = 0.0;
  double mu_mass = 0.0;
  double rotation_left = 0.0;  ///< phi(left)
  AtomLabel label = AtomLabel::Lengthy;
  std::int64_t k = 0;
};

struct ConjugacyGrid {
  int level = 0;
  std::vector<AtomMeasurePair> atoms;  ///< in circle order starting at 0
  std::vector<double> mass_before;     ///< mass of atoms strictly left of atom i

  std::size_t locate(double x) const;
};

/// Pairs B(n; f) with B(n; rho) through the atom labels (short/lengthy, k).
/// Throws StructureError when the two partitions disagree in cyclic order.
ConjugacyGrid conjugacy_grid(const DynamicalPartition& map_partition, const DynamicalPartition& rotation_partition,
                             const ReturnLengths& theta);

/// Map ladder, rotation ladder and their grids for one (f, rho) pair.
class ConjugacyLadder {
 public:
  ConjugacyLadder(const CircleMap& f, const RotationNumber& rho, int n_max, bool truncate_on_precision = false);

  int n_max() const noexcept { return static_cast<int>(grids_.size()); }
  std::optional<int> truncated_at() const noexcept { return truncated_at_; }
  const CircleMap& map() const noexcept { return map_; }
  const RotationNumber& rho() const noexcept { return rho_; }
  const ReturnLengths& theta() const noexcept { return theta_; }
  const PartitionLadder& map_ladder() const noexcept { return map_ladder_; }
  const PartitionLadder& rotation_ladder() const noexcept { return rotation_ladder_; }
  const ConjugacyGrid& grid(int n) const;

 private:
  CircleMap map_;
  RotationNumber rho_;
  std::optional<int> truncated_at_;  // written while theta_ is initialized
  ReturnLengths theta_;
  PartitionLadder map_ladder_;
  PartitionLadder rotation_ladder_;
  std::vector<ConjugacyGrid> grids_;
};

/// Lower sum for M(x) = mu([0, x)) at level n: masses of the atoms left of x.
double distribution(const ConjugacyLadder& ladder, double x, int n);

/// r_n = log mu(Box^n_x) / log |Box^n_x| for n = n_min..n_max.
std::vector<double> exponent_sequence(const ConjugacyLadder& ladder, double x, int n_min, int n_max);

enum class SamplingMeasure { Lebesgue, Invariant };

const char* to_string(SamplingMeasure m) noexcept;

/// Independent: every sample draws its CDF position uniformly from [0,1).
/// Stratified: sample i draws uniformly from [i/N, (i+1)/N). Each sample is
/// still distributed by the sampling measure; the mean has far less variance.
enum class SamplingScheme { Independent, Stratified };

const char* to_string(SamplingScheme s) noexcept;
SamplingScheme sampling_scheme_from_string(const std::string& name);

struct ExponentSample {
  std::uint64_t index = 0;
  double x = 0.0;
  std::vector<double> r;  ///< levels n_min..n_max
  double tail_min = 0.0;  ///< over the last three levels
  double tail_max = 0.0;
};

struct LevelSummary {
  int level = 0;
  double mean = 0.0;
  double q05 = 0.0, q50 = 0.0, q95 = 0.0;
};

struct ExponentEstimate {
  SamplingMeasure sampling = SamplingMeasure::Lebesgue;
  SamplingScheme scheme = SamplingScheme::Stratified;
  int n_min = 0, n_max = 0;
  std::uint64_t seed = 0;
  std::vector<ExponentSample> samples;
  std::vector<LevelSummary> levels;
  double mean_final = 0.0;  ///< mean of r_{n_max}
  double tail_min = 0.0;    ///< mean of the per-sample tail minima (liminf proxy)
  double tail_max = 0.0;    ///< mean of the per-sample tail maxima (limsup proxy)
};

/// Number of trailing levels the limsup/liminf proxies look at.
inline constexpr int kTailLevels = 3;

/// Samples x by Lebesgue measure or by mu and aggregates exponent sequences.
/// Sample i draws from its own generator seeded by (seed, i), so results do not
/// depend on the thread count.
ExponentEstimate estimate_exponents(const ConjugacyLadder& ladder, SamplingMeasure sampling, int sample_count,
                                    int n_min, int n_max, std::uint64_t seed, int threads = 1,
                                    SamplingScheme scheme = SamplingScheme::Stratified);

/// Exact expectation of r_n under the sampling measure, by summing over the
/// atoms of B(n) instead of sampling.
double expected_exponent(const ConjugacyLadder& ladder, SamplingMeasure sampling, int n);

/// Reciprocal exponents living on the rotation side: gamma_lower = 1/tau_upper,
/// gamma_upper = 1/tau_lower. The sampling tag is swapped since phi carries mu to Lebesgue.
ExponentEstimate gamma_exponents(const ExponentEstimate& est);

struct SingularityLevel {
  int level = 0;
  double lebesgue_fraction = 0.0;
};

/// Smallest Lebesgue measure of a union of atoms (densest first) carrying `mass` of mu.
std::vector<SingularityLevel> singularity_profile(const ConjugacyLadder& ladder, int n_min, int n_max,
                                                  double mass = 0.99);

struct HausdorffEstimate {
  double value = 0.0;
  double band_lo = 0.0, band_hi = 0.0;  ///< 5% and 95% quantiles at n_max
};

/// HD(mu) proxy: the mu-sampled tail-min statistic. Throws DomainError for Lebesgue sampling.
HausdorffEstimate hausdorff_estimate(const ExponentEstimate& est);

nlohmann::json summary_json(const ExponentEstimate& est);

}  // namespace scl
