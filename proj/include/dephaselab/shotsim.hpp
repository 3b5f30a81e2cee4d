#pragma once

#include "dephaselab/operator_core.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

// Finite-statistics simulation: Born-rule probabilities, independent
// Poisson count sampling per outcome, and Monte-Carlo confidence intervals
// from percentiles of the resampled statistic.

namespace dephaselab {

/// xoshiro256** stream seeded through splitmix64. Task streams derive
/// from (seed, task_index) so parallel sampling never shares state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}
  Rng(std::uint64_t seed, std::uint64_t task_index);

  std::uint64_t next_u64();
  /// Uniform in [0, 1), 53 random bits.
  double next_double();
  /// Poisson(mean) draw: Knuth's product method below mean 30, Hormann's
  /// PTRS transformed rejection above.
  long long poisson(double mean);

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t state_[4];
};

/// Outcome labels, expected Poisson rates nu*p_i, and one sampled count
/// per outcome. The realized total sum(counts) fluctuates around nu.
struct CountRecord {
  std::vector<std::string> labels;
  std::vector<double> expected_rates;
  std::vector<long long> counts;
  long long shots = 0;
};

enum class SigmaLevel { One = 1, Two = 2, Three = 3 };

struct ConfidenceInterval {
  double center = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  SigmaLevel level = SigmaLevel::Three;
};

/// p_i = Tr[rho Pi_i]. The projectors must resolve the identity to 1e-10.
std::vector<double> born_probabilities(const DensityMatrix& rho,
                                       const std::vector<Operator>& projectors);

/// Independent Poisson counts with means nu * p_i. Deterministic under a
/// fixed seed.
CountRecord sample_counts(const std::vector<double>& probs, long long nu, std::uint64_t seed,
                          std::vector<std::string> labels = {});

/// Percentile interval of the statistic over Poisson resamples of the
/// observed counts (count_i' ~ Poisson(count_i)). The 3-sigma level is the
/// 0.135% / 99.865% percentile pair of the empirical distribution, not
/// mean +- 3 stdev, so skew at small counts is respected. Requires at
/// least 1000 resamples for the 3-sigma level.
ConfidenceInterval mc_interval(const std::function<double(const CountRecord&)>& statistic,
                               const CountRecord& record, int resamples, SigmaLevel level,
                               std::uint64_t seed);

/// Fraction of counts in one outcome; the statistic used for fringes.
double normalized_frequency(const CountRecord& record, std::size_t outcome);

/// Well-separated per-task seed from a base seed and task index, for
/// code that takes a plain seed rather than an Rng stream.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t task_index);

}  // namespace dephaselab
