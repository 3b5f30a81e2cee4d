#include "dephaselab/shotsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dephaselab {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Two-sided normal tail percentiles for 1, 2 and 3 sigma.
constexpr double kLowerQuantile[] = {0.0, 0.15865525393145707, 0.02275013194817921,
                                     0.0013498980316300933};

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t task_index) {
  // Distinct tasks start at distinct points of the splitmix gamma
  // sequence, then expand into the xoshiro state.
  std::uint64_t sm = seed + task_index * 0x9E3779B97F4A7C15ULL;
  for (auto& word : state_) word = splitmix64(sm);
  bool all_zero = true;
  for (auto word : state_) all_zero = all_zero && word == 0;
  if (all_zero) state_[0] = 1;
}

std::uint64_t Rng::next_u64() {
  // xoshiro256**
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

long long Rng::poisson(double mean) {
  if (mean < 0.0 || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;

  if (mean < 30.0) {
    // Knuth: count uniform factors until the product drops below e^-mean.
    const double threshold = std::exp(-mean);
    long long k = -1;
    double product = 1.0;
    do {
      product *= next_double();
      ++k;
    } while (product > threshold);
    return k;
  }

  // Hormann's PTRS transformed rejection, exact for mean >= ~10.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  while (true) {
    double u = next_double() - 0.5;
    const double v = next_double();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return static_cast<long long>(kf);
    }
  }
}

std::vector<double> born_probabilities(const DensityMatrix& rho,
                                       const std::vector<Operator>& projectors) {
  if (projectors.empty()) {
    throw std::invalid_argument("born_probabilities needs at least one projector");
  }
  const int d = rho.dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const Operator& proj : projectors) {
    if (proj.dim() != d) {
      throw std::invalid_argument("projector dimension mismatch");
    }
    sum += proj.matrix();
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("projectors do not resolve the identity");
  }
  std::vector<double> probs;
  probs.reserve(projectors.size());
  for (const Operator& proj : projectors) {
    const double p = (rho.matrix() * proj.matrix()).trace().real();
    probs.push_back(std::max(0.0, p));
  }
  return probs;
}

CountRecord sample_counts(const std::vector<double>& probs, long long nu, std::uint64_t seed,
                          std::vector<std::string> labels) {
  if (nu < 1) {
    throw std::invalid_argument("sample_counts needs nu >= 1");
  }
  double total = 0.0;
  for (double p : probs) {
    if (p < -1e-12) throw std::invalid_argument("negative outcome probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw std::invalid_argument("outcome probabilities must sum to 1");
  }
  CountRecord record;
  if (labels.empty()) {
    for (std::size_t i = 0; i < probs.size(); ++i) record.labels.push_back(std::to_string(i));
  } else {
    if (labels.size() != probs.size()) {
      throw std::invalid_argument("label count does not match outcome count");
    }
    record.labels = std::move(labels);
  }
  record.shots = nu;
  Rng rng(seed);
  for (double p : probs) {
    const double rate = static_cast<double>(nu) * std::max(0.0, p);
    record.expected_rates.push_back(rate);
    record.counts.push_back(rng.poisson(rate));
  }
  return record;
}

ConfidenceInterval mc_interval(const std::function<double(const CountRecord&)>& statistic,
                               const CountRecord& record, int resamples, SigmaLevel level,
                               std::uint64_t seed) {
  if (level == SigmaLevel::Three && resamples < 1000) {
    throw std::invalid_argument("3-sigma intervals need at least 1000 resamples");
  }
  if (resamples < 2) {
    throw std::invalid_argument("mc_interval needs at least 2 resamples");
  }

  std::vector<double> values(resamples);
  CountRecord resampled = record;
  for (int r = 0; r < resamples; ++r) {
    Rng rng(seed, static_cast<std::uint64_t>(r) + 1);
    for (std::size_t i = 0; i < record.counts.size(); ++i) {
      resampled.counts[i] = rng.poisson(static_cast<double>(record.counts[i]));
    }
    values[r] = statistic(resampled);
  }
  std::sort(values.begin(), values.end());

  // Type-7 (linear interpolation) empirical quantile.
  auto quantile = [&values](double q) {
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
  };

  const double tail = kLowerQuantile[static_cast<int>(level)];
  ConfidenceInterval interval;
  interval.center = statistic(record);
  interval.lower = quantile(tail);
  interval.upper = quantile(1.0 - tail);
  interval.level = level;
  return interval;
}

double normalized_frequency(const CountRecord& record, std::size_t outcome) {
  long long total = 0;
  for (long long c : record.counts) total += c;
  if (total == 0) return 0.0;
  return static_cast<double>(record.counts[outcome]) / static_cast<double>(total);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t task_index) {
  std::uint64_t sm = seed + (task_index + 1) * 0x9E3779B97F4A7C15ULL;
  splitmix64(sm);
  return splitmix64(sm);
}

}  // namespace dephaselab
