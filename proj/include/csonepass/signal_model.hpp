// K-sparse test signals, random sampling patterns, and measurement extraction.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "csonepass/errors.hpp"
#include "csonepass/types.hpp"

namespace csonepass {

namespace detail {

/// Unbiased draw from [0, bound) on top of the (fully specified) mt19937_64,
/// so patterns are bit-identical across platforms for a given seed.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t reject_below = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= reject_below) return r % bound;
  }
}

}  // namespace detail

/// splitmix64-style mix; gives independent per-trial seeds from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

template <typename Scalar = double>
struct SignalComponent {
  Index freq_index;
  Complex<Scalar> amplitude;
};

/// Frequency-domain description of a K-sparse signal of length N.
/// Component frequency indices are distinct and in [0, N).
template <typename Scalar = double>
class SparseSignal {
 public:
  SparseSignal(Index n_total, std::vector<SignalComponent<Scalar>> components)
      : n_total_(n_total), components_(std::move(components)) {
    if (n_total_ < 1) throw RangeError("SparseSignal: signal length must be positive");
    if (components_.empty() || static_cast<Index>(components_.size()) > n_total_)
      throw InvalidSpecError("SparseSignal: component count must be in [1, N]");
    std::vector<Index> seen;
    seen.reserve(components_.size());
    for (const auto& c : components_) {
      if (c.freq_index < 0 || c.freq_index >= n_total_)
        throw RangeError("SparseSignal: frequency index out of [0, N)");
      seen.push_back(c.freq_index);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw InvalidSpecError("SparseSignal: duplicate frequency index");
  }

  Index n_total() const noexcept { return n_total_; }
  Index sparsity() const noexcept { return static_cast<Index>(components_.size()); }
  const std::vector<SignalComponent<Scalar>>& components() const noexcept {
    return components_;
  }

 private:
  Index n_total_;
  std::vector<SignalComponent<Scalar>> components_;
};

template <typename Scalar = double>
struct TimeSignal {
  ComplexVector<Scalar> samples;

  Index length() const noexcept { return samples.size(); }
};

/// Sorted distinct sample positions n_a in [0, N); M = size().
class SamplingPattern {
 public:
  SamplingPattern(Index n_total, std::vector<Index> positions)
      : n_total_(n_total), positions_(std::move(positions)) {
    if (n_total_ < 1) throw RangeError("SamplingPattern: N must be positive");
    const Index m = static_cast<Index>(positions_.size());
    if (m < 1 || m > n_total_)
      throw RangeError("SamplingPattern: M must satisfy 1 <= M <= N");
    for (Index a = 0; a < m; ++a) {
      if (positions_[a] < 0 || positions_[a] >= n_total_)
        throw RangeError("SamplingPattern: position out of [0, N)");
      if (a > 0 && positions_[a] <= positions_[a - 1])
        throw RangeError("SamplingPattern: positions must be strictly increasing");
    }
  }

  static SamplingPattern full(Index n_total) {
    std::vector<Index> all(static_cast<std::size_t>(n_total));
    std::iota(all.begin(), all.end(), Index{0});
    return SamplingPattern(n_total, std::move(all));
  }

  Index n_total() const noexcept { return n_total_; }
  Index size() const noexcept { return static_cast<Index>(positions_.size()); }
  const std::vector<Index>& positions() const noexcept { return positions_; }

 private:
  Index n_total_;
  std::vector<Index> positions_;
};

/// Available samples y(a) = x(n_a) together with their positions.
template <typename Scalar = double>
class MeasurementSet {
 public:
  MeasurementSet(SamplingPattern pattern, ComplexVector<Scalar> values)
      : pattern_(std::move(pattern)), values_(std::move(values)) {
    if (values_.size() != pattern_.size())
      throw DimensionError("MeasurementSet: value count must equal pattern size");
  }

  const SamplingPattern& pattern() const noexcept { return pattern_; }
  const ComplexVector<Scalar>& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.size(); }
  Index n_total() const noexcept { return pattern_.n_total(); }

 private:
  SamplingPattern pattern_;
  ComplexVector<Scalar> values_;
};

/// x(n) = sum_i amplitude_i * e^{+j 2 pi k_i n / N}, n = 0..N-1.
/// No 1/N factor: the least-squares amplitudes come back unscaled.
template <typename Scalar>
TimeSignal<Scalar> synthesize(const SparseSignal<Scalar>& spec) {
  const Index n = spec.n_total();
  ComplexVector<Scalar> samples = ComplexVector<Scalar>::Zero(n);
  const Scalar step = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(n);
  for (const auto& c : spec.components()) {
    for (Index t = 0; t < n; ++t) {
      // reduce k*t mod N before forming the angle; keeps phases accurate for large k*t
      const Index q = (c.freq_index * t) % n;
      samples[t] += c.amplitude * std::polar(Scalar(1), step * Scalar(q));
    }
  }
  return {std::move(samples)};
}

/// m distinct positions drawn uniformly without replacement; the seed fully
/// determines the result.
inline SamplingPattern draw_pattern(Index n_total, Index m, std::uint64_t seed) {
  if (n_total < 1 || m < 1 || m > n_total)
    throw RangeError("draw_pattern: need 1 <= m <= n_total");
  std::mt19937_64 rng(seed);
  std::vector<Index> pool(static_cast<std::size_t>(n_total));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < m; ++i) {
    const auto pick =
        i + static_cast<Index>(detail::uniform_below(rng, static_cast<std::uint64_t>(n_total - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick)]);
  }
  pool.resize(static_cast<std::size_t>(m));
  std::sort(pool.begin(), pool.end());
  return SamplingPattern(n_total, std::move(pool));
}

template <typename Scalar>
MeasurementSet<Scalar> sample(const TimeSignal<Scalar>& x, const SamplingPattern& pattern) {
  if (pattern.n_total() != x.length())
    throw DimensionError("sample: pattern length does not match signal length");
  ComplexVector<Scalar> values(pattern.size());
  for (Index a = 0; a < pattern.size(); ++a)
    values[a] = x.samples[pattern.positions()[static_cast<std::size_t>(a)]];
  return MeasurementSet<Scalar>(pattern, std::move(values));
}

}  // namespace csonepass
