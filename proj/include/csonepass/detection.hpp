// Support detection: initial Fourier transform of the available samples,
// missing-sample noise variance, detection threshold, comparator mask.
#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "csonepass/errors.hpp"
#include "csonepass/signal_model.hpp"
#include "csonepass/types.hpp"

namespace csonepass {

/// Unnormalized transform X(k) = sum_a y(a) e^{-j 2 pi n_a k / N}.
template <typename Scalar = double>
struct Spectrum {
  ComplexVector<Scalar> coeffs;

  Index n_total() const noexcept { return coeffs.size(); }
};

enum class ThresholdMode { kExact, kApproxConstant };

/// Fallback constant C = ln(1 - P^(1/N)) frozen at P = 0.99, N = 1024,
/// for use when N is unknown at configuration time.
inline constexpr double kDefaultApproxConstant = -11.53;

template <typename Scalar = double>
struct ThresholdParams {
  Scalar probability{Scalar(0.99)};
  ThresholdMode mode{ThresholdMode::kExact};
  Scalar approx_constant{Scalar(kDefaultApproxConstant)};
};

/// Comparator output: mask[k] = (|X(k)|/N > T), plus the sorted index list.
class SupportSet {
 public:
  SupportSet(Index n_total, std::vector<bool> mask)
      : n_total_(n_total), mask_(std::move(mask)) {
    if (static_cast<Index>(mask_.size()) != n_total_)
      throw DimensionError("SupportSet: mask length must equal N");
    for (Index k = 0; k < n_total_; ++k)
      if (mask_[static_cast<std::size_t>(k)]) indices_.push_back(k);
  }

  static SupportSet from_indices(Index n_total, const std::vector<Index>& indices) {
    if (n_total < 1) throw RangeError("SupportSet: N must be positive");
    std::vector<bool> mask(static_cast<std::size_t>(n_total), false);
    for (Index k : indices) {
      if (k < 0 || k >= n_total) throw RangeError("SupportSet: index out of [0, N)");
      if (mask[static_cast<std::size_t>(k)])
        throw InvalidSpecError("SupportSet: duplicate index");
      mask[static_cast<std::size_t>(k)] = true;
    }
    return SupportSet(n_total, std::move(mask));
  }

  Index n_total() const noexcept { return n_total_; }
  const std::vector<bool>& mask() const noexcept { return mask_; }
  const std::vector<Index>& indices() const noexcept { return indices_; }
  Index count() const noexcept { return static_cast<Index>(indices_.size()); }
  bool empty() const noexcept { return indices_.empty(); }

 private:
  Index n_total_;
  std::vector<bool> mask_;
  std::vector<Index> indices_;
};

/// X(k) = sum_a y(a) e^{-j 2 pi n_a k / N}, k = 0..N-1, computed by
/// zero-filling the missing positions and running a length-N FFT.
template <typename Scalar>
Spectrum<Scalar> initial_transform(const MeasurementSet<Scalar>& meas, Index n_total) {
  if (n_total < meas.size())
    throw DimensionError("initial_transform: N must be >= M");
  if (n_total < meas.n_total())
    throw DimensionError("initial_transform: N smaller than the sampling range");
  std::vector<Complex<Scalar>> padded(static_cast<std::size_t>(n_total), Complex<Scalar>(0));
  for (Index a = 0; a < meas.size(); ++a)
    padded[static_cast<std::size_t>(meas.pattern().positions()[static_cast<std::size_t>(a)])] =
        meas.values()[a];
  std::vector<Complex<Scalar>> out;
  Eigen::FFT<Scalar> fft;
  fft.fwd(out, padded);
  ComplexVector<Scalar> coeffs(n_total);
  for (Index k = 0; k < n_total; ++k) coeffs[k] = out[static_cast<std::size_t>(k)];
  return {std::move(coeffs)};
}

/// sigma^2 = (N-M)/(N-1) * sum_a |y(a)|^2. Zero under full sampling.
template <typename Scalar>
Scalar noise_variance(const MeasurementSet<Scalar>& meas, Index n_total) {
  if (n_total < 2) throw RangeError("noise_variance: N must be >= 2");
  if (n_total < meas.size())
    throw DimensionError("noise_variance: N must be >= M");
  const Scalar mu =
      Scalar(n_total - meas.size()) / Scalar(n_total - 1);
  return mu * meas.values().squaredNorm();
}

/// C = ln(1 - P^(1/N)); always negative on the valid domain.
template <typename Scalar>
Scalar approx_constant(Scalar probability, Index n_total) {
  if (!(probability > Scalar(0)) || !(probability < Scalar(1)))
    throw RangeError("approx_constant: probability must lie in (0, 1)");
  if (n_total < 1) throw RangeError("approx_constant: N must be positive");
  // 1 - P^(1/N) via expm1 keeps precision when P^(1/N) is close to 1
  return std::log(-std::expm1(std::log(probability) / Scalar(n_total)));
}

/// T = (1/N) sqrt(-sigma^2 C) with C = ln(1 - P^(1/N)) (exact mode) or the
/// configured constant (approx mode).
template <typename Scalar>
Scalar compute_threshold(Scalar sigma_sq, Index n_total, const ThresholdParams<Scalar>& params) {
  if (sigma_sq < Scalar(0)) throw RangeError("compute_threshold: sigma^2 must be >= 0");
  if (n_total < 1) throw RangeError("compute_threshold: N must be positive");
  Scalar c;
  if (params.mode == ThresholdMode::kExact) {
    c = approx_constant(params.probability, n_total);
  } else {
    if (!(params.approx_constant < Scalar(0)))
      throw RangeError("compute_threshold: approx constant must be negative");
    c = params.approx_constant;
  }
  return std::sqrt(-sigma_sq * c) / Scalar(n_total);
}

/// Strict comparison |X(k)|/N > T; ties at exactly T are excluded.
template <typename Scalar>
SupportSet detect_support(const Spectrum<Scalar>& spectrum, Scalar threshold) {
  if (threshold < Scalar(0)) throw RangeError("detect_support: threshold must be >= 0");
  const Index n = spectrum.n_total();
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < n; ++k)
    mask[static_cast<std::size_t>(k)] = std::abs(spectrum.coeffs[k]) / Scalar(n) > threshold;
  return SupportSet(n, std::move(mask));
}

}  // namespace csonepass
