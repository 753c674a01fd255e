// Closed-form operation and clock-cycle counts for the reconstruction
// hardware, including the real-operation cost model for complex matrix
// products (one complex multiply = 4 real multiplies + 2 real adds, one
// complex add = 2 real adds).
#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "csonepass/errors.hpp"

namespace csonepass {

struct FlopReport {
  std::int64_t additions{0};
  std::int64_t multiplications{0};
  std::int64_t extra{0};  // method-specific surcharge (Gram inversion K^2)

  bool operator==(const FlopReport&) const = default;
};

/// Clock cycles per block. comparator and solver_block are asymptotic
/// entries reported with unit constants; the others are exact closed forms.
struct CycleReport {
  std::int64_t threshold_block{0};
  std::int64_t comparator{0};
  std::int64_t r_block{0};
  std::int64_t inversion_block{0};
  std::int64_t solver_block{0};

  bool operator==(const CycleReport&) const = default;
};

namespace detail {

inline void require_positive(std::int64_t k, std::int64_t m, const char* where) {
  if (k < 1 || m < 1) throw RangeError(std::string(where) + ": arguments must be >= 1");
}

}  // namespace detail

/// Real-operation cost of a dense complex (p x n) * (n x m) product:
/// 4pmn - 2pm additions, 4pmn multiplications.
inline FlopReport complex_product_cost(std::int64_t p, std::int64_t n, std::int64_t m) {
  if (p < 1 || n < 1 || m < 1)
    throw RangeError("complex_product_cost: dimensions must be >= 1");
  return {4 * p * m * n - 2 * p * m, 4 * p * m * n, 0};
}

/// Q-free solve, X = Rinv Rinv^* A^* y:
/// 2K(K^2 + K + 2M - 2) additions, 4K(K^2 + M + K) multiplications.
inline FlopReport flops_qfree(std::int64_t k, std::int64_t m) {
  detail::require_positive(k, m, "flops_qfree");
  return {2 * k * (k * k + k + 2 * m - 2), 4 * k * (k * k + m + k), 0};
}

/// Normal-equations solve, X = (A^*A)^{-1} A^* y:
/// 2K(2MK - K + 2M - 1) additions, 4MK(K + 1) multiplications, plus K^2
/// for inverting the product matrix.
inline FlopReport flops_direct(std::int64_t k, std::int64_t m) {
  detail::require_positive(k, m, "flops_direct");
  return {2 * k * (2 * m * k - k + 2 * m - 1), 4 * m * k * (k + 1), k * k};
}

struct QrFlops {
  std::int64_t r_flops{0};
  std::int64_t q_flops_avoided{0};

  bool operator==(const QrFlops&) const = default;
};

/// Givens QR on an m x n matrix (m > n): n^2(m - n) flops for R; the
/// avoided Q factor would cost 4n(m^2 - n^2)/3, truncated when fractional.
inline QrFlops flops_qr(std::int64_t m, std::int64_t n) {
  if (n < 1 || m <= n) throw RangeError("flops_qr: need m > n >= 1");
  return {n * n * (m - n), 4 * n * (m * m - n * n) / 3};
}

/// Per-step tally of the Q-free solve, accounted product by product:
/// the correlation A^* y and the final matrix-vector application at the
/// full complex-product cost, the K x K inverse-pair product with its
/// complex additions only. Equals flops_qfree(k, m) for every (k, m).
inline FlopReport qfree_solve_tally(std::int64_t k, std::int64_t m) {
  detail::require_positive(k, m, "qfree_solve_tally");
  const FlopReport correlate = complex_product_cost(k, m, 1);   // A^* y
  const FlopReport apply = complex_product_cost(k, k, 1);       // (Rinv Rinv^*) (A^* y)
  FlopReport tally;
  tally.additions = correlate.additions + 2 * k * k * (k - 1) + apply.additions;
  tally.multiplications =
      correlate.multiplications + 4 * k * k * k + apply.multiplications;
  return tally;
}

inline std::int64_t ceil_log2(std::int64_t m) {
  if (m < 1) throw RangeError("ceil_log2: argument must be >= 1");
  return static_cast<std::int64_t>(std::bit_width(static_cast<std::uint64_t>(m - 1)));
}

/// Clock-cycle model: 3M + 61 (threshold), ceil(log2 M) (comparator),
/// 126K - 8 (R block), 34K - 4 (inversion), KM + K^2 (solver).
inline CycleReport cycle_report(std::int64_t k, std::int64_t m) {
  detail::require_positive(k, m, "cycle_report");
  return {3 * m + 61, ceil_log2(m), 126 * k - 8, 34 * k - 4, k * m + k * k};
}

}  // namespace csonepass
