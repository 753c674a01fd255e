// Givens-rotation computation of the upper-triangular factor R, as a direct
// row-absorption algorithm and as a cycle-level triangular systolic array.
// Q is never formed.
#pragma once

#include <cassert>
#include <cmath>
#include <deque>
#include <utility>
#include <vector>

#include "csonepass/cs_matrix.hpp"
#include "csonepass/errors.hpp"
#include "csonepass/systolic.hpp"
#include "csonepass/types.hpp"

namespace csonepass {

/// Coefficients of the 2x2 rotation [[c, s], [-conj(s), c]] with real c >= 0
/// and c^2 + |s|^2 = 1. Real inputs give the familiar real Givens pair.
template <typename Scalar = double>
struct RotationCoeffs {
  Scalar c;
  Complex<Scalar> s;
};

/// Upper-triangular factor of order K with real non-negative diagonal;
/// entries below the diagonal are exactly zero.
template <typename Scalar = double>
class RFactor {
 public:
  explicit RFactor(ComplexMatrix<Scalar> entries, bool rank_warning = false)
      : entries_(std::move(entries)), rank_warning_(rank_warning) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
      throw DimensionError("RFactor: matrix must be square and non-empty");
    for (Index i = 0; i < entries_.rows(); ++i) {
      if (entries_(i, i).imag() != Scalar(0) || entries_(i, i).real() < Scalar(0))
        throw InvalidSpecError("RFactor: diagonal must be real and non-negative");
      for (Index j = 0; j < i; ++j)
        if (entries_(i, j) != Complex<Scalar>(0))
          throw InvalidSpecError("RFactor: entries below the diagonal must be zero");
    }
  }

  Index order() const noexcept { return entries_.rows(); }
  const ComplexMatrix<Scalar>& matrix() const noexcept { return entries_; }
  /// Set when the factor was produced from fewer rows than columns.
  bool rank_warning() const noexcept { return rank_warning_; }

 private:
  ComplexMatrix<Scalar> entries_;
  bool rank_warning_;
};

/// Diagonal (circular) cell. The stored value r is real non-negative by
/// construction (it starts at zero and is only ever replaced by a norm).
/// Returns the updated value sqrt(r^2 + |x|^2) and the rotation that zeroes
/// x against it: c = r / r_new, s = conj(x) / r_new, identity when both
/// vanish.
template <typename Scalar>
std::pair<Scalar, RotationCoeffs<Scalar>> boundary_cell_update(Scalar r,
                                                               const Complex<Scalar>& x_in) {
  assert(r >= Scalar(0));
  const Scalar r_new = std::hypot(r, std::abs(x_in));
  if (r_new == Scalar(0)) return {r_new, {Scalar(1), Complex<Scalar>(0)}};
  return {r_new, {r / r_new, std::conj(x_in) / r_new}};
}

/// Off-diagonal (rectangular) cell: r_new = c r + s x, w_out = -conj(s) r + c x.
template <typename Scalar>
std::pair<Complex<Scalar>, Complex<Scalar>> internal_cell_update(
    const Complex<Scalar>& r, const Complex<Scalar>& r_in, const RotationCoeffs<Scalar>& coeffs) {
  return {coeffs.c * r + coeffs.s * r_in,
          -std::conj(coeffs.s) * r + coeffs.c * r_in};
}

/// R of order K with R*R = A*A, built by absorbing the rows of A in index
/// order. Fewer rows than columns is allowed; the result carries a rank
/// warning in that case.
template <typename Derived>
RFactor<typename Eigen::NumTraits<typename Derived::Scalar>::Real> givens_r(
    const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  static_assert(Eigen::NumTraits<typename Derived::Scalar>::IsComplex,
                "givens_r expects a complex matrix");
  const Index m = a.rows();
  const Index k = a.cols();
  if (m < 1 || k < 1) throw DimensionError("givens_r: matrix must be non-empty");
  ComplexMatrix<Scalar> r = ComplexMatrix<Scalar>::Zero(k, k);
  ComplexVector<Scalar> row(k);
  for (Index t = 0; t < m; ++t) {
    row = a.row(t).transpose();
    for (Index i = 0; i < k; ++i) {
      const auto [d, coeffs] = boundary_cell_update(r(i, i).real(), row(i));
      r(i, i) = Complex<Scalar>(d, 0);
      for (Index j = i + 1; j < k; ++j) {
        const auto [rn, w] = internal_cell_update(r(i, j), row(j), coeffs);
        r(i, j) = rn;
        row(j) = w;
      }
    }
  }
  return RFactor<Scalar>(std::move(r), m < k);
}

template <typename Scalar>
RFactor<Scalar> givens_r(const CsMatrix<Scalar>& a) {
  return givens_r(a.matrix());
}

template <typename Scalar = double>
struct SystolicQrResult {
  RFactor<Scalar> r;
  SystolicTrace<Scalar> trace;
};

/// Cycle-level simulation of the triangular QR array: matrix rows stream in
/// at the column tops, rotation coefficients ripple right with one cell
/// latency per hop, annihilated remainders flow down. Columns beyond the
/// enabled prefix never fire. The stored cell values reproduce givens_r
/// exactly (identical per-cell operation order).
template <typename Derived>
SystolicQrResult<typename Eigen::NumTraits<typename Derived::Scalar>::Real> systolic_qr(
    const Eigen::MatrixBase<Derived>& a, const SystolicConfig& config) {
  using Scalar = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  using C = Complex<Scalar>;
  config.validate();
  const Index k = config.active_order();
  const Index m = a.rows();
  if (a.cols() != k)
    throw DimensionError("systolic_qr: active column count must equal the matrix width");
  if (m < 1) throw DimensionError("systolic_qr: matrix must have rows");

  struct ValueToken {
    C value;
    Index at;
  };
  struct CoeffToken {
    RotationCoeffs<Scalar> coeffs;
    Index at;
  };
  const auto id = [k](Index i, Index j) { return static_cast<std::size_t>(i * k + j); };
  std::vector<std::deque<ValueToken>> x_queue(static_cast<std::size_t>(k * k));
  std::vector<std::deque<CoeffToken>> coeff_queue(static_cast<std::size_t>(k * k));
  ComplexMatrix<Scalar> cell = ComplexMatrix<Scalar>::Zero(k, k);

  Index pending = 0;
  for (Index j = 0; j < k; ++j)
    for (Index t = 0; t < m; ++t) {
      x_queue[id(0, j)].push_back({C(a(t, j)), 0});
      ++pending;
    }

  SystolicTrace<Scalar> trace;
  trace.active_boundary_cells = k;
  trace.active_internal_cells = k * (k - 1) / 2;
  Index done_at = 0;
  const Index guard =
      (m + 2 * k + 2) * std::max(config.latency.boundary, config.latency.internal) * 4 + 16;

  for (Index cycle = 0; pending > 0; ++cycle) {
    if (cycle > guard) throw Error("systolic_qr: schedule failed to drain");
    for (Index i = 0; i < k; ++i) {
      for (Index j = i; j < k; ++j) {
        auto& xq = x_queue[id(i, j)];
        if (xq.empty() || xq.front().at > cycle) continue;
        if (i == j) {
          const C x = xq.front().value;
          xq.pop_front();
          --pending;
          const auto [d, coeffs] = boundary_cell_update(cell(i, i).real(), x);
          cell(i, i) = C(d, 0);
          const Index ready = cycle + config.latency.boundary;
          if (j + 1 < k) {
            coeff_queue[id(i, j + 1)].push_back({coeffs, ready});
            ++pending;
          }
          done_at = std::max(done_at, ready);
          if (config.record_events)
            trace.events.push_back({cycle, i, j, CellKind::kBoundary,
                                    {x},
                                    {C(coeffs.c, 0), coeffs.s},
                                    cell(i, i)});
        } else {
          auto& cq = coeff_queue[id(i, j)];
          if (cq.empty() || cq.front().at > cycle) continue;
          const C x = xq.front().value;
          const RotationCoeffs<Scalar> coeffs = cq.front().coeffs;
          xq.pop_front();
          cq.pop_front();
          pending -= 2;
          const auto [rn, w] = internal_cell_update(cell(i, j), x, coeffs);
          cell(i, j) = rn;
          const Index ready = cycle + config.latency.internal;
          if (j + 1 < k) {
            coeff_queue[id(i, j + 1)].push_back({coeffs, ready});
            ++pending;
          }
          x_queue[id(i + 1, j)].push_back({w, ready});
          ++pending;
          done_at = std::max(done_at, ready);
          if (config.record_events)
            trace.events.push_back({cycle, i, j, CellKind::kInternal,
                                    {x, C(coeffs.c, 0), coeffs.s},
                                    {w},
                                    rn});
        }
      }
    }
  }
  trace.cycles = done_at;
  return {RFactor<Scalar>(std::move(cell), m < k), std::move(trace)};
}

template <typename Scalar>
SystolicQrResult<Scalar> systolic_qr(const CsMatrix<Scalar>& a, const SystolicConfig& config) {
  return systolic_qr(a.matrix(), config);
}

}  // namespace csonepass
