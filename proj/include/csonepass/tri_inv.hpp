// Inversion of the upper-triangular factor, directly (back-substitution) and
// as a systolic array that finishes in 2K-1 unit-latency wavefront steps.
#pragma once

#include <cmath>
#include <deque>
#include <utility>
#include <vector>

#include "csonepass/errors.hpp"
#include "csonepass/givens_qr.hpp"
#include "csonepass/systolic.hpp"
#include "csonepass/types.hpp"

namespace csonepass {

/// Upper-triangular inverse of an RFactor; R * InverseFactor = I.
template <typename Scalar = double>
class InverseFactor {
 public:
  explicit InverseFactor(ComplexMatrix<Scalar> entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
      throw DimensionError("InverseFactor: matrix must be square and non-empty");
    for (Index i = 0; i < entries_.rows(); ++i)
      for (Index j = 0; j < i; ++j)
        if (entries_(i, j) != Complex<Scalar>(0))
          throw InvalidSpecError("InverseFactor: entries below the diagonal must be zero");
  }

  Index order() const noexcept { return entries_.rows(); }
  const ComplexMatrix<Scalar>& matrix() const noexcept { return entries_; }

 private:
  ComplexMatrix<Scalar> entries_;
};

namespace detail {

/// Relative singularity guard: diagonal magnitudes below 1e-12 of the largest
/// one are treated as zero.
template <typename Scalar>
void check_diagonal(const ComplexMatrix<Scalar>& r) {
  Scalar max_diag = 0;
  for (Index i = 0; i < r.rows(); ++i) max_diag = std::max(max_diag, std::abs(r(i, i)));
  const Scalar tol = Scalar(1e-12) * max_diag;
  for (Index i = 0; i < r.rows(); ++i)
    if (std::abs(r(i, i)) <= tol)
      throw SingularMatrixError("triangular factor is singular at the diagonal", i);
}

}  // namespace detail

/// inv(i,i) = 1/r(i,i); inv(i,j) = -(1/r(i,i)) * sum_{k=i+1..j} r(i,k) inv(k,j).
/// The sum accumulates from k = j downward, matching the systolic data flow.
template <typename Scalar>
InverseFactor<Scalar> invert_upper_triangular(const RFactor<Scalar>& r) {
  const Index k = r.order();
  const ComplexMatrix<Scalar>& rm = r.matrix();
  detail::check_diagonal(rm);
  ComplexMatrix<Scalar> inv = ComplexMatrix<Scalar>::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    inv(j, j) = Complex<Scalar>(1) / rm(j, j);
    for (Index i = j - 1; i >= 0; --i) {
      Complex<Scalar> u(0);
      for (Index t = j; t > i; --t) u += rm(i, t) * inv(t, j);
      inv(i, j) = -u / rm(i, i);
    }
  }
  return InverseFactor<Scalar>(std::move(inv));
}

template <typename Scalar = double>
struct SystolicInvResult {
  InverseFactor<Scalar> inverse;
  SystolicTrace<Scalar> trace;
};

/// Fig-style inversion array: one divider cell per row (boundary kind, holds
/// r(i,i)) and one multiply-accumulate cell per strictly-upper entry
/// (internal kind, holds r(i,k)). Inverse elements flow up their column,
/// partial sums flow left along their row; divider i turns an arriving sum u
/// into -u / r(i,i), seeded with the constant -1 for the diagonal element.
/// With unit latencies every divider fires first at step 0 and the last
/// element inv(0, K-1) completes the schedule after exactly 2K-1 steps.
template <typename Scalar>
SystolicInvResult<Scalar> systolic_invert(const RFactor<Scalar>& r, const SystolicConfig& config) {
  using C = Complex<Scalar>;
  config.validate();
  const Index k = config.active_order();
  if (r.order() != k)
    throw DimensionError("systolic_invert: active order must equal the factor order");
  const ComplexMatrix<Scalar>& rm = r.matrix();
  detail::check_diagonal(rm);

  struct Token {
    C value;
    Index at;
  };
  const auto id = [k](Index i, Index j) { return static_cast<std::size_t>(i * k + j); };
  std::vector<std::deque<Token>> divider_in(static_cast<std::size_t>(k));
  std::vector<std::deque<Token>> value_in(static_cast<std::size_t>(k * k));  // inverse elements, from below
  std::vector<std::deque<Token>> sum_in(static_cast<std::size_t>(k * k));    // partial sums, from the right
  std::vector<Index> emitted(static_cast<std::size_t>(k), 0);
  ComplexMatrix<Scalar> inv = ComplexMatrix<Scalar>::Zero(k, k);

  Index pending = 0;
  for (Index i = 0; i < k; ++i) {
    divider_in[static_cast<std::size_t>(i)].push_back({C(-1), 0});
    ++pending;
    for (Index j = i + 1; j < k; ++j) {
      sum_in[id(i, j)].push_back({C(0), 0});
      ++pending;
    }
  }

  SystolicTrace<Scalar> trace;
  trace.active_boundary_cells = k;
  trace.active_internal_cells = k * (k - 1) / 2;
  Index done_at = 0;
  const Index guard =
      (4 * k + 2) * std::max(config.latency.boundary, config.latency.internal) * 4 + 16;

  for (Index cycle = 0; pending > 0; ++cycle) {
    if (cycle > guard) throw Error("systolic_invert: schedule failed to drain");
    for (Index i = 0; i < k; ++i) {
      auto& dq = divider_in[static_cast<std::size_t>(i)];
      if (!dq.empty() && dq.front().at <= cycle) {
        const C a = dq.front().value;
        dq.pop_front();
        --pending;
        const C out = -a / rm(i, i);
        const Index col = i + emitted[static_cast<std::size_t>(i)]++;
        inv(i, col) = out;
        const Index ready = cycle + config.latency.boundary;
        if (i > 0) {
          value_in[id(i - 1, i)].push_back({out, ready});
          ++pending;
        }
        done_at = std::max(done_at, ready);
        if (config.record_events)
          trace.events.push_back({cycle, i, i, CellKind::kBoundary, {a}, {out}, rm(i, i)});
      }
      for (Index j = i + 1; j < k; ++j) {
        auto& vq = value_in[id(i, j)];
        auto& pq = sum_in[id(i, j)];
        if (vq.empty() || vq.front().at > cycle) continue;
        if (pq.empty() || pq.front().at > cycle) continue;
        const C v = vq.front().value;
        const C p = pq.front().value;
        vq.pop_front();
        pq.pop_front();
        pending -= 2;
        const C accumulated = p + rm(i, j) * v;
        const Index ready = cycle + config.latency.internal;
        if (j == i + 1) {
          divider_in[static_cast<std::size_t>(i)].push_back({accumulated, ready});
        } else {
          sum_in[id(i, j - 1)].push_back({accumulated, ready});
        }
        ++pending;
        if (i > 0) {
          value_in[id(i - 1, j)].push_back({v, ready});
          ++pending;
        }
        done_at = std::max(done_at, ready);
        if (config.record_events)
          trace.events.push_back(
              {cycle, i, j, CellKind::kInternal, {v, p}, {accumulated}, rm(i, j)});
      }
    }
  }
  trace.cycles = done_at;
  return {InverseFactor<Scalar>(std::move(inv)), std::move(trace)};
}

}  // namespace csonepass
