// Partial random Fourier (CS) matrix: rows pick sample positions n_a,
// columns pick detected support indices k_i.
#pragma once

#include <numbers>
#include <utility>

#include "csonepass/detection.hpp"
#include "csonepass/errors.hpp"
#include "csonepass/signal_model.hpp"
#include "csonepass/types.hpp"

namespace csonepass {

/// M x K matrix with entries e^{+j 2 pi n_a k_i / N}; the synthesis-kernel
/// sign makes y = A x hold exactly for in-support signals.
template <typename Scalar = double>
class CsMatrix {
 public:
  CsMatrix(ComplexMatrix<Scalar> entries, SupportSet support, Index n_total)
      : entries_(std::move(entries)), support_(std::move(support)), n_total_(n_total) {}

  const ComplexMatrix<Scalar>& matrix() const noexcept { return entries_; }
  const SupportSet& support() const noexcept { return support_; }
  Index rows() const noexcept { return entries_.rows(); }
  Index cols() const noexcept { return entries_.cols(); }
  Index n_total() const noexcept { return n_total_; }
  bool underdetermined() const noexcept { return entries_.rows() < entries_.cols(); }

 private:
  ComplexMatrix<Scalar> entries_;
  SupportSet support_;
  Index n_total_;
};

template <typename Scalar = double>
CsMatrix<Scalar> build_cs_matrix(const SamplingPattern& pattern, const SupportSet& support,
                                 Index n_total) {
  if (support.empty()) throw EmptySupportError("build_cs_matrix: support is empty");
  if (pattern.n_total() != n_total || support.n_total() != n_total)
    throw DimensionError("build_cs_matrix: pattern/support N mismatch");
  const Index m = pattern.size();
  const Index k = support.count();
  ComplexMatrix<Scalar> entries(m, k);
  const Scalar step = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(n_total);
  for (Index a = 0; a < m; ++a) {
    const Index pos = pattern.positions()[static_cast<std::size_t>(a)];
    for (Index i = 0; i < k; ++i) {
      const Index freq = support.indices()[static_cast<std::size_t>(i)];
      entries(a, i) = std::polar(Scalar(1), step * Scalar((pos * freq) % n_total));
    }
  }
  return CsMatrix<Scalar>(std::move(entries), support, n_total);
}

}  // namespace csonepass
