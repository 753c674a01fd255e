// Amplitude least squares in the Q-free form X = Rinv Rinv^* (A^* y), its
// normal-equations counterpart, and the one-pass reconstruction pipeline.
#pragma once

#include <utility>

#include "csonepass/complexity.hpp"
#include "csonepass/cs_matrix.hpp"
#include "csonepass/detection.hpp"
#include "csonepass/errors.hpp"
#include "csonepass/givens_qr.hpp"
#include "csonepass/signal_model.hpp"
#include "csonepass/tri_inv.hpp"
#include "csonepass/types.hpp"

namespace csonepass {

template <typename Scalar = double>
struct AmplitudeSolution {
  SupportSet support;
  ComplexVector<Scalar> amplitudes;
};

/// Everything the pipeline produced on the way to the amplitudes.
template <typename Scalar = double>
struct ReconstructionReport {
  SupportSet detected_support;
  ComplexVector<Scalar> amplitudes;
  Spectrum<Scalar> initial_spectrum;
  Scalar sigma_sq{0};
  Scalar threshold_used{0};
  Scalar residual_norm{0};
  Scalar probability{0};
  ThresholdMode threshold_mode{ThresholdMode::kExact};
  bool empty_support{false};
  Index n_total{0};
  Index m{0};
};

template <typename Scalar = double>
struct PipelineResult {
  ReconstructionReport<Scalar> report;
  TimeSignal<Scalar> reconstruction;
};

/// X = (A^*A)^{-1}(A^* y) via the Hermitian Gram matrix. Oracle route for
/// solve_qfree.
template <typename Scalar>
ComplexVector<Scalar> solve_normal_equations(const ComplexMatrix<Scalar>& a,
                                             const ComplexVector<Scalar>& y) {
  if (a.rows() != y.size())
    throw DimensionError("solve_normal_equations: row count must match measurement count");
  if (a.cols() < 1) throw DimensionError("solve_normal_equations: no columns");
  const ComplexMatrix<Scalar> gram = a.adjoint() * a;
  Eigen::FullPivLU<ComplexMatrix<Scalar>> lu(gram);
  if (!lu.isInvertible())
    throw SingularMatrixError("solve_normal_equations: Gram matrix is singular");
  return lu.solve((a.adjoint() * y).eval());
}

/// X = Rinv (Rinv^* (A^* y)) with R from Givens rotations; right-to-left
/// matrix-vector products, Q never formed. Rinv^* is the conjugate
/// transpose of Rinv, not a second inversion.
template <typename Scalar>
ComplexVector<Scalar> solve_qfree_vector(const ComplexMatrix<Scalar>& a,
                                         const ComplexVector<Scalar>& y) {
  if (a.rows() != y.size())
    throw DimensionError("solve_qfree_vector: row count must match measurement count");
  const RFactor<Scalar> r = givens_r(a);
  const InverseFactor<Scalar> rinv = invert_upper_triangular(r);
  const ComplexVector<Scalar> correlation = a.adjoint() * y;
  const ComplexVector<Scalar> half = rinv.matrix().adjoint() * correlation;
  return rinv.matrix() * half;
}

template <typename Scalar>
AmplitudeSolution<Scalar> solve_direct(const CsMatrix<Scalar>& a,
                                       const MeasurementSet<Scalar>& y) {
  return {a.support(), solve_normal_equations(a.matrix(), y.values())};
}

template <typename Scalar>
AmplitudeSolution<Scalar> solve_qfree(const CsMatrix<Scalar>& a,
                                      const MeasurementSet<Scalar>& y) {
  return {a.support(), solve_qfree_vector(a.matrix(), y.values())};
}

/// Operation tally of the Q-free solve for this instance's dimensions,
/// under the complex-product cost model of the complexity module.
template <typename Scalar>
FlopReport qfree_op_tally(const CsMatrix<Scalar>& a) {
  return qfree_solve_tally(a.cols(), a.rows());
}

/// Recovered time signal: samples[n] = sum_i amplitudes[i] e^{+j 2 pi k_i n / N}.
template <typename Scalar>
TimeSignal<Scalar> reconstruct_time(const AmplitudeSolution<Scalar>& sol, Index n_total) {
  if (sol.support.n_total() != n_total)
    throw DimensionError("reconstruct_time: support defined for a different N");
  if (sol.amplitudes.size() != sol.support.count())
    throw DimensionError("reconstruct_time: amplitude count must match support");
  ComplexVector<Scalar> samples = ComplexVector<Scalar>::Zero(n_total);
  const Scalar step = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(n_total);
  for (Index i = 0; i < sol.support.count(); ++i) {
    const Index freq = sol.support.indices()[static_cast<std::size_t>(i)];
    for (Index t = 0; t < n_total; ++t)
      samples[t] += sol.amplitudes[i] * std::polar(Scalar(1), step * Scalar((freq * t) % n_total));
  }
  return {std::move(samples)};
}

/// One pass: initial transform -> noise variance -> threshold -> support ->
/// CS matrix -> Q-free solve -> time-domain synthesis. Detection and solve
/// each run exactly once; an empty support is reported, not thrown.
template <typename Scalar>
PipelineResult<Scalar> run_pipeline(const MeasurementSet<Scalar>& meas, Index n_total,
                                    const ThresholdParams<Scalar>& params) {
  Spectrum<Scalar> spectrum = initial_transform(meas, n_total);
  const Scalar sigma_sq = noise_variance(meas, n_total);
  const Scalar threshold = compute_threshold(sigma_sq, n_total, params);
  SupportSet support = detect_support(spectrum, threshold);

  ReconstructionReport<Scalar> report{std::move(support),
                                      ComplexVector<Scalar>(),
                                      std::move(spectrum),
                                      sigma_sq,
                                      threshold,
                                      Scalar(0),
                                      params.probability,
                                      params.mode,
                                      false,
                                      n_total,
                                      meas.size()};

  if (report.detected_support.empty()) {
    report.empty_support = true;
    report.residual_norm = meas.values().norm();
    return {std::move(report), TimeSignal<Scalar>{ComplexVector<Scalar>::Zero(n_total)}};
  }

  const CsMatrix<Scalar> a = build_cs_matrix<Scalar>(meas.pattern(), report.detected_support, n_total);
  AmplitudeSolution<Scalar> sol = solve_qfree(a, meas);
  report.residual_norm = (a.matrix() * sol.amplitudes - meas.values()).norm();
  report.amplitudes = sol.amplitudes;
  TimeSignal<Scalar> recon = reconstruct_time(sol, n_total);
  return {std::move(report), std::move(recon)};
}

}  // namespace csonepass
