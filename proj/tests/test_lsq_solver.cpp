#include <doctest.h>

#include <cmath>
#include <vector>

#include "csonepass/complexity.hpp"
#include "csonepass/errors.hpp"
#include "csonepass/lsq_solver.hpp"
#include "test_util.hpp"

using namespace csonepass;
using test_util::Complexd;

namespace {

struct Instance {
  SparseSignal<double> spec;
  ComplexVector<double> amplitudes;
  CsMatrix<double> matrix;
  MeasurementSet<double> meas;
};

Instance make_instance(Index n, Index k, Index m, std::uint64_t seed, bool unit_amps = false) {
  auto gen = test_util::rng(seed);
  const auto freqs = test_util::random_support(n, k, seed + 1);
  std::vector<SignalComponent<double>> components;
  ComplexVector<double> amps(k);
  for (Index i = 0; i < k; ++i) {
    amps[i] = unit_amps ? Complexd(1.0, 0.0) : test_util::random_complex(gen);
    components.push_back({freqs[static_cast<std::size_t>(i)], amps[i]});
  }
  SparseSignal<double> spec(n, components);
  const auto pattern = draw_pattern(n, m, seed + 2);
  auto meas = sample(synthesize(spec), pattern);
  auto a = build_cs_matrix<double>(pattern, SupportSet::from_indices(n, freqs), n);
  return {std::move(spec), std::move(amps), std::move(a), std::move(meas)};
}

}  // namespace

TEST_CASE("solve_normal_equations: identity system returns the data") {
  const ComplexMatrix<double> eye = ComplexMatrix<double>::Identity(2, 2);
  ComplexVector<double> y(2);
  y << Complexd(2, 0), Complexd(3, 0);
  const auto x = solve_normal_equations(eye, y);
  CHECK(std::abs(x[0] - Complexd(2, 0)) <= 1e-14);
  CHECK(std::abs(x[1] - Complexd(3, 0)) <= 1e-14);
}

TEST_CASE("solve_qfree_vector: identity system returns the data") {
  const ComplexMatrix<double> eye = ComplexMatrix<double>::Identity(3, 3);
  const auto y = test_util::random_complex_vector(3, 12);
  const auto x = solve_qfree_vector(eye, y);
  CHECK((x - y).norm() <= 1e-14);
}

TEST_CASE("solve_direct: full sampling recovers exact amplitudes") {
  const auto inst = make_instance(16, 3, 16, 21);
  const auto sol = solve_direct(inst.matrix, inst.meas);
  CHECK((sol.amplitudes - inst.amplitudes).norm() <= 1e-12 * inst.amplitudes.norm());
}

TEST_CASE("solve_direct and solve_qfree: noiseless undersampled recovery") {
  const auto inst = make_instance(64, 3, 32, 33);
  const auto direct = solve_direct(inst.matrix, inst.meas);
  const auto qfree = solve_qfree(inst.matrix, inst.meas);
  CHECK((direct.amplitudes - inst.amplitudes).norm() <= 1e-10 * inst.amplitudes.norm());
  CHECK((qfree.amplitudes - inst.amplitudes).norm() <= 1e-10 * inst.amplitudes.norm());
}

TEST_CASE("solver equivalence on random well-posed instances") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Index n = 16 + Index(seed % 8) * 14;              // <= 128
    const Index k = 1 + Index(seed % 10);                   // <= 10
    const Index m = std::min<Index>(n, 2 * k + Index(seed % 7));
    if (m < 2 * k) continue;
    const auto inst = make_instance(n, k, m, 7000 + seed);
    const auto direct = solve_direct(inst.matrix, inst.meas);
    const auto qfree = solve_qfree(inst.matrix, inst.meas);
    CHECK((direct.amplitudes - qfree.amplitudes).norm() <=
          1e-8 * std::max(1.0, direct.amplitudes.norm()));
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("solve_qfree: noiseless consistency keeps the residual tiny") {
  const auto inst = make_instance(96, 5, 24, 91);
  const auto sol = solve_qfree(inst.matrix, inst.meas);
  const double residual = (inst.matrix.matrix() * sol.amplitudes - inst.meas.values()).norm();
  CHECK(residual <= 1e-9 * inst.meas.values().norm());
}

TEST_CASE("solvers are linear in the measurements") {
  const auto inst = make_instance(48, 4, 16, 55);
  const Complexd alpha(2.0, -1.5);
  const MeasurementSet<double> scaled(inst.meas.pattern(), (alpha * inst.meas.values()).eval());
  const auto direct = solve_direct(inst.matrix, inst.meas);
  const auto direct_scaled = solve_direct(inst.matrix, scaled);
  const auto qfree = solve_qfree(inst.matrix, inst.meas);
  const auto qfree_scaled = solve_qfree(inst.matrix, scaled);
  CHECK((direct_scaled.amplitudes - alpha * direct.amplitudes).norm() <=
        1e-10 * direct_scaled.amplitudes.norm());
  CHECK((qfree_scaled.amplitudes - alpha * qfree.amplitudes).norm() <=
        1e-10 * qfree_scaled.amplitudes.norm());
}

TEST_CASE("singular systems are reported by both solvers") {
  // one measurement, two columns: the Gram matrix is rank one
  const auto pattern = SamplingPattern(8, {3});
  const auto support = SupportSet::from_indices(8, {1, 5});
  const auto a = build_cs_matrix<double>(pattern, support, 8);
  ComplexVector<double> y(1);
  y << Complexd(1, 0);
  const MeasurementSet<double> meas(pattern, y);
  CHECK_THROWS_AS(solve_direct(a, meas), SingularMatrixError);
  CHECK_THROWS_AS(solve_qfree(a, meas), SingularMatrixError);
}

TEST_CASE("qfree operation tally at the worked example size") {
  const auto inst = make_instance(1024, 15, 250, 2025, true);
  const auto tally = qfree_op_tally(inst.matrix);
  CHECK(tally == flops_qfree(15, 250));
  CHECK(tally.additions == 22140);
  CHECK(tally.multiplications == 29400);
  // and the instance itself solves correctly
  const auto direct = solve_direct(inst.matrix, inst.meas);
  const auto qfree = solve_qfree(inst.matrix, inst.meas);
  CHECK((direct.amplitudes - qfree.amplitudes).norm() <= 1e-8 * direct.amplitudes.norm());
}

TEST_CASE("reconstruct_time: empty support synthesizes silence") {
  const AmplitudeSolution<double> sol{SupportSet(8, std::vector<bool>(8, false)),
                                      ComplexVector<double>()};
  const auto x = reconstruct_time(sol, 8);
  CHECK(x.samples.norm() == 0.0);
}

TEST_CASE("reconstruct_time: a single component is one exponential") {
  const AmplitudeSolution<double> sol{SupportSet::from_indices(8, {2}),
                                      ComplexVector<double>::Ones(1)};
  const auto x = reconstruct_time(sol, 8);
  for (Index t = 0; t < 8; ++t) {
    const Complexd expected = std::exp(Complexd(0, 2.0 * M_PI * 2.0 * double(t) / 8.0));
    CHECK(std::abs(x.samples[t] - expected) <= 1e-12);
  }
}

TEST_CASE("reconstruct_time: inverts an exact recovery") {
  const auto inst = make_instance(32, 3, 32, 77);
  const auto sol = solve_qfree(inst.matrix, inst.meas);
  const auto recon = reconstruct_time(sol, 32);
  const auto original = synthesize(inst.spec);
  CHECK((recon.samples - original.samples).norm() <= 1e-10 * original.samples.norm());
  CHECK_THROWS_AS(reconstruct_time(sol, 16), DimensionError);
}

TEST_CASE("run_pipeline: full sampling recovers the signal outright") {
  // sigma^2 = 0 under full sampling, so T = 0 and every bin holding FFT
  // rounding noise is picked up; the solve still returns the exact signal
  const auto inst = make_instance(32, 2, 32, 11, true);
  const auto result = run_pipeline(inst.meas, 32, ThresholdParams<double>{});
  CHECK_FALSE(result.report.empty_support);
  CHECK(result.report.threshold_used == 0.0);
  CHECK(result.report.residual_norm <= 1e-10);
  const auto original = synthesize(inst.spec);
  CHECK((result.reconstruction.samples - original.samples).norm() <=
        1e-10 * original.samples.norm());
  for (const auto& c : inst.spec.components())
    CHECK(result.report.detected_support.mask()[static_cast<std::size_t>(c.freq_index)]);
}

TEST_CASE("run_pipeline: zero measurements yield a flagged empty result") {
  const MeasurementSet<double> meas(draw_pattern(16, 8, 3), ComplexVector<double>::Zero(8));
  const auto result = run_pipeline(meas, 16, ThresholdParams<double>{});
  CHECK(result.report.empty_support);
  CHECK(result.report.sigma_sq == 0.0);
  CHECK(result.report.threshold_used == 0.0);
  CHECK(result.report.detected_support.empty());
  CHECK(result.reconstruction.samples.norm() == 0.0);
  CHECK(result.report.residual_norm == 0.0);
}

TEST_CASE("the whole pipeline instantiates for float scalars") {
  const SparseSignal<float> spec(32, {{3, {1.0f, 0.0f}}, {11, {1.0f, -1.0f}}});
  const auto x = synthesize(spec);
  const auto pattern = draw_pattern(32, 24, 5);
  const auto result = run_pipeline(sample(x, pattern), Index(32), ThresholdParams<float>{});
  REQUIRE_FALSE(result.report.empty_support);
  CHECK(result.report.detected_support.indices() == std::vector<Index>{3, 11});
  CHECK(std::abs(result.report.amplitudes[0] - std::complex<float>(1.0f, 0.0f)) <= 1e-4f);
  CHECK(std::abs(result.report.amplitudes[1] - std::complex<float>(1.0f, -1.0f)) <= 1e-4f);
}

TEST_CASE("run_pipeline Monte Carlo: exact recovery at half sampling") {
  const Index n = 256;
  const Index k = 5;
  const Index m = 128;
  const int trials = 500;
  int successes = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t base = 4321;
    const auto support =
        draw_pattern(n, k, derive_seed(base, 2 * static_cast<std::uint64_t>(trial)));
    std::vector<SignalComponent<double>> components;
    for (Index freq : support.positions()) components.push_back({freq, {1.0, 0.0}});
    const SparseSignal<double> spec(n, components);
    const auto pattern =
        draw_pattern(n, m, derive_seed(base, 2 * static_cast<std::uint64_t>(trial) + 1));
    const auto result =
        run_pipeline(sample(synthesize(spec), pattern), n, ThresholdParams<double>{});
    if (result.report.detected_support.indices() != support.positions()) continue;
    double err = 0.0;
    for (Index i = 0; i < k; ++i)
      err = std::max(err, std::abs(result.report.amplitudes[i] - Complexd(1.0, 0.0)));
    if (err <= 1e-8) ++successes;
  }
  CHECK(successes >= 475);  // 95% of 500
}
