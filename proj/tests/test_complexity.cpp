#include <doctest.h>

#include <cstdint>
#include <random>

#include "csonepass/complexity.hpp"
#include "csonepass/errors.hpp"

using namespace csonepass;

namespace {

// independent evaluation: expanded monomials accumulated in 128-bit arithmetic
__int128 qfree_add_expanded(__int128 k, __int128 m) {
  return 2 * k * k * k + 2 * k * k + 4 * k * m - 4 * k;
}
__int128 qfree_mul_expanded(__int128 k, __int128 m) {
  return 4 * k * k * k + 4 * k * m + 4 * k * k;
}
__int128 direct_add_expanded(__int128 k, __int128 m) {
  return 4 * m * k * k - 2 * k * k + 4 * k * m - 2 * k;
}
__int128 direct_mul_expanded(__int128 k, __int128 m) {
  return 4 * m * k * k + 4 * m * k;
}

}  // namespace

TEST_CASE("flops_qfree: worked example and small cases") {
  CHECK(flops_qfree(15, 250) == FlopReport{22140, 29400, 0});
  CHECK(flops_qfree(1, 1) == FlopReport{4, 12, 0});
}

TEST_CASE("flops_direct: worked example and small cases") {
  CHECK(flops_direct(15, 250) == FlopReport{239520, 240000, 225});
  CHECK(flops_direct(1, 1) == FlopReport{4, 8, 1});
}

TEST_CASE("flops_qfree additions grow with M") {
  for (std::int64_t k = 1; k <= 6; ++k) {
    std::int64_t prev = -1;
    for (std::int64_t m = 1; m <= 40; ++m) {
      const auto r = flops_qfree(k, m);
      CHECK(r.additions > prev);
      prev = r.additions;
    }
  }
}

TEST_CASE("the Q-free form needs far fewer additions than the direct form") {
  for (std::int64_t k = 2; k <= 24; ++k)
    for (std::int64_t m = 2 * k; m <= 2 * k + 60; m += 7) {
      CHECK(flops_qfree(k, m).additions < flops_direct(k, m).additions);
    }
  // the worked example gap is better than tenfold
  CHECK(flops_direct(15, 250).additions > 10 * flops_qfree(15, 250).additions);
}

TEST_CASE("closed forms match an independent 128-bit expansion up to 1e4") {
  std::mt19937_64 gen(5150);
  std::uniform_int_distribution<std::int64_t> dist(1, 10000);
  for (int it = 0; it < 2000; ++it) {
    const std::int64_t k = dist(gen);
    const std::int64_t m = dist(gen);
    const auto qfree = flops_qfree(k, m);
    CHECK(static_cast<__int128>(qfree.additions) == qfree_add_expanded(k, m));
    CHECK(static_cast<__int128>(qfree.multiplications) == qfree_mul_expanded(k, m));
    const auto direct = flops_direct(k, m);
    CHECK(static_cast<__int128>(direct.additions) == direct_add_expanded(k, m));
    CHECK(static_cast<__int128>(direct.multiplications) == direct_mul_expanded(k, m));
    CHECK(direct.extra == k * k);
  }
  CHECK(flops_qfree(10000, 10000) ==
        FlopReport{static_cast<std::int64_t>(qfree_add_expanded(10000, 10000)),
                   static_cast<std::int64_t>(qfree_mul_expanded(10000, 10000)), 0});
}

TEST_CASE("flops_qr: printed-formula evaluation") {
  CHECK(flops_qr(2, 1) == QrFlops{1, 4});
  CHECK(flops_qr(250, 15) == QrFlops{52875, 1245500});
  CHECK(flops_qr(3, 1).q_flops_avoided == 10);  // 32/3 truncated
  for (std::int64_t n = 1; n <= 12; ++n)
    for (std::int64_t m = n + 1; m <= n + 20; ++m) CHECK(flops_qr(m, n).q_flops_avoided > 0);
  CHECK_THROWS_AS(flops_qr(5, 5), RangeError);
  CHECK_THROWS_AS(flops_qr(4, 5), RangeError);
}

TEST_CASE("cycle_report: printed formulas at the worked example") {
  const auto r = cycle_report(15, 250);
  CHECK(r.threshold_block == 811);
  CHECK(r.r_block == 1882);
  CHECK(r.inversion_block == 506);
  CHECK(r.comparator == 8);
  CHECK(r.solver_block == 3975);
}

TEST_CASE("ceil_log2 edge cases") {
  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(2) == 1);
  CHECK(ceil_log2(3) == 2);
  CHECK(ceil_log2(256) == 8);
  CHECK(ceil_log2(257) == 9);
  CHECK_THROWS_AS(ceil_log2(0), RangeError);
}

TEST_CASE("per-step tally reproduces the closed form everywhere") {
  for (std::int64_t k = 1; k <= 40; ++k)
    for (std::int64_t m = 1; m <= 80; m += 3) CHECK(qfree_solve_tally(k, m) == flops_qfree(k, m));
}

TEST_CASE("complex product cost model") {
  CHECK(complex_product_cost(1, 1, 1) == FlopReport{2, 4, 0});
  CHECK(complex_product_cost(3, 5, 2) == FlopReport{4 * 3 * 2 * 5 - 2 * 3 * 2, 4 * 3 * 2 * 5, 0});
  CHECK_THROWS_AS(complex_product_cost(0, 1, 1), RangeError);
}

TEST_CASE("range validation") {
  CHECK_THROWS_AS(flops_qfree(0, 5), RangeError);
  CHECK_THROWS_AS(flops_direct(5, 0), RangeError);
  CHECK_THROWS_AS(cycle_report(0, 0), RangeError);
}
