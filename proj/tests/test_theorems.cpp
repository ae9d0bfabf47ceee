#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "ultraflat/generators.hpp"
#include "ultraflat/theorems.hpp"

using namespace ultraflat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr Complex I{0.0, 1.0};

UnimodularPolynomial self_reciprocal(std::size_t n) {
  std::vector<Complex> c(n + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    c[k] = std::polar(1.0, 0.37 * static_cast<double>(k * k));
    c[n - k] = std::conj(c[k]);
  }
  if (n % 2 == 0) c[n / 2] = 1.0;
  return make_unimodular(c);
}

const std::vector<SweepInput>& small_sweep() {
  static const std::vector<SweepInput> s = [] {
    FlattenerConfig cfg;
    cfg.target_eps = 0.2;
    const std::vector<std::size_t> ns{63, 127, 255};
    return to_sweep_inputs(flat_sweep(ns, cfg));
  }();
  return s;
}

}  // namespace

TEST_CASE("theorem ids round trip", "[theorems]") {
  for (TheoremId id : kAllTheorems) CHECK(parse_theorem_id(to_string(id)) == id);
  CHECK_FALSE(parse_theorem_id("T99").has_value());
}

TEST_CASE("T21 right-hand sides", "[theorems]") {
  const auto p = random_unimodular(40, 3);
  CHECK_THAT(verify_T21(p, 2.0, 0.0).rhs, WithinRel(80.0, 1e-12));
  CHECK_THAT(verify_T21(p, 4.0, 0.0).rhs, WithinRel(6.0 * 1600.0, 1e-12));
}

TEST_CASE("T21 at q = 2 agrees with the coefficient sum", "[theorems][property]") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto p = random_unimodular(100, seed);
    const auto t21 = verify_T21(p, 2.0, 0.0);
    const auto t22 = verify_T22(p, 0.0);
    CHECK_THAT(t21.lhs, WithinRel(t22.lhs, 1e-8));
    CHECK_THAT(t21.lhs, WithinRel(*t22.twin, 1e-8));
  }
}

TEST_CASE("T22 and T23 hand values", "[theorems]") {
  const auto p = make_unimodular({1.0, I});
  const auto t22 = verify_T22(p, 0.0);
  CHECK_THAT(t22.lhs, WithinAbs(4.0, 1e-15));
  CHECK_THAT(t22.rhs, WithinAbs(2.0, 1e-15));
  CHECK(*t22.twin_defect <= 1e-12);
  const auto t23 = verify_T23(p, 0.0);
  CHECK_THAT(t23.lhs, WithinAbs(2.0, 1e-15));
}

TEST_CASE("Parseval bridges hold for arbitrary unimodular polynomials",
          "[theorems][property]") {
  for (std::size_t n : {7u, 64u, 255u}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto p = random_unimodular(n, seed);
      CHECK(*verify_T22(p, 0.0).twin_defect <= 1e-8);
      CHECK(*verify_T23(p, 0.0).twin_defect <= 1e-8);
    }
  }
}

TEST_CASE("self conjugate-reciprocal inputs are degenerate", "[theorems]") {
  const auto p = self_reciprocal(20);
  REQUIRE(conjugate_reciprocal(p) == p);
  CHECK(verify_T21(p, 2.0, 0.0).lhs == 0.0);
  CHECK(verify_T21(p, 2.0, 0.0).degenerate);
  CHECK(verify_T21(p, 2.0, 0.0).ratio == 0.0);
  CHECK(verify_T22(p, 0.0).degenerate);
  CHECK(verify_T23(p, 0.0).degenerate);
  CHECK(verify_T24(p, 2.0, 0.0).degenerate);
  CHECK(verify_T14(p, 0.0).degenerate);
  // sum a_k a_{n-k} = sum |a_k|^2 = n + 1.
  CHECK_THAT(verify_T25(p, 0.0).lhs, WithinRel(21.0, 1e-12));
  CHECK_FALSE(verify_T25(p, 0.0).degenerate);
}

TEST_CASE("T24 right-hand side and finite-difference accuracy", "[theorems][oracle]") {
  const auto p = random_unimodular(50, 4);
  const auto v = verify_T24(p, 2.0, 0.0);
  CHECK_THAT(v.rhs, WithinRel(50.0 * 50.0 * 50.0 / 6.0, 1e-12));
  // Reference: d/dt |F| = Re(conj(F) F') / |F| from direct evaluation.
  const auto diff = subtract(p, conjugate_reciprocal(p));
  const std::size_t m = 20000;
  double ref = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double t = grid_point(j, m) + 1e-7;
    const Complex f = oracle::horner(diff.coeffs(), t);
    const Complex fp = oracle::horner_dt(diff.coeffs(), t);
    const double d = (std::conj(f) * fp).real() / std::abs(f);
    ref += d * d;
  }
  ref /= static_cast<double>(m);
  CHECK_THAT(v.lhs, WithinRel(ref, 1e-3));
  CHECK(v.excluded_measure == 0.0);
}

TEST_CASE("T25 and T26 hand values", "[theorems]") {
  const auto p = make_unimodular({1.0, I});
  const auto t25 = verify_T25(p, 0.0);
  CHECK_THAT(t25.ratio, WithinAbs(2.0, 1e-15));
  const auto t26 = verify_T26(p, 0.0);
  CHECK_THAT(t26.lhs, WithinAbs(1.0, 1e-15));
  CHECK_THAT(t26.rhs, WithinAbs(1.0, 1e-15));
}

TEST_CASE("T27 real part at q = 2 matches the coefficient identity", "[theorems][oracle]") {
  // (Re P)^2 = (|P|^2 + Re P^2) / 2 and the mean of P^2 is its constant
  // coefficient a_0^2, so mean (Re P)^2 = (n+1)/2 + Re(a_0^2)/2.
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const std::size_t n = 90;
    const auto p = random_unimodular(n, seed);
    const auto v = verify_T27(p, 2.0, 0.0);
    const double expect = 0.5 * static_cast<double>(n + 1) + 0.5 * (p[0] * p[0]).real();
    CHECK_THAT(v.value.lhs, WithinRel(expect, 1e-8));
    CHECK_THAT(v.value.rhs, WithinRel(0.5 * static_cast<double>(n), 1e-12));
    CHECK_THAT(v.derivative.rhs, WithinRel(std::pow(90.0, 3) / 6.0, 1e-12));
    // Same argument for (Re P)': the constant coefficient of (dP/dt)^2 is 0.
    double ksq = 0.0;
    for (std::size_t k = 1; k <= n; ++k) ksq += static_cast<double>(k * k);
    CHECK_THAT(v.derivative.lhs, WithinRel(0.5 * ksq, 1e-8));
  }
}

TEST_CASE("T14 is dominated by the T23 quadrature", "[theorems][property]") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto p = random_unimodular(80, seed);
    CHECK(verify_T14(p, 0.0).lhs <= *verify_T23(p, 0.0).twin * (1 + 1e-12));
    CHECK_THAT(verify_T14(p, 0.0).rhs, WithinRel(std::pow(80.0, 3) / 3.0, 1e-12));
  }
}

TEST_CASE("synthetic phase family", "[theorems]") {
  const std::size_t n = 64, m = 4096;
  const auto s = synthetic_beta(n, m);
  double smax = 0.0, bmax = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    smax = std::max(smax, std::abs(s.beta_second[j]));
    bmax = std::max(bmax, std::abs(s.beta_prime[j]));
  }
  CHECK_THAT(smax / (64.0 * 64.0), WithinRel(1.0 / (2 * std::numbers::pi * 64.0), 1e-12));
  CHECK_THAT(bmax / 64.0, WithinAbs(0.5, 1e-12));
  // |2 beta'| is uniform on [0, n]: meas{|2 beta'| <= n x} = 2 pi x.
  for (double x : {0.1, 0.25, 0.5, 0.9}) {
    std::size_t count = 0;
    for (double b : s.beta_prime) count += std::abs(2 * b) <= 64.0 * x ? 1 : 0;
    CHECK_THAT(kTwoPi * count / m, WithinAbs(kTwoPi * x, 2 * kTwoPi / m));
  }
  CHECK_THROWS(synthetic_beta(0));
}

TEST_CASE("lemmas on the synthetic family", "[theorems]") {
  CHECK_THAT(verify_L38(1024, 2.0).rhs, WithinAbs(0.5, 1e-12));
  CHECK_THAT(verify_L39(1024, 2.0).rhs, WithinAbs(1.0 / 24.0, 1e-12));
  for (double q : {1.0, 2.0, 4.0}) {
    CHECK(std::abs(verify_L38(1024, q).ratio - 1.0) <= 0.02);
    CHECK(std::abs(verify_L39(1024, q).ratio - 1.0) <= 0.02);
  }
  const auto l37 = verify_L37(1000, 2.0);
  CHECK(l37.ratio <= 1.0);
}

TEST_CASE("median smoothing", "[theorems]") {
  const std::vector<double> x{5, 1, 4, 2, 3};
  const auto y = median_smooth(x);
  CHECK(y[1] == 4.0);
  CHECK(y[2] == 2.0);
  CHECK(y[3] == 3.0);
  const std::vector<double> two{2.0, 1.0};
  CHECK(median_smooth(two) == two);
}

TEST_CASE("sweep verification tables", "[theorems]") {
  const auto& sweep = small_sweep();
  const std::vector<TheoremId> ids{TheoremId::T21, TheoremId::T22};
  const std::vector<double> qs{1.0, 4.0};
  const auto tables = sweep_verify(sweep, ids, qs);
  REQUIRE(tables.size() == 3);
  for (const auto& t : tables) {
    REQUIRE(t.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(t.rows[i].id == t.id);
      CHECK(t.rows[i].q == t.q);
      CHECK(t.rows[i].n == sweep[i].n);
      CHECK(t.rows[i].eps_achieved == sweep[i].eps);
    }
  }
  CHECK(sweep_verify(sweep, std::vector<TheoremId>{}, qs).empty());
  const std::vector<SweepInput> one(sweep.begin(), sweep.begin() + 1);
  const auto single = sweep_verify(one, ids, qs);
  for (const auto& t : single) CHECK(t.rows.size() == 1);
  CHECK_THROWS(sweep_verify(std::vector<SweepInput>{}, ids, qs));
}

TEST_CASE("sweep verification matches single verdicts", "[theorems][property]") {
  const auto& sweep = small_sweep();
  const std::vector<TheoremId> ids(kAllTheorems.begin(), kAllTheorems.end());
  const std::vector<double> qs{2.0};
  const auto tables = sweep_verify(sweep, ids, qs);
  for (const auto& t : tables) {
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      const auto v = verify(t.id, sweep[i].polynomial, t.q, sweep[i].eps);
      CHECK(v.lhs == t.rows[i].lhs);
      CHECK(v.ratio == t.rows[i].ratio);
    }
  }
}
