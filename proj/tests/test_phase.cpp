#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "ultraflat/generators.hpp"
#include "ultraflat/phase.hpp"

using namespace ultraflat;

namespace {

constexpr Complex I{0.0, 1.0};

// A flattened polynomial is expensive to build; share one across cases.
const UnimodularPolynomial& flat_255() {
  static const UnimodularPolynomial p = [] {
    FlattenerConfig cfg;
    cfg.target_eps = 0.2;
    return flatten(quadratic_phase(255), cfg).polynomial;
  }();
  return p;
}

double max_modulus_dense(const UnimodularPolynomial& p, std::size_t m) {
  const auto s = evaluate_on_grid(p, m);
  double r = 0.0;
  for (const auto& v : s.values) r = std::max(r, std::abs(v));
  return r;
}

double min_modulus_dense(const UnimodularPolynomial& p, std::size_t m) {
  const auto s = evaluate_on_grid(p, m);
  double r = std::numeric_limits<double>::infinity();
  for (const auto& v : s.values) r = std::min(r, std::abs(v));
  return r;
}

}  // namespace

TEST_CASE("modulus profile hand values", "[phase]") {
  const auto r = modulus_profile(evaluate_on_grid(ComplexPolynomial{1.0, 1.0}, 4));
  CHECK(r[0] == Catch::Approx(2.0));
  CHECK(r[1] == Catch::Approx(std::sqrt(2.0)));
  CHECK(r[2] == Catch::Approx(0.0).margin(1e-15));
  CHECK(r[3] == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("angular speed of 1 + z is one half away from t = pi", "[phase]") {
  const auto p = make_unimodular({1.0, 1.0});
  const auto speed = phase_derivative(p, 33);
  for (double s : speed) CHECK(s == Catch::Approx(0.5).margin(1e-12));
  CHECK_THROWS_AS(phase_derivative(p, 32), NearZeroModulus);
  try {
    phase_derivative(p, 32);
  } catch (const NearZeroModulus& e) {
    CHECK(e.index() == 16);
    CHECK(e.t() == Catch::Approx(std::numbers::pi));
  }
}

TEST_CASE("unwrapped phase", "[phase]") {
  const std::size_t m = 33;
  const auto p = make_unimodular({1.0, 1.0});
  const auto s = evaluate_on_grid(p, m);
  const auto alpha = unwrap_phase(s, 1);
  for (std::size_t j = 0; j < m; ++j) {
    const double t = grid_point(j, m);
    if (t < std::numbers::pi) CHECK(alpha[j] == Catch::Approx(t / 2).margin(1e-12));
  }

  const double theta = 0.7;
  const auto c = make_unimodular({std::polar(1.0, theta)});
  const auto cs = evaluate_on_grid(c, 8);
  for (double a : unwrap_phase(cs, 0)) CHECK(a == Catch::Approx(theta));
}

TEST_CASE("total phase increment is an integer multiple of 2 pi",
          "[phase][property]") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = random_unimodular(40, seed);
    const auto s = evaluate_on_grid(p, 4096);
    const auto alpha = unwrap_phase(s, 40);
    const double turns = total_phase_increment(s, alpha) / kTwoPi;
    CHECK(std::abs(turns - std::round(turns)) < 1e-9);
  }
}

TEST_CASE("angular speed matches central differences of the phase",
          "[phase][oracle]") {
  const auto p = make_unimodular({1.0, 1.0, 1.0, 1.0});
  const std::size_t m = 16 * 4 + 1;  // odd, avoids the zeros at multiples of pi/2
  const auto speed = phase_derivative(p, m);
  const double h = 1e-5;
  for (std::size_t j = 0; j < m; ++j) {
    const double t = grid_point(j, m);
    const Complex a = oracle::horner(p.coeffs(), t + h);
    const Complex b = oracle::horner(p.coeffs(), t - h);
    const double fd = std::arg(a / b) / (2 * h);
    CHECK(speed[j] == Catch::Approx(fd).margin(1e-4));
  }

  // A fine grid keeps the O(h^2) stencil error well below the tolerance.
  const auto& q = flat_255();
  const std::size_t mq = std::size_t{1} << 16;
  const auto alpha = unwrap_phase(evaluate_on_grid(q, mq), q.degree());
  const auto sq = phase_derivative(q, mq);
  const double hq = kTwoPi / static_cast<double>(mq);
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < mq; ++j) {
    worst = std::max(worst, std::abs((alpha[j + 1] - alpha[j - 1]) / (2 * hq) - sq[j]));
  }
  CHECK(worst <= 1e-3 * static_cast<double>(q.degree()));
}

TEST_CASE("conjugate speed identity", "[phase]") {
  CHECK(conjugate_speed_identity(make_unimodular({1.0, 1.0}), 33) < 1e-12);
  CHECK(conjugate_speed_identity(make_unimodular({1.0, I}), 33) < 1e-10);
  const auto& q = flat_255();
  CHECK(conjugate_speed_identity(q, default_grid_size(255)) < 1e-8);
}

TEST_CASE("sine beta identity and beta derivative", "[phase]") {
  CHECK(sine_beta_identity(make_unimodular({1.0, I}), 65) < 1e-10);
  const auto& q = flat_255();
  CHECK(sine_beta_identity(q, default_grid_size(255)) < 1e-8 * 16.0);
  const std::size_t m = std::size_t{1} << 16;

  // beta' = alpha' - n/2, compared against central differences of beta.
  const auto beta = beta_profile(q, m);
  const auto speed = phase_derivative(q, m);
  const double h = kTwoPi / static_cast<double>(m);
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < m; ++j) {
    const double fd = (beta[j + 1] - beta[j - 1]) / (2 * h);
    worst = std::max(worst, std::abs(fd - (speed[j] - 127.5)));
  }
  CHECK(worst <= 1e-3 * 255.0);
}

TEST_CASE("self conjugate-reciprocal polynomials have sin beta = 0", "[phase]") {
  // e^{-it}(1 + z + z^2) = 1 + 2 cos t vanishes only at t = 2 pi / 3, 4 pi / 3.
  const auto p = make_unimodular({1.0, 1.0, 1.0});
  REQUIRE(conjugate_reciprocal(p) == p);
  const std::size_t m = 100;
  const auto beta = beta_profile(p, m);
  for (double b : beta) CHECK(std::abs(std::sin(b)) < 1e-9);
  CHECK(sine_beta_identity(p, m) < 1e-9);
}

TEST_CASE("angular speed distribution", "[phase]") {
  const auto& q = flat_255();
  const std::size_t m = default_grid_size(255);
  // Direct count of grid points with 0 <= alpha' <= n x.
  const auto flat_speed = phase_derivative(q, m);
  const std::vector<double> probes{0.0, 0.5, 1.0};
  const auto direct = angular_speed_distribution(q, m, probes);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto count = std::count_if(flat_speed.begin(), flat_speed.end(),
                                     [&](double s) { return s >= 0.0 && s <= 255.0 * probes[i]; });
    CHECK(direct.measure[i] ==
          Catch::Approx(kTwoPi * static_cast<double>(count) / static_cast<double>(m)));
  }

  const auto rep = angular_speed_distribution(q, m);
  REQUIRE(rep.xs.size() == 201);
  CHECK(std::is_sorted(rep.measure.begin(), rep.measure.end()));
  CHECK(rep.measure.front() >= 0.0);
  CHECK(rep.measure.back() <= kTwoPi + 1e-12);

  // Exactly uniform speed n t / (2 pi).
  const std::size_t n = 100, grid = 4096;
  std::vector<double> speed(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    speed[j] = static_cast<double>(n) * grid_point(j, grid) / kTwoPi;
  }
  const auto uni = angular_speed_distribution(speed, n, default_probe_points());
  CHECK(uni.sup_deviation <= kTwoPi / grid + 1e-12);
}

TEST_CASE("flatness report hand cases", "[phase]") {
  const auto c = make_unimodular({std::polar(1.0, 0.4)});
  CHECK(flatness_report(c).eps == 0.0);
  const auto one_plus_z = make_unimodular({1.0, 1.0});
  CHECK(flatness_report(one_plus_z, 32).eps >= 1.0);
  CHECK(flatness_report(one_plus_z, 32).eps_grid == Catch::Approx(1.0));
}

TEST_CASE("certified flatness bounds the modulus between grid points",
          "[phase][oracle]") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto p = random_unimodular(60, seed);
    const auto rep = flatness_report(p);
    CHECK(rep.max_modulus_bound >= max_modulus_dense(p, 1 << 16));
    CHECK(rep.min_modulus_bound <= min_modulus_dense(p, 1 << 16));
  }
  const auto& q = flat_255();
  const auto rep = flatness_report(q);
  const double root = std::sqrt(256.0);
  const double dense_eps = std::max(max_modulus_dense(q, 1 << 18) / root - 1.0,
                                    1.0 - min_modulus_dense(q, 1 << 18) / root);
  CHECK(rep.eps >= dense_eps);
  CHECK(rep.slack < 0.01);
}

TEST_CASE("certified flatness is stable under grid refinement", "[phase][property]") {
  const auto& q = flat_255();
  for (std::size_t m : {4096u, 8192u}) {
    const auto coarse = flatness_report(q, m);
    const auto fine = flatness_report(q, 2 * m);
    CHECK(fine.eps <= coarse.eps + coarse.slack);
  }
  const auto base = quadratic_phase(1023);
  const auto a = flatness_report(base, 16 * 1024);
  const auto b = flatness_report(base, 32 * 1024);
  CHECK(std::abs(a.eps - b.eps) <= 1e-3);
}

TEST_CASE("phase profile diagnostics", "[phase]") {
  const auto& q = flat_255();
  const auto prof = phase_profile(q, default_grid_size(255));
  CHECK(prof.R.size() == prof.grid_size);
  CHECK(prof.min_modulus > 0.5 * 16.0);
  const auto [lo, hi] = std::minmax_element(prof.alpha_prime.begin(), prof.alpha_prime.end());
  CHECK(prof.speed_range.first == *lo);
  CHECK(prof.speed_range.second == *hi);
  // The mean speed is the number of zeros inside the disk.
  double mean = 0.0;
  for (double s : prof.alpha_prime) mean += s;
  mean /= static_cast<double>(prof.grid_size);
  CHECK(std::abs(mean - std::round(mean)) < 1e-6);
  CHECK(std::isfinite(prof.second_deriv_max_scaled));
  CHECK(std::isfinite(prof.r_prime_max_scaled));
  for (std::size_t j = 1; j < prof.grid_size; ++j) {
    CHECK(std::abs(prof.alpha[j] - prof.alpha[j - 1]) < std::numbers::pi);
  }
}
