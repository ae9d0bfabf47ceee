#pragma once

// Polar decomposition P(e^{it}) = R(t) e^{i alpha(t)} on the circle grid:
// modulus, continuous phase, angular speed, the half phase gap beta against
// the conjugate reciprocal, and certified flatness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "ultraflat/numeric.hpp"
#include "ultraflat/poly_core.hpp"

namespace ultraflat {

// Phase quantities are refused where |P| < kNearZeroCutoff * sqrt(n+1).
inline constexpr double kNearZeroCutoff = 1e-9;

struct PhaseProfile {
  std::size_t grid_size = 0;
  std::vector<double> R;
  std::vector<double> alpha;
  std::vector<double> alpha_prime;
  std::vector<double> beta;
  double min_modulus = 0.0;
  // (min alpha', max alpha'); Saffari's o_n is min/n and 1 - max/n.
  std::pair<double, double> speed_range{0.0, 0.0};
  // max |alpha''| / n^2 from central differences of alpha'.
  double second_deriv_max_scaled = 0.0;
  // max |R'| / n^{3/2}, R' from the analytic derivative.
  double r_prime_max_scaled = 0.0;
};

struct DistributionReport {
  std::size_t n = 0;
  std::vector<double> xs;
  std::vector<double> measure;  // meas{t : 0 <= alpha'(t) <= n x}
  double sup_deviation = 0.0;   // max_x |measure(x) - 2 pi x|
};

struct FlatnessReport {
  std::size_t degree = 0;
  std::size_t grid_size = 0;
  double eps = 0.0;       // certified: holds for every real t
  double eps_grid = 0.0;  // max_j | R_j / sqrt(n+1) - 1 |
  double slack = 0.0;     // eps - eps_grid
  double max_modulus_bound = 0.0;
  double min_modulus_bound = 0.0;
};

inline std::vector<double> modulus_profile(const CircleSamples& samples) {
  std::vector<double> r(samples.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = std::abs(samples[j]);
  return r;
}

inline void require_nonvanishing(const CircleSamples& samples,
                                 std::size_t degree) {
  const double cutoff =
      kNearZeroCutoff * std::sqrt(static_cast<double>(degree + 1));
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double m = std::abs(samples[j]);
    if (!(m > cutoff)) throw NearZeroModulus(j, samples.t(j), m);
  }
}

// Continuous branch of arg P on the grid, anchored at the principal value
// at t = 0.
inline std::vector<double> unwrap_phase(const CircleSamples& samples,
                                        std::size_t degree) {
  require_nonvanishing(samples, degree);
  std::vector<double> alpha(samples.size());
  if (alpha.empty()) return alpha;
  alpha[0] = std::arg(samples[0]);
  for (std::size_t j = 1; j < alpha.size(); ++j) {
    alpha[j] = alpha[j - 1] + std::arg(samples[j] * std::conj(samples[j - 1]));
  }
  return alpha;
}

// alpha(2 pi) - alpha(0), closing the loop from the last grid point back to
// t = 2 pi. Always an integer multiple of 2 pi.
inline double total_phase_increment(const CircleSamples& samples,
                                    std::span<const double> alpha) {
  const std::size_t m = samples.size();
  const double closing =
      std::arg(samples[0] * std::conj(samples[m - 1]));
  return alpha[m - 1] + closing - alpha[0];
}

namespace detail {

// alpha' = Re(e^{it} P'(e^{it}) / P(e^{it})), where e^{it} P'(e^{it}) is the
// k-weighted polynomial evaluated on the grid.
inline std::vector<double> angular_speed(const CircleSamples& values,
                                         const CircleSamples& weighted) {
  std::vector<double> speed(values.size());
  for (std::size_t j = 0; j < speed.size(); ++j) {
    speed[j] = (weighted[j] / values[j]).real();
  }
  return speed;
}

}  // namespace detail

template <Polynomial P>
std::vector<double> phase_derivative(const P& p, std::size_t grid_size) {
  CircleTransform transform(std::max<std::size_t>(grid_size, 1));
  const CircleSamples values = evaluate_on_grid(p, grid_size, transform);
  require_nonvanishing(values, p.degree());
  const CircleSamples weighted =
      evaluate_on_grid(weight_by_index(p, 1), grid_size, transform);
  return detail::angular_speed(values, weighted);
}

// max_j | alpha'(t_j) + alpha*'(t_j) - n |.
inline double conjugate_speed_identity(const UnimodularPolynomial& p,
                                       std::size_t grid_size) {
  const auto speed = phase_derivative(p, grid_size);
  const auto speed_star = phase_derivative(conjugate_reciprocal(p), grid_size);
  const double n = static_cast<double>(p.degree());
  double worst = 0.0;
  for (std::size_t j = 0; j < speed.size(); ++j) {
    worst = std::max(worst, std::abs(speed[j] + speed_star[j] - n));
  }
  return worst;
}

// beta = (alpha - alpha*) / 2 with both branches anchored at t = 0.
inline std::vector<double> beta_profile(const UnimodularPolynomial& p,
                                        std::size_t grid_size) {
  const auto alpha = unwrap_phase(evaluate_on_grid(p, grid_size), p.degree());
  const auto alpha_star = unwrap_phase(
      evaluate_on_grid(conjugate_reciprocal(p), grid_size), p.degree());
  std::vector<double> beta(alpha.size());
  for (std::size_t j = 0; j < beta.size(); ++j) {
    beta[j] = 0.5 * (alpha[j] - alpha_star[j]);
  }
  return beta;
}

// max_j | |(P - P*)(e^{it_j})| - 2 R_j |sin beta_j| |.
inline double sine_beta_identity(const UnimodularPolynomial& p,
                                 std::size_t grid_size) {
  const auto star = conjugate_reciprocal(p);
  CircleTransform transform(grid_size);
  const CircleSamples values = evaluate_on_grid(p, grid_size, transform);
  const CircleSamples diff =
      evaluate_on_grid(subtract(p, star), grid_size, transform);
  const auto alpha = unwrap_phase(values, p.degree());
  const auto alpha_star =
      unwrap_phase(evaluate_on_grid(star, grid_size, transform), p.degree());
  double worst = 0.0;
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double beta = 0.5 * (alpha[j] - alpha_star[j]);
    const double rhs = 2.0 * std::abs(values[j]) * std::abs(std::sin(beta));
    worst = std::max(worst, std::abs(std::abs(diff[j]) - rhs));
  }
  return worst;
}

// Probe points k/200, k = 0..200.
inline std::vector<double> default_probe_points() {
  std::vector<double> xs(201);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = static_cast<double>(k) / 200.0;
  return xs;
}

// Empirical measure of {t : 0 <= alpha'(t) <= n x} from grid samples of the
// angular speed; each sample carries weight 2 pi / M.
inline DistributionReport angular_speed_distribution(
    std::span<const double> alpha_prime, std::size_t n,
    std::span<const double> xs) {
  std::vector<double> sorted(alpha_prime.begin(), alpha_prime.end());
  std::sort(sorted.begin(), sorted.end());
  const auto first_nonneg = std::lower_bound(sorted.begin(), sorted.end(), 0.0);
  const double cell = kTwoPi / static_cast<double>(sorted.size());

  DistributionReport rep;
  rep.n = n;
  rep.xs.assign(xs.begin(), xs.end());
  rep.measure.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double limit = static_cast<double>(n) * xs[i];
    const auto last = std::upper_bound(sorted.begin(), sorted.end(), limit);
    const auto count = last > first_nonneg ? last - first_nonneg : 0;
    rep.measure[i] = cell * static_cast<double>(count);
    rep.sup_deviation =
        std::max(rep.sup_deviation, std::abs(rep.measure[i] - kTwoPi * xs[i]));
  }
  return rep;
}

inline DistributionReport angular_speed_distribution(
    const UnimodularPolynomial& p, std::size_t grid_size,
    std::span<const double> xs) {
  return angular_speed_distribution(phase_derivative(p, grid_size), p.degree(),
                                    xs);
}

inline DistributionReport angular_speed_distribution(
    const UnimodularPolynomial& p, std::size_t grid_size) {
  return angular_speed_distribution(p, grid_size, default_probe_points());
}

// Certified flatness.
//
// f = |P|^2 is a real trigonometric polynomial of degree n. Around each grid
// point f is expanded to second order using exact grid values of f, f', f''
// and the remainder is bounded by Bernstein's inequality
// |f'''| <= n^3 ||f - c||_inf. Every t lies within h = pi/M of a grid point,
// so maximizing (minimizing) the Taylor quadratic over a half cell on both
// sides and adding the remainder bounds sup f (inf f) over the whole circle.
// ||f - c|| is first bounded from the crude estimate sup|P| <= G / (1 - n h)
// and then tightened once with the resulting two-sided bounds on f.
inline FlatnessReport flatness_report(const UnimodularPolynomial& p,
                                      std::size_t grid_size,
                                      CircleTransform& transform) {
  const std::size_t n = p.degree();
  const double nd = static_cast<double>(n);
  const double root = std::sqrt(nd + 1.0);

  const CircleSamples v = evaluate_on_grid(p, grid_size, transform);
  const CircleSamples w1 =
      evaluate_on_grid(weight_by_index(p, 1), grid_size, transform);
  const CircleSamples w2 =
      evaluate_on_grid(weight_by_index(p, 2), grid_size, transform);

  FlatnessReport rep;
  rep.degree = n;
  rep.grid_size = grid_size;

  const std::size_t m = grid_size;
  std::vector<double> f(m), f1(m), f2(m);
  double grid_max = 0.0;
  double grid_min = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    // dP/dt = i w1, d2P/dt2 = -w2.
    const Complex dp = Complex(0.0, 1.0) * w1[j];
    const Complex ddp = -w2[j];
    f[j] = std::norm(v[j]);
    f1[j] = 2.0 * (std::conj(v[j]) * dp).real();
    f2[j] = 2.0 * std::norm(dp) + 2.0 * (std::conj(v[j]) * ddp).real();
    const double r = std::abs(v[j]);
    grid_max = std::max(grid_max, r);
    grid_min = std::min(grid_min, r);
    rep.eps_grid = std::max(rep.eps_grid, std::abs(r / root - 1.0));
  }

  const double h = std::numbers::pi / static_cast<double>(m);
  if (n == 0) {
    rep.max_modulus_bound = grid_max;
    rep.min_modulus_bound = grid_min;
    rep.eps = rep.eps_grid;
    return rep;
  }
  if (nd * h >= 1.0) {
    rep.max_modulus_bound = std::numeric_limits<double>::infinity();
    rep.min_modulus_bound = 0.0;
    rep.eps = std::numeric_limits<double>::infinity();
    rep.slack = rep.eps;
    return rep;
  }

  const double sup_crude = grid_max / (1.0 - nd * h);
  double spread = 0.5 * sup_crude * sup_crude;  // ||f - c|| for c = sup^2/2
  double upper = std::numeric_limits<double>::infinity();
  double lower = 0.0;

  for (int pass = 0; pass < 2; ++pass) {
    const double remainder = nd * nd * nd * spread * h * h * h / 6.0;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      for (const double dir : {1.0, -1.0}) {
        const double b = dir * f1[j];
        const double a = 0.5 * f2[j];
        // q(s) = f + b s + a s^2 on [0, h]
        double qmax = std::max(f[j], f[j] + b * h + a * h * h);
        double qmin = std::min(f[j], f[j] + b * h + a * h * h);
        if (a != 0.0) {
          const double s = -b / (2.0 * a);
          if (s > 0.0 && s < h) {
            const double qs = f[j] + b * s + a * s * s;
            qmax = std::max(qmax, qs);
            qmin = std::min(qmin, qs);
          }
        }
        hi = std::max(hi, qmax + remainder);
        lo = std::min(lo, qmin - remainder);
      }
    }
    upper = std::min(upper, hi);
    lower = std::max(lower, lo);
    spread = 0.5 * (upper - lower);
  }

  rep.max_modulus_bound = std::max(std::sqrt(upper), grid_max);
  rep.min_modulus_bound = std::min(std::sqrt(std::max(lower, 0.0)), grid_min);
  const double eps_upper = rep.max_modulus_bound / root - 1.0;
  const double eps_lower = 1.0 - rep.min_modulus_bound / root;
  rep.eps = std::max({rep.eps_grid, eps_upper, eps_lower});
  rep.slack = rep.eps - rep.eps_grid;
  return rep;
}

inline FlatnessReport flatness_report(const UnimodularPolynomial& p,
                                      std::size_t grid_size) {
  CircleTransform transform(grid_size);
  return flatness_report(p, grid_size, transform);
}

inline FlatnessReport flatness_report(const UnimodularPolynomial& p) {
  return flatness_report(p, default_grid_size(p.degree()));
}

// Full polar profile. Requires P nonvanishing on the grid.
inline PhaseProfile phase_profile(const UnimodularPolynomial& p,
                                  std::size_t grid_size) {
  const std::size_t n = p.degree();
  const double nd = static_cast<double>(n);
  CircleTransform transform(grid_size);
  const CircleSamples values = evaluate_on_grid(p, grid_size, transform);
  require_nonvanishing(values, n);
  const CircleSamples weighted =
      evaluate_on_grid(weight_by_index(p, 1), grid_size, transform);
  const auto star = conjugate_reciprocal(p);
  const CircleSamples star_values = evaluate_on_grid(star, grid_size, transform);

  PhaseProfile prof;
  prof.grid_size = grid_size;
  prof.R = modulus_profile(values);
  prof.alpha = unwrap_phase(values, n);
  prof.alpha_prime = detail::angular_speed(values, weighted);
  const auto alpha_star = unwrap_phase(star_values, n);
  prof.beta.resize(grid_size);
  for (std::size_t j = 0; j < grid_size; ++j) {
    prof.beta[j] = 0.5 * (prof.alpha[j] - alpha_star[j]);
  }
  prof.min_modulus = *std::min_element(prof.R.begin(), prof.R.end());
  const auto [lo, hi] =
      std::minmax_element(prof.alpha_prime.begin(), prof.alpha_prime.end());
  prof.speed_range = {*lo, *hi};

  if (n > 0) {
    const double h = kTwoPi / static_cast<double>(grid_size);
    double second = 0.0;
    double rprime = 0.0;
    for (std::size_t j = 0; j < grid_size; ++j) {
      const std::size_t next = (j + 1) % grid_size;
      const std::size_t prev = (j + grid_size - 1) % grid_size;
      second = std::max(second, std::abs(prof.alpha_prime[next] -
                                         prof.alpha_prime[prev]) / (2.0 * h));
      // R' = Re(conj(P) dP/dt) / R with dP/dt = i e^{it} P'(e^{it}).
      const Complex dp = Complex(0.0, 1.0) * weighted[j];
      rprime = std::max(rprime,
                        std::abs((std::conj(values[j]) * dp).real()) / prof.R[j]);
    }
    prof.second_deriv_max_scaled = second / (nd * nd);
    prof.r_prime_max_scaled = rprime / std::pow(nd, 1.5);
  }
  return prof;
}

}  // namespace ultraflat
