#pragma once

// L_q means on the circle, the constant K(q) = (1/2pi) int |sin t|^q dt, and
// integrals of |cos(Bt+A)|^q, |sin(Bt+A)|^q over subintervals.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "ultraflat/numeric.hpp"
#include "ultraflat/poly_core.hpp"

namespace ultraflat {

// Exponents above this overflow |.|^q at the magnitudes handled here.
inline constexpr double kMaxExponent = 64.0;
inline constexpr std::size_t kMaxRefinedGrid = std::size_t{1} << 24;

struct LqResult {
  double q = 0.0;
  double value = 0.0;
  std::size_t grid_size = 0;
  double est_error = 0.0;
};

inline void check_exponent(double q) {
  if (!(q > 0.0) || q > kMaxExponent) {
    throw std::invalid_argument("exponent q must lie in (0, 64]");
  }
}

// K(q) = Gamma((q+1)/2) / (Gamma(q/2+1) sqrt(pi)), via log-gamma.
inline double kq_constant(double q) {
  if (!(q > 0.0)) throw std::invalid_argument("K(q) needs q > 0");
  return std::exp(std::lgamma(0.5 * (q + 1.0)) - std::lgamma(0.5 * q + 1.0)) /
         std::sqrt(std::numbers::pi);
}

namespace detail {

template <class Abs>
LqResult lq_mean(std::size_t m, double q, const Abs& modulus) {
  if (m < 2) throw std::invalid_argument("L_q mean needs at least 2 samples");
  check_exponent(q);
  const double full =
      pairwise_sum(m, [&](std::size_t j) { return std::pow(modulus(j), q); }) /
      static_cast<double>(m);
  double est = std::numeric_limits<double>::infinity();
  if (m % 2 == 0) {
    const double half =
        pairwise_sum(m / 2,
                     [&](std::size_t j) { return std::pow(modulus(2 * j), q); }) /
        static_cast<double>(m / 2);
    est = std::abs(full - half);
  }
  return {q, full, m, est};
}

}  // namespace detail

// (1/M) sum_j |values[j]|^q; est_error compares against the even-indexed
// half grid (infinite for odd M).
inline LqResult periodic_lq_mean(std::span<const Complex> values, double q) {
  return detail::lq_mean(values.size(), q,
                         [&](std::size_t j) { return std::abs(values[j]); });
}

inline LqResult periodic_lq_mean(const CircleSamples& samples, double q) {
  return periodic_lq_mean(std::span<const Complex>(samples.values), q);
}

inline LqResult periodic_lq_mean(std::span<const double> values, double q) {
  return detail::lq_mean(values.size(), q,
                         [&](std::size_t j) { return std::abs(values[j]); });
}

// Source of grid samples: returns |f(t_j)| (or f(t_j)) for j < M.
using GridFunction = std::function<std::vector<double>(std::size_t)>;

// Doubles M from initial_grid until consecutive means agree to tol relative.
inline LqResult refine_until(const GridFunction& f, double q, double tol,
                             std::size_t initial_grid = 1024) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  check_exponent(q);
  std::size_t m = std::max<std::size_t>(initial_grid, 2);
  double previous = periodic_lq_mean(f(m), q).value;
  while (m * 2 <= kMaxRefinedGrid) {
    m *= 2;
    const double value = periodic_lq_mean(f(m), q).value;
    const double delta = std::abs(value - previous);
    if (delta <= tol * std::max(value, 1e-300)) return {q, value, m, delta};
    previous = value;
  }
  throw NoConvergence(previous, periodic_lq_mean(f(m), q).value);
}

enum class Trig { kCos, kSin };

struct IntervalIntegral {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

inline double trig_power(Trig kind, double u, double q) {
  return std::pow(std::abs(kind == Trig::kCos ? std::cos(u) : std::sin(u)), q);
}

// int_lo^hi |trig(u)|^q du for a range free of interior zeros.
inline IntervalIntegral panel_integral(Trig kind, double lo, double hi,
                                       double q) {
  if (!(hi > lo)) return {};
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0;
  // Integrate in the offset variable so the endpoint zero is resolved
  // relative to lo rather than to |u|.
  const double value = integrator.integrate(
      [&](double s) { return trig_power(kind, lo + s, q); }, 0.0, hi - lo,
      std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-4, &err);
  return {value, err};
}

}  // namespace detail

// int_I |trig(B t + A)|^q dt over I = [a, b]. The substitution u = Bt + A
// splits the range at the zeros of the integrand; all full panels between
// consecutive zeros are identical, so one of them is integrated numerically
// and the two partial end panels separately.
inline IntervalIntegral interval_trig_integral(Trig kind, double A, double B,
                                               double q, double a, double b) {
  if (B == 0.0) throw std::invalid_argument("B must be nonzero");
  if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
  if (!(b >= a)) throw std::invalid_argument("interval must satisfy a <= b");
  double u0 = B * a + A;
  double u1 = B * b + A;
  if (u0 > u1) std::swap(u0, u1);
  const double pi = std::numbers::pi;
  // Zeros at offset + k pi.
  const double offset = kind == Trig::kCos ? 0.5 * pi : 0.0;
  const double k_first = std::ceil((u0 - offset) / pi);
  const double k_last = std::floor((u1 - offset) / pi);

  IntervalIntegral total;
  auto add = [&](const IntervalIntegral& part, double times = 1.0) {
    total.value += times * part.value;
    total.error_estimate += times * part.error_estimate;
  };
  if (k_first > k_last) {
    add(detail::panel_integral(kind, u0, u1, q));
  } else {
    const double z_first = offset + k_first * pi;
    const double z_last = offset + k_last * pi;
    add(detail::panel_integral(kind, u0, z_first, q));
    add(detail::panel_integral(kind, z_last, u1, q));
    const double full_panels = k_last - k_first;
    if (full_panels > 0) {
      add(detail::panel_integral(kind, offset, offset + pi, q), full_panels);
    }
  }
  const double scale = 1.0 / std::abs(B);
  total.value *= scale;
  total.error_estimate *= scale;
  return total;
}

struct IntervalCheck {
  double lhs_defect = 0.0;  // max of the cos and sin defects
  double bound = 0.0;       // pi / |B|
  double cos_integral = 0.0;
  double sin_integral = 0.0;
  double quadrature_error = 0.0;
};

// Defects |int_I |cos(Bt+A)|^q - K(q) meas(I)| and the same for sin,
// against the bound pi/|B|. I must lie inside [0, 2 pi].
inline IntervalCheck interval_lemma37_check(double A, double B, double q,
                                            double a, double b) {
  if (a < 0.0 || b > kTwoPi || a > b) {
    throw std::invalid_argument("interval must lie inside [0, 2 pi]");
  }
  const auto c = interval_trig_integral(Trig::kCos, A, B, q, a, b);
  const auto s = interval_trig_integral(Trig::kSin, A, B, q, a, b);
  const double expected = kq_constant(q) * (b - a);
  IntervalCheck out;
  out.cos_integral = c.value;
  out.sin_integral = s.value;
  out.lhs_defect =
      std::max(std::abs(c.value - expected), std::abs(s.value - expected));
  out.bound = std::numbers::pi / std::abs(B);
  out.quadrature_error = c.error_estimate + s.error_estimate;
  return out;
}

// delta = mean_j |2 beta'(t_j) / n|^q - 1/(q+1).
inline double moment_39_check(std::span<const double> beta_prime,
                              std::size_t n, double q) {
  check_exponent(q);
  if (beta_prime.empty() || n == 0) {
    throw std::invalid_argument("moment check needs samples and n >= 1");
  }
  const double scale = 2.0 / static_cast<double>(n);
  const double mean =
      pairwise_sum(beta_prime.size(),
                   [&](std::size_t j) {
                     return std::pow(std::abs(scale * beta_prime[j]), q);
                   }) /
      static_cast<double>(beta_prime.size());
  return mean - 1.0 / (q + 1.0);
}

}  // namespace ultraflat
