#pragma once

// Small numeric helpers shared by every module: fixed-order summation,
// grid conventions and the error types thrown across the library.

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ultraflat {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Raised when a phase quantity is requested at a grid point where the
// polynomial (numerically) vanishes.
class NearZeroModulus : public std::runtime_error {
 public:
  NearZeroModulus(std::size_t index, double t, double modulus)
      : std::runtime_error("modulus " + std::to_string(modulus) +
                           " below cutoff at t = " + std::to_string(t)),
        index_(index), t_(t), modulus_(modulus) {}

  std::size_t index() const noexcept { return index_; }
  double t() const noexcept { return t_; }
  double modulus() const noexcept { return modulus_; }

 private:
  std::size_t index_;
  double t_;
  double modulus_;
};

// Raised by grid refinement when the sample cap is reached.
class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(double previous, double last)
      : std::runtime_error("refinement did not converge: " +
                           std::to_string(previous) + " -> " +
                           std::to_string(last)),
        previous_(previous), last_(last) {}

  double previous() const noexcept { return previous_; }
  double last() const noexcept { return last_; }

 private:
  double previous_;
  double last_;
};

// Grid point t_j = 2*pi*j/M.
inline double grid_point(std::size_t j, std::size_t grid_size) {
  return kTwoPi * static_cast<double>(j) / static_cast<double>(grid_size);
}

// Oversampled grid size: factor*(n+1) rounded up to a power of two.
inline std::size_t default_grid_size(std::size_t degree,
                                     std::size_t factor = 16) {
  return std::bit_ceil(factor * (degree + 1));
}

namespace detail {

template <class Fn>
double pairwise_sum_impl(std::size_t lo, std::size_t hi, const Fn& term) {
  if (hi - lo <= 32) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum_impl(lo, mid, term) + pairwise_sum_impl(mid, hi, term);
}

}  // namespace detail

// Pairwise (tree) summation of term(0) + ... + term(count-1). The tree shape
// depends only on count, so results are reproducible bit for bit.
template <class Fn>
double pairwise_sum(std::size_t count, const Fn& term) {
  if (count == 0) return 0.0;
  return detail::pairwise_sum_impl(0, count, term);
}

inline double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(values.size(),
                      [&](std::size_t i) { return values[i]; });
}

inline Complex pairwise_sum_complex(std::size_t count,
                                    const auto& term) {
  const double re =
      pairwise_sum(count, [&](std::size_t i) { return term(i).real(); });
  const double im =
      pairwise_sum(count, [&](std::size_t i) { return term(i).imag(); });
  return {re, im};
}

// Reduce an angle to (-pi, pi].
inline double wrap_angle(double x) {
  double r = std::remainder(x, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

}  // namespace ultraflat
