#pragma once

// Coefficient-level polynomials in z = e^{it} and their evaluation on the
// uniform circle grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ultraflat/fft.hpp"
#include "ultraflat/numeric.hpp"

namespace ultraflat {

// Allowed deviation | |a_k| - 1 | for a unimodular coefficient.
inline constexpr double kUnitModulusTolerance = 1e-12;

class UnimodularityError : public std::invalid_argument {
 public:
  UnimodularityError(std::size_t index, double modulus)
      : std::invalid_argument("coefficient " + std::to_string(index) +
                              " has modulus " + std::to_string(modulus)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// sum_k a_k z^k with arbitrary complex coefficients.
class ComplexPolynomial {
 public:
  ComplexPolynomial() : coeffs_{Complex{}} {}
  explicit ComplexPolynomial(std::vector<Complex> coeffs)
      : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(Complex{});
  }
  ComplexPolynomial(std::initializer_list<Complex> coeffs)
      : ComplexPolynomial(std::vector<Complex>(coeffs)) {}

  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  const Complex& operator[](std::size_t k) const { return coeffs_[k]; }

  friend bool operator==(const ComplexPolynomial&,
                         const ComplexPolynomial&) = default;

 private:
  std::vector<Complex> coeffs_;
};

// Member of K_n: every coefficient has unit modulus. Construct through
// make_unimodular() or from_phases().
class UnimodularPolynomial {
 public:
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  const Complex& operator[](std::size_t k) const { return coeffs_[k]; }

  ComplexPolynomial as_complex() const { return ComplexPolynomial(coeffs_); }

  // a_k = exp(i * phases[k]); exact to rounding.
  static UnimodularPolynomial from_phases(std::span<const double> phases) {
    if (phases.empty()) {
      throw std::invalid_argument("polynomial needs at least one coefficient");
    }
    std::vector<Complex> c(phases.size());
    for (std::size_t k = 0; k < phases.size(); ++k) {
      c[k] = std::polar(1.0, phases[k]);
    }
    return UnimodularPolynomial(std::move(c));
  }

  friend UnimodularPolynomial make_unimodular(std::vector<Complex> coeffs);

  friend bool operator==(const UnimodularPolynomial&,
                         const UnimodularPolynomial&) = default;

 private:
  explicit UnimodularPolynomial(std::vector<Complex> c) : coeffs_(std::move(c)) {}
  std::vector<Complex> coeffs_;
};

// Validates without renormalizing.
inline UnimodularPolynomial make_unimodular(std::vector<Complex> coeffs) {
  if (coeffs.empty()) {
    throw std::invalid_argument("polynomial needs at least one coefficient");
  }
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double m = std::abs(coeffs[k]);
    if (!(std::abs(m - 1.0) <= kUnitModulusTolerance)) {
      throw UnimodularityError(k, m);
    }
  }
  return UnimodularPolynomial(std::move(coeffs));
}

template <class P>
concept Polynomial = requires(const P& p) {
  { p.degree() } -> std::convertible_to<std::size_t>;
  { p.coeffs() } -> std::convertible_to<std::span<const Complex>>;
};

// Q*(z) = z^n conj(Q)(1/z): coefficient k is conj(a_{n-k}).
inline ComplexPolynomial conjugate_reciprocal(const ComplexPolynomial& p) {
  const auto a = p.coeffs();
  std::vector<Complex> r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = std::conj(a[a.size() - 1 - k]);
  return ComplexPolynomial(std::move(r));
}

inline UnimodularPolynomial conjugate_reciprocal(const UnimodularPolynomial& p) {
  const auto a = p.coeffs();
  std::vector<Complex> r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = std::conj(a[a.size() - 1 - k]);
  return make_unimodular(std::move(r));
}

// d/dz; a constant maps to the zero polynomial of degree 0.
template <Polynomial P>
ComplexPolynomial derivative(const P& p) {
  const auto a = p.coeffs();
  if (a.size() == 1) return ComplexPolynomial{Complex{}};
  std::vector<Complex> d(a.size() - 1);
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    d[k] = static_cast<double>(k + 1) * a[k + 1];
  }
  return ComplexPolynomial(std::move(d));
}

// Coefficientwise p - q, zero-padding the shorter operand.
template <Polynomial P, Polynomial Q>
ComplexPolynomial subtract(const P& p, const Q& q) {
  const auto a = p.coeffs();
  const auto b = q.coeffs();
  std::vector<Complex> d(std::max(a.size(), b.size()));
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Complex x = k < a.size() ? a[k] : Complex{};
    const Complex y = k < b.size() ? b[k] : Complex{};
    d[k] = x - y;
  }
  return ComplexPolynomial(std::move(d));
}

// Coefficient k multiplied by k^power: k-weighting turns evaluation at e^{it}
// into evaluation of z P'(z) (power 1), i.e. -i d/dt of P(e^{it}).
template <Polynomial P>
ComplexPolynomial weight_by_index(const P& p, int power) {
  const auto a = p.coeffs();
  std::vector<Complex> w(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    w[k] = std::pow(static_cast<double>(k), power) * a[k];
  }
  return ComplexPolynomial(std::move(w));
}

// Values on t_j = 2*pi*j/M, j = 0..M-1.
struct CircleSamples {
  std::vector<Complex> values;

  std::size_t size() const noexcept { return values.size(); }
  double t(std::size_t j) const { return grid_point(j, values.size()); }
  const Complex& operator[](std::size_t j) const { return values[j]; }
};

inline void check_grid_size(std::size_t degree, std::size_t grid_size) {
  if (grid_size < degree + 1) {
    throw std::invalid_argument("grid size " + std::to_string(grid_size) +
                                " aliases a degree-" + std::to_string(degree) +
                                " polynomial");
  }
}

// values[j] = sum_k a_k e^{i 2 pi j k / M}; requires M >= degree + 1.
inline CircleSamples evaluate_on_grid(std::span<const Complex> coeffs,
                                      std::size_t grid_size,
                                      CircleTransform& transform) {
  check_grid_size(coeffs.size() - 1, grid_size);
  if (transform.size() != grid_size) {
    throw std::invalid_argument("transform size does not match grid size");
  }
  CircleSamples s{std::vector<Complex>(grid_size)};
  transform.evaluate(coeffs, s.values);
  return s;
}

template <Polynomial P>
CircleSamples evaluate_on_grid(const P& p, std::size_t grid_size) {
  check_grid_size(p.degree(), grid_size);
  CircleTransform transform(grid_size);
  return evaluate_on_grid(p.coeffs(), grid_size, transform);
}

template <Polynomial P>
CircleSamples evaluate_on_grid(const P& p, std::size_t grid_size,
                               CircleTransform& transform) {
  return evaluate_on_grid(p.coeffs(), grid_size, transform);
}

// sum_k |a_k|^2, the mean of |P(e^{it})|^2 over the circle.
template <Polynomial P>
double mean_square(const P& p) {
  const auto a = p.coeffs();
  return pairwise_sum(a.size(), [&](std::size_t k) { return std::norm(a[k]); });
}

enum class ConvolutionWeight { kUnit, kIndexSquared };

// sum_k w(k) a_k a_{n-k}, computed from coefficients.
inline Complex self_convolution_sum(const UnimodularPolynomial& p,
                                    ConvolutionWeight weight) {
  const auto a = p.coeffs();
  const std::size_t n = p.degree();
  return pairwise_sum_complex(a.size(), [&](std::size_t k) {
    const double w = weight == ConvolutionWeight::kUnit
                         ? 1.0
                         : static_cast<double>(k) * static_cast<double>(k);
    return w * a[k] * a[n - k];
  });
}

}  // namespace ultraflat
