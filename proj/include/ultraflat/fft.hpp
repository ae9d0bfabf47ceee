#pragma once

// Thin RAII wrapper around FFTW for evaluating polynomials on the uniform
// circle grid and for recovering coefficients from grid values.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <mutex>
#include <new>
#include <span>
#include <stdexcept>
#include <utility>

#include "ultraflat/numeric.hpp"

namespace ultraflat {

namespace detail {

// The FFTW planner is not reentrant; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

// Fixed-size transform pair on the grid t_j = 2*pi*j/M.
//
//   evaluate: values[j] = sum_k c_k exp(+i 2 pi j k / M)   (polynomial values)
//   analyze:  c_k = (1/M) sum_j values[j] exp(-i 2 pi j k / M)
//
// Plans use FFTW_ESTIMATE and private aligned buffers, so the same size always
// runs the same codelets and produces bit-identical output. An instance owns
// scratch buffers and must not be shared between threads.
class CircleTransform {
 public:
  explicit CircleTransform(std::size_t size) : size_(size) {
    if (size == 0) throw std::invalid_argument("transform size must be >= 1");
    buffer_ = fftw_alloc_complex(size);
    if (buffer_ == nullptr) throw std::bad_alloc();
    std::lock_guard lock(detail::fftw_planner_mutex());
    const int n = static_cast<int>(size);
    to_values_ = fftw_plan_dft_1d(n, buffer_, buffer_, FFTW_BACKWARD,
                                  FFTW_ESTIMATE);
    to_coeffs_ = fftw_plan_dft_1d(n, buffer_, buffer_, FFTW_FORWARD,
                                  FFTW_ESTIMATE);
  }

  CircleTransform(const CircleTransform&) = delete;
  CircleTransform& operator=(const CircleTransform&) = delete;

  CircleTransform(CircleTransform&& other) noexcept
      : size_(std::exchange(other.size_, 0)),
        buffer_(std::exchange(other.buffer_, nullptr)),
        to_values_(std::exchange(other.to_values_, nullptr)),
        to_coeffs_(std::exchange(other.to_coeffs_, nullptr)) {}

  CircleTransform& operator=(CircleTransform&& other) noexcept {
    if (this != &other) {
      release();
      size_ = std::exchange(other.size_, 0);
      buffer_ = std::exchange(other.buffer_, nullptr);
      to_values_ = std::exchange(other.to_values_, nullptr);
      to_coeffs_ = std::exchange(other.to_coeffs_, nullptr);
    }
    return *this;
  }

  ~CircleTransform() { release(); }

  std::size_t size() const noexcept { return size_; }

  // coeffs.size() <= size(); missing high coefficients are zero.
  void evaluate(std::span<const Complex> coeffs, std::span<Complex> values) {
    if (coeffs.size() > size_ || values.size() != size_) {
      throw std::invalid_argument("CircleTransform::evaluate: size mismatch");
    }
    load(coeffs);
    fftw_execute(to_values_);
    store(values, 1.0);
  }

  // Writes the first coeffs.size() coefficients.
  void analyze(std::span<const Complex> values, std::span<Complex> coeffs) {
    if (values.size() != size_ || coeffs.size() > size_) {
      throw std::invalid_argument("CircleTransform::analyze: size mismatch");
    }
    load(values);
    fftw_execute(to_coeffs_);
    store(coeffs, 1.0 / static_cast<double>(size_));
  }

  // Unnormalized sum_j values[j] exp(-i 2 pi j k / M) for k < out.size().
  void correlate(std::span<const Complex> values, std::span<Complex> out) {
    if (values.size() != size_ || out.size() > size_) {
      throw std::invalid_argument("CircleTransform::correlate: size mismatch");
    }
    load(values);
    fftw_execute(to_coeffs_);
    store(out, 1.0);
  }

 private:
  void load(std::span<const Complex> src) {
    std::size_t i = 0;
    for (; i < src.size(); ++i) {
      buffer_[i][0] = src[i].real();
      buffer_[i][1] = src[i].imag();
    }
    for (; i < size_; ++i) buffer_[i][0] = buffer_[i][1] = 0.0;
  }

  void store(std::span<Complex> dst, double scale) const {
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = Complex(buffer_[i][0] * scale, buffer_[i][1] * scale);
    }
  }

  void release() noexcept {
    if (to_values_ != nullptr || to_coeffs_ != nullptr) {
      std::lock_guard lock(detail::fftw_planner_mutex());
      if (to_values_ != nullptr) fftw_destroy_plan(to_values_);
      if (to_coeffs_ != nullptr) fftw_destroy_plan(to_coeffs_);
    }
    if (buffer_ != nullptr) fftw_free(buffer_);
    to_values_ = to_coeffs_ = nullptr;
    buffer_ = nullptr;
  }

  std::size_t size_ = 0;
  fftw_complex* buffer_ = nullptr;
  fftw_plan to_values_ = nullptr;
  fftw_plan to_coeffs_ = nullptr;
};

}  // namespace ultraflat
