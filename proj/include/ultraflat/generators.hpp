#pragma once

// Candidate sequences (quadratic phase, Rudin-Shapiro, seeded random) and a
// numerical flattener that drives a unimodular polynomial toward
// |P(e^{it})| = sqrt(n+1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ultraflat/detail/lbfgs.hpp"
#include "ultraflat/fft.hpp"
#include "ultraflat/numeric.hpp"
#include "ultraflat/parallel.hpp"
#include "ultraflat/phase.hpp"
#include "ultraflat/poly_core.hpp"

namespace ultraflat {

// a_k = exp(i pi k^2 / (n+1)). k^2 is reduced modulo 2(n+1) in integer
// arithmetic so the phase stays accurate for large k.
inline UnimodularPolynomial quadratic_phase(std::size_t n) {
  const std::uint64_t period = 2 * static_cast<std::uint64_t>(n + 1);
  std::vector<double> phases(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const std::uint64_t kk = static_cast<std::uint64_t>(k) * k % period;
    phases[k] = std::numbers::pi * static_cast<double>(kk) /
                static_cast<double>(n + 1);
  }
  return UnimodularPolynomial::from_phases(phases);
}

// P_{j+1} = P_j + z^{2^j} Q_j, Q_{j+1} = P_j - z^{2^j} Q_j, P_0 = Q_0 = 1.
// Returns the pair (P_m, Q_m) of degree 2^m - 1.
inline std::pair<ComplexPolynomial, ComplexPolynomial> rudin_shapiro_pair(
    unsigned m) {
  if (m > 30) throw std::invalid_argument("Rudin-Shapiro order too large");
  std::vector<Complex> p{1.0}, q{1.0};
  for (unsigned j = 0; j < m; ++j) {
    const std::size_t len = p.size();
    std::vector<Complex> np(2 * len), nq(2 * len);
    for (std::size_t k = 0; k < len; ++k) {
      np[k] = p[k];
      np[len + k] = q[k];
      nq[k] = p[k];
      nq[len + k] = -q[k];
    }
    p.swap(np);
    q.swap(nq);
  }
  return {ComplexPolynomial(std::move(p)), ComplexPolynomial(std::move(q))};
}

inline UnimodularPolynomial rudin_shapiro(unsigned m) {
  const auto pair = rudin_shapiro_pair(m);
  const auto coeffs = pair.first.coeffs();
  return make_unimodular(std::vector<Complex>(coeffs.begin(), coeffs.end()));
}

// theta_k i.i.d. uniform on [0, 2 pi) from a 64-bit Mersenne Twister; the
// 53-bit mantissa is taken directly from the generator output so the stream
// does not depend on the standard library's distribution implementations.
inline UnimodularPolynomial random_unimodular(std::size_t n,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> phases(n + 1);
  for (double& th : phases) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    th = kTwoPi * u;
  }
  return UnimodularPolynomial::from_phases(phases);
}

struct FlattenerConfig {
  double target_eps = 0.1;
  std::size_t max_iters = 5000;
  // Working grid is oversample*(n+1) rounded up to a power of two.
  std::size_t oversample = 16;
  std::uint64_t seed = 0;
  // Phase relaxation of the alternating-projection stage.
  double damping = 0.7;
  // Alternating-projection iterations before switching to L_p descent.
  // Zero skips straight to descent.
  std::size_t projection_iters = 20;
  // Upper bound on descent iterations spent on a single exponent.
  std::size_t iters_per_exponent = 1500;
  // Restarts perturb each phase uniformly in [-jitter, jitter] and resume
  // the continuation at restart_exponent.
  double restart_jitter = 0.05;
  double restart_exponent = 8.0;

  void validate() const {
    if (!(target_eps > 0.0 && target_eps < 1.0)) {
      throw std::invalid_argument("target_eps must lie in (0, 1)");
    }
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (oversample < 4) throw std::invalid_argument("oversample must be >= 4");
    if (!(damping > 0.0 && damping <= 1.0)) {
      throw std::invalid_argument("damping must lie in (0, 1]");
    }
    if (iters_per_exponent < 1) {
      throw std::invalid_argument("iters_per_exponent must be >= 1");
    }
  }
};

struct FlattenerTrace {
  std::size_t iterations = 0;
  std::vector<double> eps_history;  // certified eps of iterate i
  bool converged = false;
  double final_eps = 0.0;           // certified eps of the returned polynomial
  std::size_t projection_steps = 0;
  std::size_t descent_steps = 0;
  std::size_t restarts = 0;
};

struct FlattenResult {
  UnimodularPolynomial polynomial;
  FlattenerTrace trace;
};

namespace detail {

// Smooth surrogate for max_j |g_j|, g_j = |P(t_j)|/sqrt(n+1) - 1:
// (mean_j g_j^{2p})^{1/(2p)} and its gradient in the coefficient phases.
class FlatnessObjective {
 public:
  FlatnessObjective(std::size_t degree, std::size_t grid_size)
      : n_(degree), m_(grid_size), transform_(grid_size),
        coeffs_(degree + 1), values_(grid_size), weights_(grid_size),
        back_(degree + 1), g_(grid_size) {}

  void set_exponent(double p) { p_ = p; }

  double operator()(std::span<const double> theta, std::span<double> grad) {
    const double root = std::sqrt(static_cast<double>(n_ + 1));
    for (std::size_t k = 0; k <= n_; ++k) coeffs_[k] = std::polar(1.0, theta[k]);
    transform_.evaluate(coeffs_, values_);
    double scale = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      g_[j] = std::abs(values_[j]) / root - 1.0;
      scale = std::max(scale, std::abs(g_[j]));
    }
    if (scale == 0.0) {
      std::fill(grad.begin(), grad.end(), 0.0);
      return 0.0;
    }
    const double two_p = 2.0 * p_;
    const double mean =
        pairwise_sum(m_, [&](std::size_t j) { return std::pow(g_[j] / scale, two_p); }) /
        static_cast<double>(m_);
    const double value = scale * std::pow(mean, 1.0 / two_p);
    const double lead = std::pow(mean, 1.0 / two_p - 1.0) / static_cast<double>(m_);
    for (std::size_t j = 0; j < m_; ++j) {
      const double a = std::abs(values_[j]);
      const double dg = lead * std::pow(g_[j] / scale, two_p - 1.0);
      weights_[j] = a > 0.0 ? (dg / (a * root)) * values_[j] : Complex{};
    }
    transform_.correlate(weights_, back_);
    for (std::size_t k = 0; k <= n_; ++k) {
      grad[k] = (Complex(0.0, 1.0) * coeffs_[k] * std::conj(back_[k])).real();
    }
    return value;
  }

 private:
  std::size_t n_;
  std::size_t m_;
  double p_ = 2.0;
  CircleTransform transform_;
  std::vector<Complex> coeffs_, values_, weights_, back_;
  std::vector<double> g_;
};

}  // namespace detail

// Alternating projection between the flat-modulus set and the unimodular
// coefficient set, followed by L_p descent on the coefficient phases with
// p doubling from 2 to 256 (a continuation toward the sup norm). Every
// recorded eps is the certified flatness of a unimodular iterate. Stops at
// the first iterate with eps <= target_eps; otherwise returns the best
// iterate seen.
inline FlattenResult flatten(const UnimodularPolynomial& start,
                             const FlattenerConfig& cfg) {
  cfg.validate();
  const std::size_t n = start.degree();
  const std::size_t work_grid = default_grid_size(n, cfg.oversample);
  const std::size_t cert_grid = default_grid_size(n, std::max<std::size_t>(cfg.oversample, 16));
  CircleTransform cert_transform(cert_grid);

  std::vector<double> theta(n + 1);
  for (std::size_t k = 0; k <= n; ++k) theta[k] = std::arg(start[k]);

  FlattenerTrace trace;
  std::vector<double> best_theta = theta;
  double best_eps = std::numeric_limits<double>::infinity();

  // Certifies the iterate; returns true when the run must stop.
  auto record = [&](std::span<const double> th) {
    const auto poly = UnimodularPolynomial::from_phases(th);
    const double eps = flatness_report(poly, cert_grid, cert_transform).eps;
    trace.eps_history.push_back(eps);
    ++trace.iterations;
    if (eps < best_eps || eps <= cfg.target_eps) {
      best_eps = eps;
      best_theta.assign(th.begin(), th.end());
    }
    if (eps <= cfg.target_eps) {
      trace.converged = true;
      return true;
    }
    return trace.iterations >= cfg.max_iters;
  };

  bool done = record(theta);

  if (!done && n > 0 && cfg.projection_iters > 0) {
    const double root = std::sqrt(static_cast<double>(n + 1));
    CircleTransform transform(work_grid);
    std::vector<Complex> coeffs(n + 1), values(work_grid), projected(n + 1);
    for (std::size_t step = 0; step < cfg.projection_iters && !done; ++step) {
      for (std::size_t k = 0; k <= n; ++k) coeffs[k] = std::polar(1.0, theta[k]);
      transform.evaluate(coeffs, values);
      for (Complex& v : values) {
        const double a = std::abs(v);
        if (a > 0.0) v *= root / a;
      }
      transform.analyze(values, projected);
      for (std::size_t k = 0; k <= n; ++k) {
        const double target = projected[k] == Complex{} ? 0.0 : std::arg(projected[k]);
        theta[k] += cfg.damping * wrap_angle(target - theta[k]);
      }
      ++trace.projection_steps;
      done = record(theta);
    }
  }

  if (!done && n > 0) {
    detail::FlatnessObjective objective(n, work_grid);
    auto fn = [&](std::span<const double> x, std::span<double> g) {
      return objective(x, g);
    };
    auto descend = [&](double first_exponent) {
      for (double p = first_exponent; p <= 256.0 && !done; p *= 2.0) {
        objective.set_exponent(p);
        detail::LbfgsOptions opt;
        opt.max_iterations = cfg.iters_per_exponent;
        detail::lbfgs_minimize(fn, theta, opt, [&](std::span<const double> x, double) {
          ++trace.descent_steps;
          done = record(x);
          return done;
        });
      }
    };
    theta = best_theta;
    descend(2.0);
    // Leftover budget: restart from jittered copies of the best iterate.
    std::mt19937_64 rng(cfg.seed);
    while (!done) {
      theta = best_theta;
      for (double& th : theta) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        th += cfg.restart_jitter * (2.0 * u - 1.0);
      }
      ++trace.restarts;
      descend(cfg.restart_exponent);
    }
  }

  trace.final_eps = best_eps;
  return {UnimodularPolynomial::from_phases(best_theta), std::move(trace)};
}

struct SweepEntry {
  std::size_t n = 0;
  UnimodularPolynomial polynomial;
  FlattenerTrace trace;
};

// Flattens quadratic_phase(n) for each n. ns must be strictly increasing.
inline std::vector<SweepEntry> flat_sweep(std::span<const std::size_t> ns,
                                          const FlattenerConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] <= ns[i - 1]) {
      throw std::invalid_argument("sweep degrees must be strictly increasing");
    }
  }
  std::vector<SweepEntry> out(ns.size(), SweepEntry{0, quadratic_phase(0), {}});
  parallel_for(ns.size(), [&](std::size_t i) {
    FlattenerConfig local = cfg;
    local.seed = cfg.seed ^ (0x9E3779B97F4A7C15ull * (ns[i] + 1));
    auto res = flatten(quadratic_phase(ns[i]), local);
    out[i] = SweepEntry{ns[i], std::move(res.polynomial), std::move(res.trace)};
  });
  return out;
}

}  // namespace ultraflat
