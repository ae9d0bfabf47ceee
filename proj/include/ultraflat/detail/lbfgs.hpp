#pragma once

// Limited-memory BFGS with a backtracking Armijo line search. Deterministic:
// no randomness, fixed operation order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <span>
#include <vector>

namespace ultraflat::detail {

struct LbfgsOptions {
  std::size_t memory = 10;
  std::size_t max_iterations = 1000;
  double relative_tolerance = 1e-13;
  double gradient_tolerance = 1e-12;
};

enum class LbfgsStop { kConverged, kIterationLimit, kLineSearchFailed, kCallback };

struct LbfgsResult {
  double value = 0.0;
  std::size_t iterations = 0;
  LbfgsStop reason = LbfgsStop::kIterationLimit;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// objective(x, grad) -> value, filling grad.
// on_iteration(x, value) -> true to stop; called after every accepted step.
// x is updated in place.
template <class Objective, class Callback>
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double>& x,
                           const LbfgsOptions& opt, Callback&& on_iteration) {
  const std::size_t dim = x.size();
  std::vector<double> g(dim), g_new(dim), dir(dim), x_new(dim);
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  LbfgsResult res;
  double fx = objective(std::span<const double>(x), std::span<double>(g));
  res.value = fx;

  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax <= opt.gradient_tolerance) {
      res.reason = LbfgsStop::kConverged;
      return res;
    }

    // Two-loop recursion.
    dir = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * dot(s_hist[i], dir);
      for (std::size_t k = 0; k < dim; ++k) dir[k] -= alpha[i] * y_hist[i][k];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) {
      gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
    } else {
      gamma = 1.0 / std::max(std::sqrt(dot(g, g)), 1e-300);
    }
    for (double& v : dir) v *= gamma;
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * dot(y_hist[i], dir);
      for (std::size_t k = 0; k < dim; ++k) dir[k] += s_hist[i][k] * (alpha[i] - beta);
    }
    for (double& v : dir) v = -v;

    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      // Not a descent direction; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      const double scale = 1.0 / std::max(std::sqrt(dot(g, g)), 1e-300);
      for (std::size_t k = 0; k < dim; ++k) dir[k] = -scale * g[k];
      slope = dot(g, dir);
    }

    double step = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int trial = 0; trial < 50; ++trial) {
      for (std::size_t k = 0; k < dim; ++k) x_new[k] = x[k] + step * dir[k];
      f_new = objective(std::span<const double>(x_new), std::span<double>(g_new));
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.reason = LbfgsStop::kLineSearchFailed;
      return res;
    }

    std::vector<double> s(dim), y(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      s[k] = x_new[k] - x[k];
      y[k] = g_new[k] - g[k];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double f_old = fx;
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    res.value = fx;
    res.iterations = it + 1;

    if (on_iteration(std::span<const double>(x), fx)) {
      res.reason = LbfgsStop::kCallback;
      return res;
    }
    if (std::abs(f_old - fx) <=
        opt.relative_tolerance * std::max({std::abs(fx), std::abs(f_old), 1e-300})) {
      res.reason = LbfgsStop::kConverged;
      return res;
    }
  }
  res.reason = LbfgsStop::kIterationLimit;
  return res;
}

}  // namespace ultraflat::detail
