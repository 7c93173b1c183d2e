#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's algorithms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

/// Minimum of sum_n ||b[pi(n)] - a[n]|| over all N! permutations.
inline double brute_force_assignment(const Points& a, const Points& b) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) cost += distance(a[n], b[perm[n]]);
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Squared loss of <w, x> against y with inputs perturbed by N(0, sigma^2 I):
/// (<w,x> - y)^2 + sigma^2 ||w||^2.
inline double ridge_identity(const std::vector<double>& w, const std::vector<double>& x, double y,
                             double sigma) {
  double pred = 0.0, norm2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    pred += w[i] * x[i];
    norm2 += w[i] * w[i];
  }
  return (pred - y) * (pred - y) + sigma * sigma * norm2;
}

/// Mean-normalised l1 distance between two rows.
inline double mean_l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) s += std::abs(a[m] - b[m]);
  return s / static_cast<double>(a.size());
}

/// Smallest proper cover by enumerating every subset of rows.
inline std::size_t brute_force_cover(const Points& rows, double xi) {
  const std::size_t r = rows.size();
  std::size_t best = r;
  for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size >= best) continue;
    bool ok = true;
    for (std::size_t i = 0; i < r && ok; ++i) {
      bool hit = false;
      for (std::size_t c = 0; c < r && !hit; ++c)
        if ((mask >> c & 1u) && mean_l1(rows[i], rows[c]) <= xi) hit = true;
      ok = hit;
    }
    if (ok) best = size;
  }
  return best;
}

/// Midpoint-rule integral of g(lambda) against the Beta(alpha, alpha) density.
template <class G>
double beta_quadrature(double alpha, G&& g, std::size_t cells = 200000) {
  const double log_norm = 2.0 * std::lgamma(alpha) - std::lgamma(2.0 * alpha);
  double total = 0.0, mass = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    const double lam = (static_cast<double>(c) + 0.5) / static_cast<double>(cells);
    const double w = std::exp((alpha - 1.0) * (std::log(lam) + std::log1p(-lam)) - log_norm);
    total += w * g(lam);
    mass += w;
  }
  return total / mass;
}

/// Symmetric central difference of f at x along each coordinate.
template <class F>
std::vector<double> finite_difference(F&& f, std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Closed-form least squares for one input with bias: returns (w, b).
inline std::pair<double, double> simple_regression(const std::vector<double>& x,
                                                   const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double w = sxy / sxx;
  return {w, my - w * mx};
}

}  // namespace oracle
