#include "cogrowth/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cogrowth/errors.hpp"

namespace cogrowth {

double grigorchuk_rho(double delta, int k) {
  if (k < 1) throw PreconditionError("rank k must be >= 1");
  const double q = 2.0 * k - 1.0;
  const double top = std::log(q);
  if (!(delta >= 0.0 && delta <= top + 1e-12)) {
    throw PreconditionError("delta must lie in [0, log(2k-1)]");
  }
  const double sq = std::sqrt(q);
  const double e = std::exp(std::min(delta, top));
  if (e <= sq) return sq / k;
  return (sq / (2.0 * k)) * (e / sq + sq / e);
}

double elstrodt_lambda0(double delta, double d) {
  if (!(d > 0.0)) throw PreconditionError("dimension d must be positive");
  if (!(delta >= 0.0 && delta <= d)) throw PreconditionError("delta must lie in [0, d]");
  if (delta <= d / 2.0) return d * d / 4.0;
  return delta * (d - delta);
}

namespace {

// Power iteration for the lazy operator (I + P) / 2 applied by `apply`;
// returns the top eigenvalue of P.
template <class Apply>
PowerIterationResult lazy_power(std::size_t size, Apply&& apply, double tol,
                                std::size_t max_iterations) {
  std::vector<double> x(size, 1.0);
  std::vector<double> y(size, 0.0);
  PowerIterationResult r;
  double prev = 0.0;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    apply(x, y);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      y[i] = 0.5 * (x[i] + y[i]);
      num += y[i];
      den += x[i];
    }
    const double lambda = num / den;
    double top = 0.0;
    for (double v : y) top = std::max(top, v);
    for (std::size_t i = 0; i < size; ++i) x[i] = y[i] / top;
    r.iterations = it;
    r.change = std::abs(lambda - prev);
    prev = lambda;
    if (it > 1 && r.change <= tol) break;
  }
  r.value = 2.0 * prev - 1.0;
  return r;
}

void check_tree(int k, std::size_t depth) {
  if (k < 1) throw PreconditionError("rank k must be >= 1");
  if (depth < 1) throw PreconditionError("depth must be >= 1");
}

}  // namespace

PowerIterationResult tree_radial_power_iteration(int k, std::size_t depth, double tol,
                                                 std::size_t max_iterations) {
  check_tree(k, depth);
  const double deg = 2.0 * k;
  // Symmetrised radial operator: layer weights make it self-adjoint, so the
  // eigenvalues match the tree operator restricted to radial functions.
  // Off-diagonal between layers r and r+1: sqrt(P(r->r+1) P(r+1->r)).
  const std::size_t n = depth + 1;
  std::vector<double> off(depth, 0.0);
  for (std::size_t r = 0; r < depth; ++r) {
    const double up = r == 0 ? 1.0 : (deg - 1.0) / deg;
    off[r] = std::sqrt(up / deg);
  }
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t r = 0; r < n; ++r) {
      double v = 0.0;
      if (r > 0) v += off[r - 1] * x[r - 1];
      if (r + 1 < n) v += off[r] * x[r + 1];
      y[r] = v;
    }
  };
  return lazy_power(n, apply, tol, max_iterations);
}

PowerIterationResult tree_explicit_power_iteration(int k, std::size_t depth, double tol,
                                                   std::size_t max_iterations) {
  check_tree(k, depth);
  const int deg = 2 * k;
  // Vertices in BFS order; parent[v] and children ranges.
  std::vector<std::size_t> parent{0};
  std::vector<std::size_t> first_child;
  std::vector<std::size_t> child_count;
  std::vector<std::size_t> level{0};
  for (std::size_t v = 0; v < parent.size(); ++v) {
    const std::size_t children = level[v] == depth ? 0 : (v == 0 ? deg : deg - 1);
    first_child.push_back(parent.size());
    child_count.push_back(children);
    for (std::size_t c = 0; c < children; ++c) {
      parent.push_back(v);
      level.push_back(level[v] + 1);
    }
    if (parent.size() > 50'000'000) throw BudgetError("explicit tree too large", parent.size());
  }
  const std::size_t n = parent.size();
  const double w = 1.0 / deg;
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t v = 0; v < n; ++v) {
      double s = v == 0 ? 0.0 : x[parent[v]];
      for (std::size_t c = 0; c < child_count[v]; ++c) s += x[first_child[v] + c];
      y[v] = w * s;
    }
  };
  return lazy_power(n, apply, tol, max_iterations);
}

}  // namespace cogrowth
