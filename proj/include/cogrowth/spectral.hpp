#pragma once

// Spectral bridges: the cogrowth formula for the walk spectral radius of a
// Schreier graph, the Elstrodt-Patterson-Sullivan relation, and power
// iterations on truncated regular trees.

#include <cstddef>

namespace cogrowth {

/// Spectral radius of simple random walk on the Schreier graph H\T_{2k} for
/// a subgroup with cogrowth exponent delta in [0, log(2k-1)].
double grigorchuk_rho(double delta, int k);

/// lambda_0 = d^2 / 4 for delta <= d / 2, else delta (d - delta).
double elstrodt_lambda0(double delta, double d);

struct PowerIterationResult {
  double value = 0.0;
  std::size_t iterations = 0;
  double change = 0.0;  // last change in the estimate
};

/// Largest eigenvalue of the simple-walk operator on the ball of radius
/// `depth` in the 2k-regular tree (Dirichlet outside), computed on the radial
/// quotient (layers 0..depth). Power iteration on the lazy operator.
PowerIterationResult tree_radial_power_iteration(int k, std::size_t depth, double tol = 1e-13,
                                                 std::size_t max_iterations = 1000000);

/// Same quantity on the explicit truncated tree (every vertex materialised).
PowerIterationResult tree_explicit_power_iteration(int k, std::size_t depth, double tol = 1e-13,
                                                   std::size_t max_iterations = 1000000);

}  // namespace cogrowth
