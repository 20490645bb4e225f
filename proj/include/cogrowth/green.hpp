#pragma once

// First-passage probabilities F(e, g), the Green function G(e, e), and ball
// sums of F for random walks on F_k.
//
// Nearest-neighbour walks use the time-indexed first-passage recursion on the
// tree: to reach x from e the walk either steps onto x, or steps to some y and
// must first come back to e (law f_{y^-1}) before reaching x (law f_x). Laws
// are exact up to the horizon; the remaining mass is estimated from the
// geometric decay of the last terms. Other measures fall back to an explicit
// taboo dynamic programme over reduced words in a growing ball.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cogrowth/step_distribution.hpp"

namespace cogrowth {

struct GreenEstimate {
  /// Probability of reaching the target within the horizon (for the identity
  /// target: of returning to e within the horizon).
  double value = 0.0;
  /// log(value); -inf when the target is unreachable.
  double log_value = 0.0;
  std::size_t horizon = 0;
  /// Estimated mass beyond the horizon, from the geometric decay of the last
  /// terms of the first-passage law. +inf when no decay is visible.
  double tail_bound = 0.0;
  std::string method;

  /// value + tail_bound, clamped to [0, 1].
  double extrapolated() const;
};

/// Distribution of a first-passage time truncated at a horizon.
struct PassageLaw {
  std::vector<double> pmf;  // pmf[t], t = 0..horizon
  double mass = 0.0;        // sum of pmf
  double tail = 0.0;        // geometric tail estimate
};

/// Geometric extrapolation of the mass beyond pmf.back(). Pairs consecutive
/// terms so that period-2 laws (bipartite walks) are handled.
double geometric_tail(std::span<const double> pmf);

/// A system of first-passage equations on a tree-like group:
///   f_x(t) = direct_x [t = 1] + hold_x f_x(t-1) + sum_j coef_j (f_{via_j} * f_x)(t-1)
class FirstPassageSystem {
 public:
  struct Term {
    double coef;
    int via;
  };
  struct Equation {
    double direct = 0.0;
    double hold = 0.0;
    std::vector<Term> terms;
  };

  explicit FirstPassageSystem(std::vector<Equation> equations);

  std::vector<PassageLaw> solve(std::size_t horizon) const;

 private:
  std::vector<Equation> equations_;
};

/// Precomputed single-letter first-passage laws for a nearest-neighbour measure.
class GreenKernel {
 public:
  /// Throws PreconditionError unless mu has nearest-neighbour support.
  GreenKernel(const StepDistribution& mu, std::size_t horizon);

  std::size_t horizon() const noexcept { return horizon_; }
  const PassageLaw& letter_law(int letter_index) const { return laws_[static_cast<std::size_t>(letter_index)]; }
  /// log F_x truncated at the horizon, per letter index (-inf if unreachable).
  double log_letter(int letter_index) const noexcept {
    return log_letter_[static_cast<std::size_t>(letter_index)];
  }

  /// sum of log F(e, x) over the letters x of g. F is multiplicative along
  /// geodesics of the tree, each factor truncated at the horizon.
  double log_first_passage(const Word& g) const noexcept;

  /// F(e, g) for g != e, U = return probability for g = e.
  GreenEstimate first_return(const Word& target) const;

 private:
  std::size_t horizon_;
  std::vector<PassageLaw> laws_;
  std::vector<double> log_letter_;
  PassageLaw return_law_;
};

/// F(e, target) within `horizon` steps (target = e gives the return probability
/// U). Nearest-neighbour measures use GreenKernel; others use ball_first_passage.
GreenEstimate first_return_F(const StepDistribution& mu, const Word& target, std::size_t horizon);

/// Taboo dynamic programme over reduced words: exact probability of hitting
/// `target` (or returning to e) within `horizon` steps, for any finitely
/// supported measure. Throws BudgetError when the live support exceeds `budget`.
GreenEstimate ball_first_passage(const StepDistribution& mu, const Word& target,
                                 std::size_t horizon, std::uint64_t budget);

/// G(e, e) = 1 / (1 - U), with U extrapolated past the horizon.
GreenEstimate green_identity(const StepDistribution& mu, std::size_t horizon);

struct AnnulusGreenSum {
  std::vector<double> partial_sums;  // partial_sums[j] = sum over |g| <= j of F(e, g)
  std::vector<double> ratios;        // ratios[j] = partial_sums[j] / partial_sums[j-1], ratios[0] = 1
  double value() const { return partial_sums.back(); }
};

/// sum_{|g| <= n} F(e, g) by ball enumeration, with the growth-ratio sequence.
AnnulusGreenSum annulus_green_sum(const StepDistribution& mu, std::size_t n,
                                  std::size_t f_horizon, std::uint64_t budget);

}  // namespace cogrowth
