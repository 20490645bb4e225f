#pragma once

// Stationary random subgroup experiments: Cesaro conjugation sampling, visit
// frequencies of Delta^{omega_i} cap V != {} along the walk, and the pipeline
// comparing delta(Delta) with delta(mu) / 2.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cogrowth/core_graph.hpp"
#include "cogrowth/estimators.hpp"
#include "cogrowth/subgroup.hpp"

namespace cogrowth {

/// Finite set V of nontrivial words.
struct VisitWindow {
  std::vector<Word> words;
  std::size_t max_length = 0;

  /// All nontrivial words of length <= radius.
  static VisitWindow ball(FreeGroupRank rank, std::size_t radius);
  /// Throws PreconditionError on an empty list or the identity.
  static VisitWindow list(std::vector<Word> words);
};

struct CesaroDraw {
  CoreGraph graph;
  std::size_t steps = 0;  // i, uniform in [1, N]
  Word conjugator;        // g = omega_i
};

/// Draws i uniform in [1, N], walks i steps to g and returns g^-1 H g.
/// Uses substream `substream` of rng.
CesaroDraw cesaro_sample(const CoreGraph& base, const StepDistribution& mu, std::size_t cesaro_n,
                         RngState rng, std::uint64_t substream);

/// Decides Delta^g cap V != {} (i.e. g v g^-1 in Delta for some v in V) for
/// walk positions maintained letter by letter.
class WindowTester {
 public:
  WindowTester(const CoreGraph& delta, const VisitWindow& v);
  /// g is the current position; tracker has read g from the basepoint.
  bool meets(const Word& g, const ReadTracker& tracker) const;
  bool meets(const Word& g) const;

 private:
  const CoreGraph* delta_;
  const VisitWindow* window_;
  std::vector<char> loop_at_;  // some v in V is a loop at this vertex
};

struct FrequencyReport {
  double frequency = 0.0;  // mean over paths
  double std_error = 0.0;
  std::size_t steps = 0;
  std::size_t paths = 0;
  /// running[i-1] = mean over paths of the frequency over the first i steps.
  std::vector<double> running;
};

FrequencyReport visit_frequency(const CoreGraph& delta, const VisitWindow& v,
                                const StepDistribution& mu, std::size_t steps, std::size_t paths,
                                RngState rng, int workers = 1);

struct SrsConfig {
  std::size_t steps = 2000;
  std::size_t paths = 20;
  RngState rng;
  int workers = 1;
  /// delta(mu) estimate and its standard error.
  double delta_mu = 0.0;
  double delta_mu_se = 0.0;
  /// Radius of the ball over which W_Delta is enumerated.
  std::size_t w_radius = 8;
  /// Radius for the Poincare partial sums of Delta.
  std::size_t poincare_radius = 60;
  /// Visit frequency needed to count as positive evidence.
  double frequency_gate = 0.05;
};

struct SrsReport {
  FrequencyReport frequency;
  bool hypothesis_evidence = false;  // frequency >= gate
  PoincareTable w_poincare;          // W_Delta at s = delta_mu
  std::vector<std::uint64_t> w_shells;
  bool w_complete = true;  // false when the W ball enumeration hit the budget
  PoincareTable delta_poincare;      // Delta at s = max(0, delta_mu / 2 - 3 se)
  NBSpectrum spectrum;
  double delta = 0.0;                // delta(Delta)
  bool delta_check = false;          // delta(Delta) > max(0, delta_mu / 2 - 3 se)
  /// "pass", "hypothesis-failed" or "fail".
  std::string verdict;
};

/// pass: delta_check holds and P_Delta diverges at the same lower bound.
/// hypothesis-failed: no positive visit-frequency evidence and delta_check
/// does not hold (the theorem says nothing). fail: positive evidence but
/// delta_check fails, or delta_check holds with a converging Poincare series.
SrsReport srs_delta_experiment(const CoreGraph& delta, const StepDistribution& mu,
                               const VisitWindow& v, const SrsConfig& cfg);

struct ConjugacyBoundRow {
  std::size_t r = 0;
  std::uint64_t lhs = 0;  // #{g : |g| <= R, |g gamma g^-1| <= R}
  std::uint64_t rhs = 0;  // #{g : |g| <= (R - |gamma|) / 2}
  bool holds = false;
};

/// Exhaustive over the ball of radius r_max; the left side is truncated to
/// |g| <= R, which keeps it finite and still dominates the right side.
std::vector<ConjugacyBoundRow> conjugacy_growth_bound_check(const Word& gamma, std::size_t r_max,
                                                            std::uint64_t budget);

}  // namespace cogrowth
