#pragma once

// Exact growth invariants of finitely generated subgroups H <= F_k, read off
// their core graphs: critical exponents, Poincare partial sums, Schreier
// systoles and confinement witnesses.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cogrowth/core_graph.hpp"
#include "cogrowth/rng.hpp"

namespace cogrowth {

/// Perron value of the non-backtracking edge operator of a core graph.
struct NBSpectrum {
  double spectral_radius = 0.0;
  std::size_t iterations = 0;
  /// Collatz-Wielandt gap (upper - lower bound) on the Perron value.
  double residual = 0.0;
  bool converged = true;
  /// Trivial subgroup: no loops at all, delta undefined.
  bool empty = false;
  std::size_t components = 0;  // nontrivial strongly connected components

  /// log(spectral_radius); -inf for the empty verdict.
  double delta() const;
};

/// delta(H) = log of the largest Perron value over the strongly connected
/// components of the non-backtracking operator. Components that are a single
/// cycle contribute 1. Power iteration on I + B from the all-ones vector.
NBSpectrum critical_exponent_fg(const CoreGraph& h, double tol = 1e-12,
                                std::size_t max_iterations = 100000);

struct BallCounts {
  std::vector<std::uint64_t> counts;  // counts[n] = #{h in H : |h| = n}
  double slope = 0.0;                 // least-squares slope of log ball sizes
  std::size_t fit_lo = 0;
  std::size_t fit_hi = 0;
};

/// Least-squares slope of log |B_n| = log sum_{m <= n} counts[m] over
/// n in [n_max / 2, n_max]. Ball sizes smooth out the parity and
/// transient oscillations of sphere counts. 0 when the ball never grows.
double log_count_slope(const std::vector<std::uint64_t>& counts, std::size_t* lo = nullptr,
                       std::size_t* hi = nullptr);

/// Exact sphere counts of H by the non-backtracking path DP on the core graph.
/// Throws BudgetError if a count overflows 64 bits.
BallCounts ball_count_oracle(const CoreGraph& h, std::size_t n_max);

enum class Verdict { diverging, converging, inconclusive };
std::string to_string(Verdict v);

struct PoincareTable {
  double s = 0.0;
  std::vector<double> partial_sums;  // j = 0..j_max, includes the identity term
  std::vector<double> ratios;        // ratios[j] = partial[j] / partial[j-1], ratios[0] = 1
  Verdict verdict = Verdict::inconclusive;
  double tail_ratio = 0.0;  // block ratio used for the verdict
};

/// Block ratio r = (last block of shell terms) / (previous block), block width
/// covering the largest gap between nonzero shells in the second half.
/// r >= 1 - 1e-9: diverging; r < 1 - 1e-6: converging; otherwise inconclusive.
PoincareTable poincare_from_log_shells(const std::vector<double>& log_shells, double s);

PoincareTable poincare_partial(const CoreGraph& h, double s, std::size_t j_max);

/// Length of the shortest nontrivial reduced loop at the basepoint of a core
/// graph, or nullopt when there is none of length <= limit.
std::optional<std::size_t> core_systole(const CoreGraph& h, int vertex, std::size_t limit);

/// Shortest nontrivial element of H^g = g^-1 H g; nullopt if it is longer
/// than 2 * search_radius.
std::optional<std::size_t> schreier_systole(const CoreGraph& h, const Word& g,
                                            std::size_t search_radius);

struct ConfinementVerdict {
  enum class Kind { confined, witness, inconclusive } kind = Kind::inconclusive;
  std::size_t threshold = 0;
  /// Witness g with systole(H^g) > T (systole nullopt means infinite).
  std::optional<Word> witness;
  std::optional<std::size_t> witness_systole;
  /// Finite index: max systole over all cosets.
  std::optional<std::size_t> bound;
  std::size_t cosets_examined = 0;
  std::string note;
};
std::string to_string(ConfinementVerdict::Kind k);

/// Finite index: sweeps every coset and certifies the exact systole bound.
/// Infinite index: a coset at depth d on a hair rooted at core vertex v has
/// systole 2d + systole(v); picks the shallowest such witness and re-checks it
/// with schreier_systole. Graphs with more than `budget` vertices are
/// inconclusive.
ConfinementVerdict confinement_probe(const CoreGraph& h, std::size_t threshold,
                                     std::uint64_t budget);

struct SemicontinuityResult {
  std::vector<double> deltas;
  double limit_delta = 0.0;
  double liminf = 0.0;  // min over the second half of the sequence
  bool holds = false;
};

/// liminf delta(H_n) >= delta(H_limit) - tol.
SemicontinuityResult delta_semicontinuity_check(const std::vector<CoreGraph>& sequence,
                                                const CoreGraph& limit, double tol = 1e-9);

/// Random generating set: `gens` reduced words with lengths uniform in
/// [1, max_length], drawn from the given stream.
std::vector<Word> random_generators(FreeGroupRank rank, std::size_t gens, std::size_t max_length,
                                    RngState rng, std::uint64_t substream);

}  // namespace cogrowth
