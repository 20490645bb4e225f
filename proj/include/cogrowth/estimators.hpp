#pragma once

// Monte Carlo and exact estimators for the drift l(mu), the asymptotic entropy
// h(mu) and delta(mu) = h(mu) / l(mu).

#include <cstddef>
#include <string>
#include <vector>

#include "cogrowth/rng.hpp"
#include "cogrowth/step_distribution.hpp"

namespace cogrowth {

struct EstimatorReport {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::size_t horizon = 0;
  RngState seed;
  std::string method;
};

struct WalkConfig {
  std::size_t horizon = 2000;  // n
  std::size_t paths = 2000;    // m
  RngState rng;
  int workers = 1;
};

/// Mean of |omega_n| / n over m paths; std_error = sample sd / sqrt(m).
/// Path j uses substream j of cfg.rng. Requires n >= 100, m >= 10.
EstimatorReport drift_estimate(const StepDistribution& mu, const WalkConfig& cfg);

struct EntropyResult {
  EstimatorReport report;
  /// entropy[n-1] = H(mu^{*n}), n = 1..n_max.
  std::vector<double> entropy;
  /// Support size of mu^{*n}.
  std::vector<std::size_t> support;
  /// Number of trailing points used by the asymptotic fit.
  std::size_t fit_points = 0;
};

/// Largest n <= cap whose convolution support bound fits in max_states.
std::size_t entropy_horizon_for(const StepDistribution& mu, std::uint64_t max_states,
                                std::size_t cap = 12);

/// H(mu^{*n}) for n = 1..n_max by exact convolution over reduced words, then
/// h = lim H_n / n from a least-squares fit H_n ~ h n + c log n + d + e / n on
/// the last five points. std_error is the spread against the fit without the
/// 1/n term. Throws BudgetError when the support would exceed max_states.
EntropyResult entropy_exact(const StepDistribution& mu, std::size_t n_max,
                            std::uint64_t max_states = 4'000'000);

/// Mean of -log F(e, omega_n) / n (F truncated per letter at f_horizon),
/// i.e. the drift in the Green metric. Nearest-neighbour measures only.
EstimatorReport green_metric_entropy(const StepDistribution& mu, const WalkConfig& cfg,
                                     std::size_t f_horizon);

enum class EntropyMethod { exact, green, both };

struct DeltaConfig {
  WalkConfig walk;
  EntropyMethod method = EntropyMethod::exact;
  std::size_t n_max = 0;  // 0: pick with entropy_horizon_for
  std::size_t f_horizon = 200;
  std::uint64_t max_states = 4'000'000;
};

struct DeltaResult {
  EstimatorReport drift;
  std::vector<EstimatorReport> entropy;  // one per method used
  std::vector<EstimatorReport> delta;    // delta for each entropy report
  /// Upper bound from the fundamental inequality: log(2k-1).
  double growth = 0.0;
  /// Every delta satisfies delta <= growth + 3 std_error.
  bool guivarch_holds = true;

  const EstimatorReport& primary() const { return delta.front(); }
};

/// delta(mu) = h / l with first-order error propagation. The drift uses stream
/// cfg.rng.stream, the Green-metric entropy stream + 1, so the two estimates
/// are independent. Throws PreconditionError when the drift is consistent
/// with zero.
DeltaResult delta_mu(const StepDistribution& mu, const DeltaConfig& cfg);

}  // namespace cogrowth
