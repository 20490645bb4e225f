#pragma once

// Thick annuli A_i = {g : i - i^q <= |g| <= i}, first hitting times and
// hitting measures, and the visited-set Poincare sums.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cogrowth/core_graph.hpp"
#include "cogrowth/estimators.hpp"
#include "cogrowth/walk.hpp"

namespace cogrowth {

inline constexpr double kDefaultThickness = 1.0 / 3.0;

struct AnnulusSpec {
  std::size_t i = 1;
  double q = kDefaultThickness;

  /// Throws PreconditionError unless i >= 1 and 0 < q < 1.
  void validate() const;
  std::size_t lower() const;  // max(0, ceil(i - i^q))
  std::size_t upper() const noexcept { return i; }
  bool contains(std::size_t length) const { return length >= lower() && length <= i; }
};

struct HittingSample {
  AnnulusSpec annulus;
  bool censored = true;
  std::size_t tau = 0;  // meaningful only when !censored
  Word point{FreeGroupRank(2)};
};

struct HittingMeasureEstimate {
  AnnulusSpec annulus;
  std::unordered_map<Word, std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t censored = 0;

  void add(const HittingSample& s);
  void merge(const HittingMeasureEstimate& other);
  double probability(const Word& g) const;
};

/// Minimal n >= 1 with |omega_n| in the window, or censored.
HittingSample first_hitting_time(const SamplePath& path, const AnnulusSpec& spec);

struct HittingConfig {
  std::size_t paths = 500;
  RngState rng;
  int workers = 1;
  double q = kDefaultThickness;
  /// Step cap per i is ceil(horizon_factor * i / l_lower); l_lower comes from
  /// a pilot drift run unless drift_lower > 0 is given.
  double horizon_factor = 8.0;
  double drift_lower = 0.0;
};

struct HittingRatioRow {
  std::size_t i = 0;
  double q = 0.0;
  EstimatorReport ratio;  // mean of tau_i / i over hit paths
  double censored_fraction = 0.0;
  std::size_t cap = 0;
  bool valid = true;       // censored fraction < 10%
  bool within_target = true;  // censored fraction < 1%
};

/// Lower bound for the drift used to size step caps.
double pilot_drift_lower(const StepDistribution& mu, const HittingConfig& cfg);

std::vector<HittingRatioRow> hitting_ratio_experiment(const StepDistribution& mu,
                                                      const std::vector<std::size_t>& i_list,
                                                      const HittingConfig& cfg);

struct TanakaRow {
  std::size_t i = 0;
  std::string observable;  // "green-surrogate" or "direct-top-atom"
  EstimatorReport estimate;
};

/// Per i: mean of -log F(e, omega_{tau_i}) / i; for i <= direct_max_i also
/// -log nu_hat_i(g) / i at the most frequently hit point g.
std::vector<TanakaRow> tanaka_pointwise_experiment(const StepDistribution& mu,
                                                   const std::vector<std::size_t>& i_list,
                                                   const HittingConfig& cfg,
                                                   std::size_t f_horizon,
                                                   std::size_t direct_max_i = 6);

struct SupportCountResult {
  std::size_t i = 0;
  double epsilon = 0.0;
  std::size_t count = 0;     // hit points needed to cover epsilon of the mass
  std::size_t distinct = 0;  // distinct hit points
  std::uint64_t total = 0;
  std::uint64_t censored = 0;
  double delta_hat = 0.0;
  double constant = 0.0;         // C in the check
  double threshold = 0.0;        // C e^{i delta_hat}
  double calibrated_constant = 0.0;  // count / e^{i delta_hat}
  bool passes = false;
  bool degenerate = false;  // mu does not generate
};

/// Empirical hitting measure of A_i from cfg.paths walks; smallest set of top
/// atoms covering epsilon of the mass. Refuses with BudgetError when
/// m < 100 e^{i delta_hat}.
SupportCountResult hitting_support_count(const StepDistribution& mu, std::size_t i,
                                         double epsilon, double delta_hat,
                                         const HittingConfig& cfg, double constant = 0.01);

/// A set W of group elements with exact per-length counts where available.
class WordSet {
 public:
  virtual ~WordSet() = default;
  virtual bool contains(const Word& g) const = 0;
  /// log #{g in W : |g| = n} for n = 0..n_max, or nullopt if only membership
  /// is available.
  virtual std::optional<std::vector<double>> log_shell_counts(std::size_t n_max) const {
    (void)n_max;
    return std::nullopt;
  }
  virtual std::string describe() const = 0;

  /// Membership of a walk position maintained letter by letter.
  class Tracker {
   public:
    virtual ~Tracker() = default;
    virtual void push(Letter x) = 0;
    virtual void pop() = 0;
    virtual bool inside() const = 0;
  };
  /// Default: keeps the word and calls contains().
  virtual std::unique_ptr<Tracker> tracker(FreeGroupRank rank) const;
};

/// Parses `all`, `none`, `subgroup:<core-graph file>`, `axis:<word>`,
/// `mod-length:<r>,<m>`.
std::unique_ptr<WordSet> parse_word_set(FreeGroupRank rank, const std::string& spec);
std::unique_ptr<WordSet> all_words(FreeGroupRank rank);
std::unique_ptr<WordSet> subgroup_words(CoreGraph h);
std::unique_ptr<WordSet> axis_words(Word w);
std::unique_ptr<WordSet> mod_length_words(FreeGroupRank rank, std::size_t r, std::size_t m);
std::unique_ptr<WordSet> no_words();

/// log #{g in W : |g| = n}, exact when available, else by enumeration.
std::vector<double> shell_log_counts(const WordSet& w, FreeGroupRank rank, std::size_t n_max,
                                     std::uint64_t budget);

/// partial[j] = sum over nontrivial g in W with |g| <= j of e^{-s|g|}.
std::vector<double> visited_set_poincare(const WordSet& w, FreeGroupRank rank, std::size_t j_max,
                                         double s, std::uint64_t budget);

struct VisitStatistics {
  EstimatorReport visit_frequency;    // (1/n) sum 1_W(omega_t)
  EstimatorReport hitting_frequency;  // fraction of i in i_list with omega_{tau_i} in W
};

VisitStatistics visit_statistics(const StepDistribution& mu, const WordSet& w,
                                 std::size_t horizon, const std::vector<std::size_t>& i_list,
                                 const HittingConfig& cfg);

/// A weight S(g) depending only on |g|, held as log S.
struct RadialWeight {
  enum class Kind { one, harmonic, poly, exp } kind = Kind::one;
  double param = 0.0;
  double log_weight(std::size_t n) const;
  std::string describe() const;
};

/// `one`, `harmonic` (1 / (1 + n)), `poly:<p>` ((1 + n)^p), `exp:<c>` (e^{c n}).
RadialWeight parse_radial_weight(const std::string& spec);

struct WeightedPoincareResult {
  std::vector<double> values;       // values[i-1], i = 1..i_max
  std::vector<double> running_max;
  bool bounded_away = false;  // running max over the second half does not decay
  double subexp_fail_fraction = 0.0;
  bool hypothesis_violation = false;  // > 1% of sampled paths fail
};

/// i -> e^{-(delta_hat - a) i} sum_{g in W cap A_i} S(g). Subexponential check:
/// a path fails when |log S(omega_n)| / n > subexp_tol at n = check_horizon.
WeightedPoincareResult weighted_visited_poincare(const StepDistribution& mu, const WordSet& w,
                                                 const RadialWeight& s, std::size_t i_max,
                                                 double a, double delta_hat, double q,
                                                 const HittingConfig& cfg,
                                                 std::size_t check_horizon = 2000,
                                                 double subexp_tol = 0.05);

}  // namespace cogrowth
