#include "cogrowth/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "cogrowth/errors.hpp"
#include "cogrowth/green.hpp"
#include "cogrowth/parallel.hpp"
#include "cogrowth/walk.hpp"

namespace cogrowth {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
  MeanSe r;
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return r;
}

void check_walk_config(const WalkConfig& cfg) {
  if (cfg.horizon < 100) throw PreconditionError("horizon n must be >= 100");
  if (cfg.paths < 10) throw PreconditionError("path count m must be >= 10");
}

// Reduced words packed into 64 bits: top 6 bits hold the length, the low 58
// bits hold letter indices in base 2k, position i at weight (2k)^i.
class PackedWords {
 public:
  explicit PackedWords(FreeGroupRank rank) : base_(static_cast<std::uint64_t>(rank.letters())) {
    std::uint64_t p = 1;
    pow_.push_back(1);
    while (p <= (kDigitMask / base_)) {
      p *= base_;
      pow_.push_back(p);
    }
    // Words of length L need (2k)^L <= 2^58.
    max_length_ = pow_.size() - 1;
  }

  std::size_t max_length() const noexcept { return max_length_; }

  static std::uint64_t length(std::uint64_t key) noexcept { return key >> 58; }

  std::uint64_t multiply(std::uint64_t key, std::span<const Letter> letters) const noexcept {
    std::uint64_t len = length(key);
    std::uint64_t digits = key & kDigitMask;
    for (Letter x : letters) {
      const std::uint64_t li = static_cast<std::uint64_t>(letter_index(x));
      if (len > 0) {
        const std::uint64_t last = (digits / pow_[len - 1]) % base_;
        if (last == (li ^ 1u)) {
          digits -= last * pow_[len - 1];
          --len;
          continue;
        }
      }
      digits += li * pow_[len];
      ++len;
    }
    return (len << 58) | digits;
  }

 private:
  static constexpr std::uint64_t kDigitMask = (std::uint64_t{1} << 58) - 1;
  std::uint64_t base_;
  std::vector<std::uint64_t> pow_;
  std::size_t max_length_ = 0;
};

// Least-squares fit of H_n against the given basis on the trailing points;
// returns the coefficient of n.
double fit_slope(const std::vector<double>& entropy, std::size_t points, bool with_inverse) {
  const std::size_t n_max = entropy.size();
  const int cols = with_inverse ? 4 : 3;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(points), cols);
  Eigen::VectorXd y(static_cast<Eigen::Index>(points));
  for (std::size_t r = 0; r < points; ++r) {
    const double n = static_cast<double>(n_max - points + r + 1);
    const auto row = static_cast<Eigen::Index>(r);
    x(row, 0) = n;
    x(row, 1) = std::log(n);
    x(row, 2) = 1.0;
    if (with_inverse) x(row, 3) = 1.0 / n;
    y(row) = entropy[n_max - points + r];
  }
  const Eigen::VectorXd coef = x.colPivHouseholderQr().solve(y);
  return coef(0);
}

}  // namespace

EstimatorReport drift_estimate(const StepDistribution& mu, const WalkConfig& cfg) {
  check_walk_config(cfg);
  const auto samples = parallel_map<double>(cfg.paths, cfg.workers, [&](std::size_t j) {
    WalkCursor cursor(mu, cfg.rng, j);
    for (std::size_t i = 0; i < cfg.horizon; ++i) cursor.step();
    return static_cast<double>(cursor.position().length()) / static_cast<double>(cfg.horizon);
  });
  const MeanSe ms = mean_and_se(samples);
  return {ms.mean, ms.se, cfg.paths, cfg.horizon, cfg.rng, "monte-carlo:word-length"};
}

std::size_t entropy_horizon_for(const StepDistribution& mu, std::uint64_t max_states,
                                std::size_t cap) {
  const PackedWords packed(mu.rank());
  std::size_t best = 0;
  for (std::size_t n = 1; n <= cap; ++n) {
    const std::size_t reach = n * std::max<std::size_t>(mu.max_atom_length(), 1);
    if (reach > packed.max_length() || ball_size(mu.rank(), reach) > max_states) break;
    best = n;
  }
  return best;
}

EntropyResult entropy_exact(const StepDistribution& mu, std::size_t n_max,
                            std::uint64_t max_states) {
  if (n_max < 1) throw PreconditionError("entropy_exact: n_max must be >= 1");
  const PackedWords packed(mu.rank());
  const std::size_t reach = n_max * std::max<std::size_t>(mu.max_atom_length(), 1);
  const std::uint64_t bound = ball_size(mu.rank(), reach);
  if (reach > packed.max_length() || bound > max_states) {
    throw BudgetError("support of mu^{*" + std::to_string(n_max) + "} may hold up to " +
                          std::to_string(bound) + " words (state budget " +
                          std::to_string(max_states) + ")",
                      bound);
  }

  EntropyResult out;
  std::unordered_map<std::uint64_t, double> dist{{0, 1.0}};
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::unordered_map<std::uint64_t, double> next;
    next.reserve(dist.size() * mu.atoms().size());
    for (const auto& [key, p] : dist) {
      for (const Atom& a : mu.atoms()) next[packed.multiply(key, a.word.letters())] += p * a.weight;
    }
    dist = std::move(next);
    double h = 0.0;
    for (const auto& [key, p] : dist) {
      if (p > 0.0) h -= p * std::log(p);
    }
    out.entropy.push_back(h);
    out.support.push_back(dist.size());
  }

  EstimatorReport& r = out.report;
  r.n_samples = 1;
  r.horizon = n_max;
  if (n_max >= 6) {
    out.fit_points = 5;
    r.value = fit_slope(out.entropy, 5, true);
    r.std_error = std::abs(r.value - fit_slope(out.entropy, 4, false));
    r.method = "exact-convolution:fit(n,log n,1,1/n)";
  } else {
    r.value = out.entropy.back() / static_cast<double>(n_max);
    r.std_error = 0.0;
    r.method = "exact-convolution:raw";
  }
  return out;
}

EstimatorReport green_metric_entropy(const StepDistribution& mu, const WalkConfig& cfg,
                                     std::size_t f_horizon) {
  check_walk_config(cfg);
  if (!mu.nearest_neighbour_support()) {
    throw BudgetError(
        "Green-metric entropy needs F(e, g) for long g; only nearest-neighbour measures are "
        "supported",
        0);
  }
  const GreenKernel kernel(mu, f_horizon);
  const auto samples = parallel_map<double>(cfg.paths, cfg.workers, [&](std::size_t j) {
    WalkCursor cursor(mu, cfg.rng, j);
    double log_f = 0.0;
    for (std::size_t i = 0; i < cfg.horizon; ++i) {
      cursor.step([&](Letter x) { log_f -= kernel.log_letter(letter_index(x)); },
                  [&](Letter x) { log_f += kernel.log_letter(letter_index(x)); });
    }
    // Recompute from scratch to avoid drift from long add/subtract chains.
    log_f = kernel.log_first_passage(cursor.position());
    return -log_f / static_cast<double>(cfg.horizon);
  });
  for (double s : samples) {
    if (!std::isfinite(s)) {
      throw BudgetError("F(e, omega_n) vanished at F horizon " + std::to_string(f_horizon) +
                            "; increase the horizon",
                        f_horizon);
    }
  }
  const MeanSe ms = mean_and_se(samples);
  return {ms.mean, ms.se, cfg.paths, cfg.horizon, cfg.rng,
          "green-metric:F-horizon=" + std::to_string(f_horizon)};
}

DeltaResult delta_mu(const StepDistribution& mu, const DeltaConfig& cfg) {
  DeltaResult out;
  out.growth = std::log(2.0 * mu.rank().k() - 1.0);
  out.drift = drift_estimate(mu, cfg.walk);
  if (out.drift.value <= 3.0 * out.drift.std_error || out.drift.value == 0.0) {
    throw PreconditionError("drift is consistent with zero; delta(mu) = h/l is undefined");
  }

  if (cfg.method == EntropyMethod::exact || cfg.method == EntropyMethod::both) {
    const std::size_t n_max =
        cfg.n_max > 0 ? cfg.n_max : entropy_horizon_for(mu, cfg.max_states);
    if (n_max == 0) {
      throw BudgetError("no convolution horizon fits the state budget", cfg.max_states);
    }
    EntropyResult e = entropy_exact(mu, n_max, cfg.max_states);
    e.report.seed = cfg.walk.rng;
    out.entropy.push_back(e.report);
  }
  if (cfg.method == EntropyMethod::green || cfg.method == EntropyMethod::both) {
    WalkConfig wc = cfg.walk;
    wc.rng.stream += 1;
    out.entropy.push_back(green_metric_entropy(mu, wc, cfg.f_horizon));
  }

  const double l = out.drift.value;
  const double sl = out.drift.std_error;
  for (const EstimatorReport& h : out.entropy) {
    EstimatorReport d;
    d.value = h.value / l;
    d.std_error = h.value > 0.0
                      ? d.value * std::hypot(h.std_error / h.value, sl / l)
                      : h.std_error / l;
    d.n_samples = out.drift.n_samples;
    d.horizon = out.drift.horizon;
    d.seed = cfg.walk.rng;
    d.method = "ratio:" + h.method;
    if (d.value > out.growth + 3.0 * d.std_error) out.guivarch_holds = false;
    out.delta.push_back(std::move(d));
  }
  return out;
}

}  // namespace cogrowth
