#include "cogrowth/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "cogrowth/errors.hpp"
#include "cogrowth/green.hpp"
#include "cogrowth/parallel.hpp"

namespace cogrowth {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
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

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// One walk run until every annulus in `specs` is hit or its cap passes.
// Hits are reported through on_hit(index, tau, position).
template <class OnHit>
void run_until_hit(const StepDistribution& mu, RngState rng, std::uint64_t substream,
                   const std::vector<AnnulusSpec>& specs, const std::vector<std::size_t>& caps,
                   OnHit&& on_hit) {
  const std::size_t horizon = *std::max_element(caps.begin(), caps.end());
  std::vector<char> done(specs.size(), 0);
  std::size_t remaining = specs.size();
  WalkCursor cursor(mu, rng, substream);
  for (std::size_t t = 1; t <= horizon && remaining > 0; ++t) {
    cursor.step();
    const std::size_t len = cursor.position().length();
    for (std::size_t s = 0; s < specs.size(); ++s) {
      if (done[s]) continue;
      if (t > caps[s]) {
        done[s] = 1;
        --remaining;
      } else if (specs[s].contains(len)) {
        done[s] = 1;
        --remaining;
        on_hit(s, t, cursor.position());
      }
    }
  }
}

std::vector<AnnulusSpec> make_specs(const std::vector<std::size_t>& i_list, double q) {
  if (i_list.empty()) throw PreconditionError("i_list must be nonempty");
  std::vector<AnnulusSpec> specs;
  for (std::size_t i : i_list) {
    AnnulusSpec a{i, q};
    a.validate();
    specs.push_back(a);
  }
  return specs;
}

std::vector<std::size_t> make_caps(const std::vector<AnnulusSpec>& specs, double factor,
                                   double drift_lower) {
  std::vector<std::size_t> caps;
  for (const auto& a : specs) {
    caps.push_back(static_cast<std::size_t>(std::ceil(factor * static_cast<double>(a.i) / drift_lower)));
  }
  return caps;
}

void check_hitting_config(const HittingConfig& cfg) {
  if (cfg.paths < 1) throw PreconditionError("paths must be >= 1");
  if (!(cfg.q > 0.0 && cfg.q < 1.0)) throw PreconditionError("q must lie in (0, 1)");
  if (!(cfg.horizon_factor >= 1.0)) throw PreconditionError("horizon_factor must be >= 1");
}

// Length-only membership.
class LengthTracker final : public WordSet::Tracker {
 public:
  explicit LengthTracker(std::function<bool(std::size_t)> pred) : pred_(std::move(pred)) {}
  void push(Letter) override { ++len_; }
  void pop() override { --len_; }
  bool inside() const override { return pred_(len_); }

 private:
  std::function<bool(std::size_t)> pred_;
  std::size_t len_ = 0;
};

class GenericTracker final : public WordSet::Tracker {
 public:
  GenericTracker(const WordSet& w, FreeGroupRank rank) : set_(&w), word_(rank) {}
  void push(Letter x) override { word_.push_reduced(x); }
  void pop() override { word_.pop(); }
  bool inside() const override { return set_->contains(word_); }

 private:
  const WordSet* set_;
  Word word_;
};

class AllWords final : public WordSet {
 public:
  explicit AllWords(FreeGroupRank rank) : rank_(rank) {}
  bool contains(const Word&) const override { return true; }
  std::optional<std::vector<double>> log_shell_counts(std::size_t n_max) const override {
    std::vector<double> out(n_max + 1, 0.0);
    const double l0 = std::log(static_cast<double>(rank_.letters()));
    const double l1 = std::log(static_cast<double>(rank_.letters() - 1));
    for (std::size_t n = 1; n <= n_max; ++n) out[n] = l0 + static_cast<double>(n - 1) * l1;
    return out;
  }
  std::string describe() const override { return "all"; }
  std::unique_ptr<Tracker> tracker(FreeGroupRank) const override {
    return std::make_unique<LengthTracker>([](std::size_t) { return true; });
  }

 private:
  FreeGroupRank rank_;
};

class NoWords final : public WordSet {
 public:
  bool contains(const Word&) const override { return false; }
  std::optional<std::vector<double>> log_shell_counts(std::size_t n_max) const override {
    return std::vector<double>(n_max + 1, kNegInf);
  }
  std::string describe() const override { return "none"; }
  std::unique_ptr<Tracker> tracker(FreeGroupRank) const override {
    return std::make_unique<LengthTracker>([](std::size_t) { return false; });
  }
};

class SubgroupWords final : public WordSet {
 public:
  SubgroupWords(CoreGraph h, std::string label) : h_(std::move(h)), label_(std::move(label)) {}
  bool contains(const Word& g) const override { return membership(h_, g); }
  std::optional<std::vector<double>> log_shell_counts(std::size_t n_max) const override {
    return log_loop_counts(h_, n_max);
  }
  std::string describe() const override { return label_; }

  class Reader final : public Tracker {
   public:
    explicit Reader(const CoreGraph& h) : reader_(h) {}
    void push(Letter x) override { reader_.push(x); }
    void pop() override { reader_.pop(); }
    bool inside() const override { return reader_.at_basepoint(); }

   private:
    ReadTracker reader_;
  };
  std::unique_ptr<Tracker> tracker(FreeGroupRank) const override {
    return std::make_unique<Reader>(h_);
  }

 private:
  CoreGraph h_;
  std::string label_;
};

class ModLengthWords final : public WordSet {
 public:
  ModLengthWords(FreeGroupRank rank, std::size_t r, std::size_t m) : rank_(rank), r_(r), m_(m) {}
  bool contains(const Word& g) const override { return g.length() % m_ == r_; }
  std::optional<std::vector<double>> log_shell_counts(std::size_t n_max) const override {
    auto all = AllWords(rank_).log_shell_counts(n_max);
    for (std::size_t n = 0; n <= n_max; ++n) {
      if (n % m_ != r_) (*all)[n] = kNegInf;
    }
    return all;
  }
  std::string describe() const override {
    return "mod-length:" + std::to_string(r_) + "," + std::to_string(m_);
  }
  std::unique_ptr<Tracker> tracker(FreeGroupRank) const override {
    const std::size_t r = r_;
    const std::size_t m = m_;
    return std::make_unique<LengthTracker>([r, m](std::size_t len) { return len % m == r; });
  }

 private:
  FreeGroupRank rank_;
  std::size_t r_;
  std::size_t m_;
};

std::size_t parse_size(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) throw PreconditionError(what + ": expected an integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) throw PreconditionError(what + ": expected a number, got '" + text + "'");
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

void AnnulusSpec::validate() const {
  if (i < 1) throw PreconditionError("annulus radius i must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw PreconditionError("annulus exponent q must lie in (0, 1)");
}

std::size_t AnnulusSpec::lower() const {
  const double r = std::pow(static_cast<double>(i), q);
  // Smallest integer length >= i - i^q. Near-integers snap so that
  // 8^{1/3} gives 2, not 1.
  const double nearest = std::round(r);
  const auto width = static_cast<std::size_t>(std::abs(r - nearest) < 1e-9 ? nearest : std::floor(r));
  return width >= i ? 0 : i - width;
}

void HittingMeasureEstimate::add(const HittingSample& s) {
  ++total;
  if (s.censored) {
    ++censored;
  } else {
    ++counts[s.point];
  }
}

void HittingMeasureEstimate::merge(const HittingMeasureEstimate& other) {
  total += other.total;
  censored += other.censored;
  for (const auto& [g, c] : other.counts) counts[g] += c;
}

double HittingMeasureEstimate::probability(const Word& g) const {
  if (total == 0) return 0.0;
  const auto it = counts.find(g);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

HittingSample first_hitting_time(const SamplePath& path, const AnnulusSpec& spec) {
  spec.validate();
  HittingSample s;
  s.annulus = spec;
  s.point = Word(path.positions.front().rank());
  for (std::size_t n = 1; n < path.positions.size(); ++n) {
    if (spec.contains(path.lengths[n])) {
      s.censored = false;
      s.tau = n;
      s.point = path.positions[n];
      return s;
    }
  }
  return s;
}

double pilot_drift_lower(const StepDistribution& mu, const HittingConfig& cfg) {
  if (cfg.drift_lower > 0.0) return cfg.drift_lower;
  WalkConfig pilot;
  pilot.horizon = 500;
  pilot.paths = 200;
  pilot.rng = cfg.rng;
  pilot.rng.stream += 1;
  pilot.workers = cfg.workers;
  const EstimatorReport l = drift_estimate(mu, pilot);
  if (l.value <= 3.0 * l.std_error || l.value <= 1e-3) {
    throw PreconditionError("drift is consistent with zero; hitting times are not controlled");
  }
  return std::max(l.value - 3.0 * l.std_error, 0.5 * l.value);
}

std::vector<HittingRatioRow> hitting_ratio_experiment(const StepDistribution& mu,
                                                      const std::vector<std::size_t>& i_list,
                                                      const HittingConfig& cfg) {
  check_hitting_config(cfg);
  const auto specs = make_specs(i_list, cfg.q);
  const auto caps = make_caps(specs, cfg.horizon_factor, pilot_drift_lower(mu, cfg));
  constexpr double kCensored = -1.0;
  const auto per_path = parallel_map<std::vector<double>>(cfg.paths, cfg.workers, [&](std::size_t j) {
    std::vector<double> ratio(specs.size(), kCensored);
    run_until_hit(mu, cfg.rng, j, specs, caps, [&](std::size_t s, std::size_t tau, const Word&) {
      ratio[s] = static_cast<double>(tau) / static_cast<double>(specs[s].i);
    });
    return ratio;
  });

  std::vector<HittingRatioRow> rows;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    std::vector<double> hits;
    for (const auto& r : per_path) {
      if (r[s] != kCensored) hits.push_back(r[s]);
    }
    HittingRatioRow row;
    row.i = specs[s].i;
    row.q = cfg.q;
    row.cap = caps[s];
    const MeanSe ms = mean_se(hits);
    row.ratio = {ms.mean, ms.se, hits.size(), caps[s], cfg.rng, "monte-carlo:first-hitting"};
    row.censored_fraction = 1.0 - static_cast<double>(hits.size()) / static_cast<double>(cfg.paths);
    row.valid = row.censored_fraction < 0.10;
    row.within_target = row.censored_fraction < 0.01;
    rows.push_back(row);
  }
  return rows;
}

std::vector<TanakaRow> tanaka_pointwise_experiment(const StepDistribution& mu,
                                                   const std::vector<std::size_t>& i_list,
                                                   const HittingConfig& cfg,
                                                   std::size_t f_horizon,
                                                   std::size_t direct_max_i) {
  check_hitting_config(cfg);
  const auto specs = make_specs(i_list, cfg.q);
  const auto caps = make_caps(specs, cfg.horizon_factor, pilot_drift_lower(mu, cfg));
  std::optional<GreenKernel> kernel;
  if (mu.nearest_neighbour_support()) kernel.emplace(mu, f_horizon);
  const std::uint64_t budget = default_budget();

  struct PathHits {
    std::vector<double> neg_log_f;
    std::vector<std::optional<Word>> points;
  };
  const auto per_path = parallel_map<PathHits>(cfg.paths, cfg.workers, [&](std::size_t j) {
    PathHits out;
    out.neg_log_f.assign(specs.size(), std::numeric_limits<double>::quiet_NaN());
    out.points.resize(specs.size());
    run_until_hit(mu, cfg.rng, j, specs, caps, [&](std::size_t s, std::size_t, const Word& g) {
      const double log_f = kernel ? kernel->log_first_passage(g)
                                  : ball_first_passage(mu, g, f_horizon, budget).log_value;
      out.neg_log_f[s] = -log_f / static_cast<double>(specs[s].i);
      if (specs[s].i <= direct_max_i) out.points[s] = g;
    });
    return out;
  });

  std::vector<TanakaRow> rows;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    std::vector<double> vals;
    HittingMeasureEstimate est;
    est.annulus = specs[s];
    for (const auto& p : per_path) {
      if (!std::isnan(p.neg_log_f[s])) vals.push_back(p.neg_log_f[s]);
      if (specs[s].i <= direct_max_i) {
        HittingSample hs;
        hs.annulus = specs[s];
        hs.censored = !p.points[s].has_value();
        if (!hs.censored) hs.point = *p.points[s];
        else hs.point = Word(mu.rank());
        est.add(hs);
      }
    }
    for (double v : vals) {
      if (!std::isfinite(v)) {
        throw BudgetError("F(e, omega_tau) vanished at F horizon " + std::to_string(f_horizon),
                          f_horizon);
      }
    }
    const MeanSe ms = mean_se(vals);
    rows.push_back({specs[s].i, "green-surrogate",
                    {ms.mean, ms.se, vals.size(), caps[s], cfg.rng,
                     "green-surrogate:F-horizon=" + std::to_string(f_horizon)}});
    if (specs[s].i <= direct_max_i && !est.counts.empty()) {
      const Word* top = nullptr;
      std::uint64_t best = 0;
      for (const auto& [g, c] : est.counts) {
        if (c > best || (c == best && top != nullptr && g < *top)) {
          best = c;
          top = &g;
        }
      }
      const double p = static_cast<double>(best) / static_cast<double>(est.total);
      const double i = static_cast<double>(specs[s].i);
      const double se = std::sqrt((1.0 - p) / (p * static_cast<double>(est.total))) / i;
      rows.push_back({specs[s].i, "direct-top-atom",
                      {-std::log(p) / i, se, static_cast<std::size_t>(est.total), caps[s], cfg.rng,
                       "empirical-hitting-measure:" + to_string(*top)}});
    }
  }
  return rows;
}

SupportCountResult hitting_support_count(const StepDistribution& mu, std::size_t i,
                                         double epsilon, double delta_hat,
                                         const HittingConfig& cfg, double constant) {
  check_hitting_config(cfg);
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw PreconditionError("epsilon must lie in (0, 1]");
  if (!(delta_hat >= 0.0)) throw PreconditionError("delta_hat must be >= 0");
  const double scale = std::exp(static_cast<double>(i) * delta_hat);
  const double required = std::ceil(100.0 * scale);
  if (static_cast<double>(cfg.paths) < required) {
    const auto need = required >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                                         : static_cast<std::uint64_t>(required);
    throw BudgetError("hitting_support_count at i=" + std::to_string(i) + " needs m >= " +
                          std::to_string(need) + " paths, got " + std::to_string(cfg.paths),
                      need);
  }
  const auto specs = make_specs({i}, cfg.q);
  const auto caps = make_caps(specs, cfg.horizon_factor, pilot_drift_lower(mu, cfg));

  const auto samples = parallel_map<std::optional<Word>>(cfg.paths, cfg.workers, [&](std::size_t j) {
    std::optional<Word> hit;
    run_until_hit(mu, cfg.rng, j, specs, caps,
                  [&](std::size_t, std::size_t, const Word& g) { hit = g; });
    return hit;
  });
  HittingMeasureEstimate est;
  est.annulus = specs[0];
  for (const auto& s : samples) {
    HittingSample hs;
    hs.censored = !s.has_value();
    hs.point = s ? *s : Word(mu.rank());
    est.add(hs);
  }

  std::vector<std::pair<std::uint64_t, const Word*>> atoms;
  atoms.reserve(est.counts.size());
  for (const auto& [g, c] : est.counts) atoms.emplace_back(c, &g);
  std::sort(atoms.begin(), atoms.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : *x.second < *y.second;
  });

  SupportCountResult r;
  r.i = i;
  r.epsilon = epsilon;
  r.distinct = atoms.size();
  r.total = est.total;
  r.censored = est.censored;
  r.delta_hat = delta_hat;
  r.constant = constant;
  r.threshold = constant * scale;
  r.degenerate = !mu.report().generating;
  const double target = epsilon * static_cast<double>(est.total);
  double covered = 0.0;
  bool reached = false;
  for (const auto& a : atoms) {
    covered += static_cast<double>(a.first);
    ++r.count;
    if (covered >= target - 1e-9) {
      reached = true;
      break;
    }
  }
  r.calibrated_constant = static_cast<double>(r.count) / scale;
  r.passes = reached && static_cast<double>(r.count) >= r.threshold;
  return r;
}

// ---------------------------------------------------------------------------

std::unique_ptr<WordSet::Tracker> WordSet::tracker(FreeGroupRank rank) const {
  return std::make_unique<GenericTracker>(*this, rank);
}

std::unique_ptr<WordSet> all_words(FreeGroupRank rank) { return std::make_unique<AllWords>(rank); }
std::unique_ptr<WordSet> no_words() { return std::make_unique<NoWords>(); }

std::unique_ptr<WordSet> subgroup_words(CoreGraph h) {
  return std::make_unique<SubgroupWords>(std::move(h), "subgroup");
}

std::unique_ptr<WordSet> axis_words(Word w) {
  if (w.is_identity()) return no_words();
  const std::string label = "axis:" + to_string(w);
  const FreeGroupRank rank = w.rank();
  std::vector<Word> gens{std::move(w)};
  return std::make_unique<SubgroupWords>(CoreGraph::fold(rank, gens), label);
}

std::unique_ptr<WordSet> mod_length_words(FreeGroupRank rank, std::size_t r, std::size_t m) {
  if (m < 1 || r >= m) throw PreconditionError("mod-length:r,m needs m >= 1 and 0 <= r < m");
  return std::make_unique<ModLengthWords>(rank, r, m);
}

std::unique_ptr<WordSet> parse_word_set(FreeGroupRank rank, const std::string& spec) {
  if (spec == "all") return all_words(rank);
  if (spec == "none") return no_words();
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw PreconditionError("unknown W predicate '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "axis") return axis_words(parse_word(rank, arg));
  if (kind == "mod-length") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) throw PreconditionError("mod-length expects r,m");
    return mod_length_words(rank, parse_size(arg.substr(0, comma), "mod-length r"),
                            parse_size(arg.substr(comma + 1), "mod-length m"));
  }
  if (kind == "subgroup") {
    std::ifstream in(arg);
    if (!in) throw PreconditionError("cannot open core graph file '" + arg + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    CoreGraph h = parse_core_graph(ss.str());
    if (h.rank() != rank) throw PreconditionError("core graph rank does not match k");
    return std::make_unique<SubgroupWords>(std::move(h), spec);
  }
  throw PreconditionError("unknown W predicate '" + spec + "'");
}

std::vector<double> shell_log_counts(const WordSet& w, FreeGroupRank rank, std::size_t n_max,
                                     std::uint64_t budget) {
  if (auto exact = w.log_shell_counts(n_max)) return *exact;
  std::vector<double> counts(n_max + 1, 0.0);
  for_each_in_ball(rank, n_max, budget, [&](const Word& g) {
    if (w.contains(g)) counts[g.length()] += 1.0;
  });
  for (double& c : counts) c = c > 0.0 ? std::log(c) : kNegInf;
  return counts;
}

std::vector<double> visited_set_poincare(const WordSet& w, FreeGroupRank rank, std::size_t j_max,
                                         double s, std::uint64_t budget) {
  const auto log_counts = shell_log_counts(w, rank, j_max, budget);
  std::vector<double> partial(j_max + 1, 0.0);
  double acc = 0.0;
  for (std::size_t j = 1; j <= j_max; ++j) {
    if (log_counts[j] != kNegInf) acc += std::exp(log_counts[j] - s * static_cast<double>(j));
    partial[j] = acc;
  }
  return partial;
}

VisitStatistics visit_statistics(const StepDistribution& mu, const WordSet& w,
                                 std::size_t horizon, const std::vector<std::size_t>& i_list,
                                 const HittingConfig& cfg) {
  check_hitting_config(cfg);
  if (horizon < 1) throw PreconditionError("horizon must be >= 1");
  const auto specs = make_specs(i_list, cfg.q);
  std::vector<std::size_t> caps(specs.size(), horizon);

  struct PathStats {
    double visit = 0.0;
    double hit = 0.0;
    bool any_hit = false;
  };
  const auto per_path = parallel_map<PathStats>(cfg.paths, cfg.workers, [&](std::size_t j) {
    auto tr = w.tracker(mu.rank());
    std::vector<char> done(specs.size(), 0);
    std::size_t inside = 0;
    std::size_t hits = 0;
    std::size_t hits_in = 0;
    WalkCursor cursor(mu, cfg.rng, j);
    for (std::size_t t = 1; t <= horizon; ++t) {
      cursor.step([&](Letter) { tr->pop(); }, [&](Letter x) { tr->push(x); });
      const bool in = tr->inside();
      if (in) ++inside;
      const std::size_t len = cursor.position().length();
      for (std::size_t s = 0; s < specs.size(); ++s) {
        if (!done[s] && specs[s].contains(len)) {
          done[s] = 1;
          ++hits;
          if (in) ++hits_in;
        }
      }
    }
    PathStats ps;
    ps.visit = static_cast<double>(inside) / static_cast<double>(horizon);
    ps.any_hit = hits > 0;
    ps.hit = hits > 0 ? static_cast<double>(hits_in) / static_cast<double>(hits) : 0.0;
    return ps;
  });
  std::vector<double> visits;
  std::vector<double> hit_freq;
  for (const auto& p : per_path) {
    visits.push_back(p.visit);
    if (p.any_hit) hit_freq.push_back(p.hit);
  }
  VisitStatistics out;
  const MeanSe v = mean_se(visits);
  const MeanSe h = mean_se(hit_freq);
  out.visit_frequency = {v.mean, v.se, visits.size(), horizon, cfg.rng, "monte-carlo:visit-frequency"};
  out.hitting_frequency = {h.mean, h.se, hit_freq.size(), horizon, cfg.rng,
                           "monte-carlo:hitting-point-frequency"};
  return out;
}

double RadialWeight::log_weight(std::size_t n) const {
  const double x = static_cast<double>(n);
  switch (kind) {
    case Kind::one:
      return 0.0;
    case Kind::harmonic:
      return -std::log1p(x);
    case Kind::poly:
      return param * std::log1p(x);
    case Kind::exp:
      return param * x;
  }
  return 0.0;
}

std::string RadialWeight::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::one:
      return "one";
    case Kind::harmonic:
      return "harmonic";
    case Kind::poly:
      os << "poly:" << param;
      return os.str();
    case Kind::exp:
      os << "exp:" << param;
      return os.str();
  }
  return "one";
}

RadialWeight parse_radial_weight(const std::string& spec) {
  if (spec == "one") return {RadialWeight::Kind::one, 0.0};
  if (spec == "harmonic") return {RadialWeight::Kind::harmonic, 0.0};
  if (spec.rfind("poly:", 0) == 0) return {RadialWeight::Kind::poly, parse_real(spec.substr(5), "poly")};
  if (spec.rfind("exp:", 0) == 0) return {RadialWeight::Kind::exp, parse_real(spec.substr(4), "exp")};
  throw PreconditionError("unknown weight '" + spec + "' (one, harmonic, poly:p, exp:c)");
}

WeightedPoincareResult weighted_visited_poincare(const StepDistribution& mu, const WordSet& w,
                                                 const RadialWeight& s, std::size_t i_max,
                                                 double a, double delta_hat, double q,
                                                 const HittingConfig& cfg,
                                                 std::size_t check_horizon, double subexp_tol) {
  if (i_max < 1) throw PreconditionError("i_max must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw PreconditionError("q must lie in (0, 1)");
  if (check_horizon < 1) throw PreconditionError("check horizon must be >= 1");
  const auto log_counts = shell_log_counts(w, mu.rank(), i_max, default_budget());

  WeightedPoincareResult out;
  double best = 0.0;
  for (std::size_t i = 1; i <= i_max; ++i) {
    const AnnulusSpec spec{i, q};
    double log_sum = kNegInf;
    for (std::size_t n = spec.lower(); n <= i; ++n) {
      if (n == 0 || log_counts[n] == kNegInf) continue;
      log_sum = log_sum_exp(log_sum, log_counts[n] + s.log_weight(n));
    }
    const double v =
        log_sum == kNegInf ? 0.0 : std::exp(log_sum - (delta_hat - a) * static_cast<double>(i));
    out.values.push_back(v);
    best = std::max(best, v);
    out.running_max.push_back(best);
  }
  const std::size_t half = i_max / 2;
  double first = 0.0;
  double second = 0.0;
  for (std::size_t k = 0; k < i_max; ++k) {
    double& slot = k < half ? first : second;
    slot = std::max(slot, out.values[k]);
  }
  out.bounded_away = second > 0.0 && second >= 0.5 * first;

  const auto fails = parallel_map<char>(cfg.paths, cfg.workers, [&](std::size_t j) {
    WalkCursor cursor(mu, cfg.rng, j);
    for (std::size_t t = 0; t < check_horizon; ++t) cursor.step();
    const double rate =
        std::abs(s.log_weight(cursor.position().length())) / static_cast<double>(check_horizon);
    return static_cast<char>(rate > subexp_tol);
  });
  std::size_t nfail = 0;
  for (char f : fails) nfail += static_cast<std::size_t>(f);
  out.subexp_fail_fraction = static_cast<double>(nfail) / static_cast<double>(fails.size());
  out.hypothesis_violation = out.subexp_fail_fraction > 0.01;
  return out;
}

}  // namespace cogrowth
