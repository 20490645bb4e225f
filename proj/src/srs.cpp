#include "cogrowth/srs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cogrowth/errors.hpp"
#include "cogrowth/parallel.hpp"
#include "cogrowth/walk.hpp"

namespace cogrowth {

VisitWindow VisitWindow::ball(FreeGroupRank rank, std::size_t radius) {
  if (radius < 1) throw PreconditionError("V ball radius must be >= 1");
  VisitWindow v;
  for_each_in_ball(rank, radius, default_budget(), [&](const Word& g) {
    if (!g.is_identity()) v.words.push_back(g);
  });
  v.max_length = radius;
  return v;
}

VisitWindow VisitWindow::list(std::vector<Word> words) {
  if (words.empty()) throw PreconditionError("V must be nonempty");
  VisitWindow v;
  for (auto& w : words) {
    if (w.is_identity()) throw PreconditionError("V must not contain the identity");
    v.max_length = std::max(v.max_length, w.length());
  }
  v.words = std::move(words);
  return v;
}

CesaroDraw cesaro_sample(const CoreGraph& base, const StepDistribution& mu, std::size_t cesaro_n,
                         RngState rng, std::uint64_t substream) {
  if (cesaro_n < 1) throw PreconditionError("Cesaro horizon N must be >= 1");
  if (base.rank() != mu.rank()) throw PreconditionError("rank mismatch between base and mu");
  // The step count and the walk use disjoint substreams of the same stream.
  CounterRng pick(rng, 2 * substream);
  const std::size_t i = 1 + static_cast<std::size_t>(pick.below(cesaro_n));
  WalkCursor cursor(mu, rng, 2 * substream + 1);
  for (std::size_t t = 0; t < i; ++t) cursor.step();
  return {conjugate_subgroup(base, cursor.position()), i, cursor.position()};
}

WindowTester::WindowTester(const CoreGraph& delta, const VisitWindow& v)
    : delta_(&delta), window_(&v), loop_at_(static_cast<std::size_t>(delta.vertex_count()), 0) {
  for (int u = 0; u < delta.vertex_count(); ++u) {
    for (const Word& w : v.words) {
      if (delta.read_from(u, w.letters()) == u) {
        loop_at_[static_cast<std::size_t>(u)] = 1;
        break;
      }
    }
  }
}

bool WindowTester::meets(const Word& g, const ReadTracker& tracker) const {
  if (tracker.on_graph()) return loop_at_[static_cast<std::size_t>(tracker.vertex())] != 0;
  const std::size_t off = tracker.off_depth();
  // s v s^-1 with |s| = off must cancel all of s to come back onto the graph.
  if (2 * off + 1 > window_->max_length) return false;
  const auto letters = g.letters();
  Word s(g.rank());
  for (std::size_t i = letters.size() - off; i < letters.size(); ++i) s.push_reduced(letters[i]);
  const int u = tracker.last_vertex();
  for (const Word& v : window_->words) {
    const Word x = mul(mul(s, v), inverse(s));
    if (delta_->read_from(u, x.letters()) == u) return true;
  }
  return false;
}

bool WindowTester::meets(const Word& g) const {
  ReadTracker t(*delta_);
  for (Letter x : g.letters()) t.push(x);
  return meets(g, t);
}

FrequencyReport visit_frequency(const CoreGraph& delta, const VisitWindow& v,
                                const StepDistribution& mu, std::size_t steps, std::size_t paths,
                                RngState rng, int workers) {
  if (steps < 1) throw PreconditionError("steps must be >= 1");
  if (paths < 1) throw PreconditionError("paths must be >= 1");
  if (delta.rank() != mu.rank()) throw PreconditionError("rank mismatch between Delta and mu");
  const WindowTester tester(delta, v);
  const auto cumulative = parallel_map<std::vector<std::uint32_t>>(paths, workers, [&](std::size_t j) {
    std::vector<std::uint32_t> c(steps, 0);
    ReadTracker tracker(delta);
    WalkCursor cursor(mu, rng, j);
    std::uint32_t hits = 0;
    for (std::size_t t = 0; t < steps; ++t) {
      cursor.step([&](Letter) { tracker.pop(); }, [&](Letter x) { tracker.push(x); });
      if (tester.meets(cursor.position(), tracker)) ++hits;
      c[t] = hits;
    }
    return c;
  });
  FrequencyReport r;
  r.steps = steps;
  r.paths = paths;
  r.running.assign(steps, 0.0);
  std::vector<double> finals;
  for (const auto& c : cumulative) {
    for (std::size_t t = 0; t < steps; ++t) r.running[t] += static_cast<double>(c[t]) / static_cast<double>(t + 1);
    finals.push_back(static_cast<double>(c.back()) / static_cast<double>(steps));
  }
  for (double& x : r.running) x /= static_cast<double>(paths);
  double sum = 0.0;
  for (double f : finals) sum += f;
  r.frequency = sum / static_cast<double>(paths);
  if (paths > 1) {
    double ss = 0.0;
    for (double f : finals) ss += (f - r.frequency) * (f - r.frequency);
    r.std_error = std::sqrt(ss / static_cast<double>(paths - 1) / static_cast<double>(paths));
  }
  return r;
}

SrsReport srs_delta_experiment(const CoreGraph& delta, const StepDistribution& mu,
                               const VisitWindow& v, const SrsConfig& cfg) {
  if (delta.is_trivial()) throw PreconditionError("base subgroup must be nontrivial");
  if (!(cfg.delta_mu > 0.0)) throw PreconditionError("delta_mu must be positive");
  SrsReport r;
  r.frequency = visit_frequency(delta, v, mu, cfg.steps, cfg.paths, cfg.rng, cfg.workers);
  r.hypothesis_evidence = r.frequency.frequency >= cfg.frequency_gate;

  const WindowTester tester(delta, v);
  r.w_shells.assign(cfg.w_radius + 1, 0);
  try {
    for_each_in_ball(delta.rank(), cfg.w_radius, default_budget(), [&](const Word& g) {
      if (tester.meets(g)) ++r.w_shells[g.length()];
    });
  } catch (const BudgetError&) {
    r.w_complete = false;
  }
  std::vector<double> log_shells;
  for (auto c : r.w_shells) {
    log_shells.push_back(c > 0 ? std::log(static_cast<double>(c)) : -std::numeric_limits<double>::infinity());
  }
  r.w_poincare = poincare_from_log_shells(log_shells, cfg.delta_mu);

  const double half_lower = std::max(0.0, cfg.delta_mu / 2.0 - 3.0 * cfg.delta_mu_se);
  r.delta_poincare = poincare_partial(delta, half_lower, cfg.poincare_radius);
  r.spectrum = critical_exponent_fg(delta);
  r.delta = r.spectrum.delta();
  r.delta_check = r.delta > half_lower;
  if (r.delta_check) {
    r.verdict = r.delta_poincare.verdict == Verdict::converging ? "fail" : "pass";
  } else {
    r.verdict = r.hypothesis_evidence ? "fail" : "hypothesis-failed";
  }
  return r;
}

std::vector<ConjugacyBoundRow> conjugacy_growth_bound_check(const Word& gamma, std::size_t r_max,
                                                            std::uint64_t budget) {
  std::vector<std::uint64_t> first_r(r_max + 1, 0);
  for_each_in_ball(gamma.rank(), r_max, budget, [&](const Word& g) {
    const std::size_t c = mul(mul(g, gamma), inverse(g)).length();
    const std::size_t need = std::max(g.length(), c);
    if (need <= r_max) ++first_r[need];
  });
  std::vector<ConjugacyBoundRow> rows;
  std::uint64_t acc = 0;
  for (std::size_t r = 0; r <= r_max; ++r) {
    acc += first_r[r];
    ConjugacyBoundRow row;
    row.r = r;
    row.lhs = acc;
    row.rhs = r >= gamma.length() ? ball_size(gamma.rank(), (r - gamma.length()) / 2) : 0;
    row.holds = row.lhs >= row.rhs;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cogrowth
