#include "cogrowth/subgroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cogrowth/errors.hpp"

namespace cogrowth {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct EdgeGraph {
  // Directed edge e = (from, li, to); succ[e] lists non-backtracking successors.
  std::vector<int> from;
  std::vector<int> letter;
  std::vector<int> to;
  std::vector<std::vector<int>> succ;
};

EdgeGraph non_backtracking(const CoreGraph& h) {
  EdgeGraph g;
  const int letters = h.rank().letters();
  std::vector<std::vector<int>> out_edges(static_cast<std::size_t>(h.vertex_count()));
  for (int v = 0; v < h.vertex_count(); ++v) {
    for (int li = 0; li < letters; ++li) {
      const int t = h.target(v, li);
      if (t == CoreGraph::kNoEdge) continue;
      out_edges[static_cast<std::size_t>(v)].push_back(static_cast<int>(g.from.size()));
      g.from.push_back(v);
      g.letter.push_back(li);
      g.to.push_back(t);
    }
  }
  g.succ.resize(g.from.size());
  for (std::size_t e = 0; e < g.from.size(); ++e) {
    for (int f : out_edges[static_cast<std::size_t>(g.to[e])]) {
      if (g.letter[static_cast<std::size_t>(f)] != (g.letter[e] ^ 1)) g.succ[e].push_back(f);
    }
  }
  return g;
}

// Iterative Tarjan; returns component id per node.
std::vector<int> strongly_connected(const std::vector<std::vector<int>>& succ, int* count) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;
  int next_index = 0;
  int next_comp = 0;
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, child] = call.back();
      const auto vs = static_cast<std::size_t>(v);
      if (child == 0 && index[vs] < 0) {
        index[vs] = low[vs] = next_index++;
        stack.push_back(v);
        on_stack[vs] = 1;
      }
      if (child < succ[vs].size()) {
        const int w = succ[vs][child++];
        const auto ws = static_cast<std::size_t>(w);
        if (index[ws] < 0) {
          call.emplace_back(w, 0);
        } else if (on_stack[ws]) {
          low[vs] = std::min(low[vs], index[ws]);
        }
        continue;
      }
      if (low[vs] == index[vs]) {
        int w = -1;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          comp[static_cast<std::size_t>(w)] = next_comp;
        } while (w != v);
        ++next_comp;
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) {
        const auto ps = static_cast<std::size_t>(call.back().first);
        low[ps] = std::min(low[ps], low[static_cast<std::size_t>(done)]);
      }
    }
  }
  *count = next_comp;
  return comp;
}

struct Perron {
  double value = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

// Perron value of B restricted to one component, via power iteration on I + B
// with Collatz-Wielandt bounds.
Perron component_perron(const EdgeGraph& g, const std::vector<int>& nodes,
                        const std::vector<int>& comp, int id, double tol, std::size_t max_it) {
  Perron p;
  std::vector<int> local(g.succ.size(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) local[static_cast<std::size_t>(nodes[i])] = static_cast<int>(i);
  std::vector<std::vector<int>> pred(nodes.size());
  bool single_cycle = true;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    int inside = 0;
    for (int f : g.succ[static_cast<std::size_t>(nodes[i])]) {
      if (comp[static_cast<std::size_t>(f)] != id) continue;
      ++inside;
      pred[static_cast<std::size_t>(local[static_cast<std::size_t>(f)])].push_back(static_cast<int>(i));
    }
    if (inside != 1) single_cycle = false;
  }
  if (single_cycle) {
    p.value = 1.0;
    return p;
  }
  // x_{t+1}(f) = x_t(f) + sum_{e -> f} x_t(e): the transpose has the same Perron value.
  std::vector<double> x(nodes.size(), 1.0);
  std::vector<double> y(nodes.size(), 0.0);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= max_it; ++it) {
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double top = 0.0;
    for (std::size_t f = 0; f < nodes.size(); ++f) {
      double v = x[f];
      for (int e : pred[f]) v += x[static_cast<std::size_t>(e)];
      y[f] = v;
      const double r = v / x[f];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      top = std::max(top, v);
    }
    for (std::size_t f = 0; f < nodes.size(); ++f) x[f] = y[f] / top;
    p.iterations = it;
    if (hi - lo <= tol) break;
  }
  p.value = 0.5 * (lo + hi) - 1.0;
  p.residual = hi - lo;
  p.converged = p.residual <= tol;
  return p;
}

}  // namespace

double NBSpectrum::delta() const { return empty ? kNegInf : std::log(spectral_radius); }

NBSpectrum critical_exponent_fg(const CoreGraph& h, double tol, std::size_t max_iterations) {
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  NBSpectrum out;
  if (h.is_trivial()) {
    out.empty = true;
    return out;
  }
  const EdgeGraph g = non_backtracking(h);
  int count = 0;
  const std::vector<int> comp = strongly_connected(g.succ, &count);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(count));
  for (std::size_t e = 0; e < comp.size(); ++e) members[static_cast<std::size_t>(comp[e])].push_back(static_cast<int>(e));
  for (int id = 0; id < count; ++id) {
    const auto& nodes = members[static_cast<std::size_t>(id)];
    bool cyclic = nodes.size() > 1;
    if (!cyclic) {
      const int e = nodes.front();
      for (int f : g.succ[static_cast<std::size_t>(e)]) cyclic = cyclic || f == e;
    }
    if (!cyclic) continue;
    ++out.components;
    const Perron p = component_perron(g, nodes, comp, id, tol, max_iterations);
    out.iterations += p.iterations;
    if (p.value > out.spectral_radius) {
      out.spectral_radius = p.value;
      out.residual = p.residual;
      out.converged = p.converged;
    }
  }
  return out;
}

double log_count_slope(const std::vector<std::uint64_t>& counts, std::size_t* lo,
                       std::size_t* hi) {
  const std::size_t n_max = counts.empty() ? 0 : counts.size() - 1;
  const std::size_t start = std::max<std::size_t>(1, n_max / 2);
  std::vector<double> ball(counts.size(), 0.0);
  double acc = 0.0;
  for (std::size_t n = 0; n < counts.size(); ++n) ball[n] = acc += static_cast<double>(counts[n]);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (std::size_t n = start; n <= n_max; ++n) {
    if (ball[n] <= 0.0) continue;
    const double x = static_cast<double>(n);
    const double y = std::log(ball[n]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (lo) *lo = start;
  if (hi) *hi = n_max;
  if (m < 2 || ball[n_max] == ball[start]) return 0.0;
  const double md = static_cast<double>(m);
  return (md * sxy - sx * sy) / (md * sxx - sx * sx);
}

BallCounts ball_count_oracle(const CoreGraph& h, std::size_t n_max) {
  const int letters = h.rank().letters();
  const auto states = static_cast<std::size_t>(h.vertex_count() * letters);
  std::vector<std::uint64_t> cur(states, 0);
  std::vector<std::uint64_t> next(states, 0);
  BallCounts out;
  out.counts.assign(n_max + 1, 0);
  out.counts[0] = 1;
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::fill(next.begin(), next.end(), 0);
    for (int v = 0; v < h.vertex_count(); ++v) {
      for (int last = -1; last < letters; ++last) {
        std::uint64_t w = 0;
        if (n == 1) {
          if (v != 0 || last != -1) continue;
          w = 1;
        } else {
          if (last < 0) continue;
          w = cur[static_cast<std::size_t>(v * letters + last)];
        }
        if (w == 0) continue;
        for (int li = 0; li < letters; ++li) {
          if (last >= 0 && li == (last ^ 1)) continue;
          const int t = h.target(v, li);
          if (t == CoreGraph::kNoEdge) continue;
          auto& slot = next[static_cast<std::size_t>(t * letters + li)];
          if (__builtin_add_overflow(slot, w, &slot)) {
            throw BudgetError("ball count overflows 64 bits at length " + std::to_string(n), n);
          }
        }
      }
    }
    std::uint64_t closed = 0;
    for (int li = 0; li < letters; ++li) {
      if (__builtin_add_overflow(closed, next[static_cast<std::size_t>(li)], &closed)) {
        throw BudgetError("ball count overflows 64 bits at length " + std::to_string(n), n);
      }
    }
    out.counts[n] = closed;
    std::swap(cur, next);
  }
  out.slope = log_count_slope(out.counts, &out.fit_lo, &out.fit_hi);
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::diverging:
      return "diverging";
    case Verdict::converging:
      return "converging";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

PoincareTable poincare_from_log_shells(const std::vector<double>& log_shells, double s) {
  PoincareTable t;
  t.s = s;
  const std::size_t j_max = log_shells.size() - 1;
  std::vector<double> term(j_max + 1, 0.0);
  for (std::size_t j = 0; j <= j_max; ++j) {
    if (log_shells[j] != kNegInf) term[j] = std::exp(log_shells[j] - s * static_cast<double>(j));
  }
  t.partial_sums.assign(j_max + 1, 0.0);
  t.ratios.assign(j_max + 1, 1.0);
  double acc = 0.0;
  for (std::size_t j = 0; j <= j_max; ++j) {
    acc += term[j];
    t.partial_sums[j] = acc;
    if (j > 0) t.ratios[j] = t.partial_sums[j - 1] > 0.0 ? acc / t.partial_sums[j - 1] : 1.0;
  }

  std::size_t width = 2;
  std::size_t prev_nonzero = 0;
  bool seen = false;
  for (std::size_t j = std::max<std::size_t>(1, j_max / 2); j <= j_max; ++j) {
    if (term[j] == 0.0) continue;
    if (seen) width = std::max(width, j - prev_nonzero);
    prev_nonzero = j;
    seen = true;
  }
  if (!seen || j_max < 2 * width) {
    t.verdict = Verdict::inconclusive;
    return t;
  }
  double last = 0.0;
  double before = 0.0;
  for (std::size_t d = 0; d < width; ++d) {
    last += term[j_max - d];
    before += term[j_max - width - d];
  }
  if (before == 0.0) {
    t.verdict = Verdict::inconclusive;
    return t;
  }
  t.tail_ratio = last / before;
  if (t.tail_ratio >= 1.0 - 1e-9) {
    t.verdict = Verdict::diverging;
  } else if (t.tail_ratio < 1.0 - 1e-6) {
    t.verdict = Verdict::converging;
  } else {
    t.verdict = Verdict::inconclusive;
  }
  return t;
}

PoincareTable poincare_partial(const CoreGraph& h, double s, std::size_t j_max) {
  if (j_max < 1) throw PreconditionError("j_max must be >= 1");
  if (j_max > default_budget()) throw BudgetError("j_max exceeds the budget", j_max);
  return poincare_from_log_shells(log_loop_counts(h, j_max), s);
}

std::optional<std::size_t> core_systole(const CoreGraph& h, int vertex, std::size_t limit) {
  // BFS over (vertex, last letter) from `vertex`; the first return is the answer.
  const int letters = h.rank().letters();
  std::vector<int> dist(static_cast<std::size_t>(h.vertex_count() * letters), -1);
  std::vector<int> queue;
  for (int li = 0; li < letters; ++li) {
    const int t = h.target(vertex, li);
    if (t == CoreGraph::kNoEdge) continue;
    if (t == vertex) return limit >= 1 ? std::optional<std::size_t>(1) : std::nullopt;
    const int s = t * letters + li;
    dist[static_cast<std::size_t>(s)] = 1;
    queue.push_back(s);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int s = queue[head];
    const int v = s / letters;
    const int last = s % letters;
    const int d = dist[static_cast<std::size_t>(s)];
    if (static_cast<std::size_t>(d) >= limit) break;
    for (int li = 0; li < letters; ++li) {
      if (li == (last ^ 1)) continue;
      const int t = h.target(v, li);
      if (t == CoreGraph::kNoEdge) continue;
      if (t == vertex) return static_cast<std::size_t>(d + 1);
      const int ns = t * letters + li;
      if (dist[static_cast<std::size_t>(ns)] >= 0) continue;
      dist[static_cast<std::size_t>(ns)] = d + 1;
      queue.push_back(ns);
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> schreier_systole(const CoreGraph& h, const Word& g,
                                            std::size_t search_radius) {
  if (search_radius < 1) throw PreconditionError("search_radius must be >= 1");
  const CoreGraph conj = conjugate_subgroup(h, g);
  return core_systole(conj, 0, 2 * search_radius);
}

std::string to_string(ConfinementVerdict::Kind k) {
  switch (k) {
    case ConfinementVerdict::Kind::confined:
      return "confined-at-scale-T";
    case ConfinementVerdict::Kind::witness:
      return "witness";
    case ConfinementVerdict::Kind::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

ConfinementVerdict confinement_probe(const CoreGraph& h, std::size_t threshold,
                                     std::uint64_t budget) {
  ConfinementVerdict out;
  out.threshold = threshold;
  if (static_cast<std::uint64_t>(h.vertex_count()) > budget) {
    out.note = "core graph has " + std::to_string(h.vertex_count()) + " vertices, budget " +
               std::to_string(budget);
    return out;
  }
  const std::size_t limit = 2 * static_cast<std::size_t>(h.vertex_count()) + 2;
  if (h.is_trivial()) {
    out.kind = ConfinementVerdict::Kind::witness;
    out.witness = Word(h.rank());
    out.cosets_examined = 1;
    out.note = "trivial subgroup: every conjugate is trivial";
    return out;
  }

  if (h.is_complete()) {
    std::size_t worst = 0;
    int worst_v = 0;
    for (int v = 0; v < h.vertex_count(); ++v) {
      const auto sys = core_systole(h, v, limit);
      ++out.cosets_examined;
      if (sys && *sys > worst) {
        worst = *sys;
        worst_v = v;
      }
    }
    out.bound = worst;
    if (worst <= threshold) {
      out.kind = ConfinementVerdict::Kind::confined;
    } else {
      out.kind = ConfinementVerdict::Kind::witness;
      out.witness = h.path_to(worst_v);
      out.witness_systole = worst;
    }
    return out;
  }

  // Infinite index: vertices are in BFS order, so the first vertex with a
  // missing letter gives the shortest prefix.
  const int letters = h.rank().letters();
  for (int v = 0; v < h.vertex_count(); ++v) {
    ++out.cosets_examined;
    int missing = -1;
    for (int li = 0; li < letters && missing < 0; ++li) {
      if (h.target(v, li) == CoreGraph::kNoEdge) missing = li;
    }
    if (missing < 0) continue;
    const auto sys = core_systole(h, v, limit);
    std::size_t depth = 0;
    if (sys && *sys <= threshold) depth = (threshold - *sys) / 2 + 1;
    Word g = h.path_to(v);
    for (std::size_t d = 0; d < depth; ++d) g.push_reduced(letter_from_index(missing));
    const std::size_t expected = sys ? 2 * depth + *sys : 0;
    const auto check = schreier_systole(h, g, expected / 2 + 1);
    if (sys && (!check || *check != expected)) {
      throw VerdictError("hair systole formula disagrees with direct BFS");
    }
    out.kind = ConfinementVerdict::Kind::witness;
    out.witness = std::move(g);
    out.witness_systole = check;
    return out;
  }
  out.note = "no coset with a missing edge found";
  return out;
}

SemicontinuityResult delta_semicontinuity_check(const std::vector<CoreGraph>& sequence,
                                                const CoreGraph& limit, double tol) {
  if (sequence.empty()) throw PreconditionError("sequence must be nonempty");
  SemicontinuityResult r;
  for (const auto& h : sequence) r.deltas.push_back(critical_exponent_fg(h).delta());
  r.limit_delta = critical_exponent_fg(limit).delta();
  r.liminf = *std::min_element(r.deltas.begin() + static_cast<std::ptrdiff_t>(r.deltas.size() / 2),
                               r.deltas.end());
  r.holds = r.limit_delta == kNegInf || r.liminf >= r.limit_delta - tol;
  return r;
}

std::vector<Word> random_generators(FreeGroupRank rank, std::size_t gens, std::size_t max_length,
                                    RngState rng, std::uint64_t substream) {
  if (max_length < 1) throw PreconditionError("max_length must be >= 1");
  CounterRng r(rng, substream);
  std::vector<Word> out;
  const auto letters = static_cast<std::uint64_t>(rank.letters());
  while (out.size() < gens) {
    const std::size_t len = 1 + static_cast<std::size_t>(r.below(max_length));
    Word w(rank);
    while (w.length() < len) {
      int li = static_cast<int>(r.below(letters));
      if (!w.is_identity() && li == (letter_index(w.back()) ^ 1)) continue;
      w.push_reduced(letter_from_index(li));
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace cogrowth
