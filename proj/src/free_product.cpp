#include "cogrowth/free_product.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

#include "cogrowth/errors.hpp"
#include "cogrowth/parallel.hpp"

namespace cogrowth {

FiniteGroupTable::FiniteGroupTable(int order, std::vector<int> table)
    : order_(order), table_(std::move(table)) {
  if (order < 1 || order > 12) throw PreconditionError("finite group order must be in 1..12");
  const auto n = static_cast<std::size_t>(order);
  if (table_.size() != n * n) {
    throw PreconditionError("multiplication table needs " + std::to_string(n * n) + " entries");
  }
  for (int v : table_) {
    if (v < 0 || v >= order) throw PreconditionError("multiplication table entry out of range");
  }
  for (int x = 0; x < order; ++x) {
    if (mul(0, x) != x || mul(x, 0) != x) throw PreconditionError("element 0 must be the identity");
  }
  inverse_.assign(n, -1);
  for (int x = 0; x < order; ++x) {
    for (int y = 0; y < order; ++y) {
      if (mul(x, y) == 0) {
        if (mul(y, x) != 0) throw PreconditionError("multiplication table: one-sided inverse");
        inverse_[static_cast<std::size_t>(x)] = y;
      }
    }
    if (inverse_[static_cast<std::size_t>(x)] < 0) throw PreconditionError("multiplication table: missing inverse");
  }
  for (int x = 0; x < order; ++x) {
    for (int y = 0; y < order; ++y) {
      for (int z = 0; z < order; ++z) {
        if (mul(mul(x, y), z) != mul(x, mul(y, z))) {
          throw PreconditionError("multiplication table is not associative");
        }
      }
    }
  }
}

FiniteGroupTable FiniteGroupTable::cyclic(int order) {
  if (order < 1 || order > 12) throw PreconditionError("finite group order must be in 1..12");
  std::vector<int> t;
  for (int x = 0; x < order; ++x) {
    for (int y = 0; y < order; ++y) t.push_back((x + y) % order);
  }
  return FiniteGroupTable(order, std::move(t));
}

FreeProductSpec::FreeProductSpec(FiniteGroupTable a_, FiniteGroupTable b_)
    : a(std::move(a_)), b(std::move(b_)) {
  if (a.order() < 2 || b.order() < 2) throw PreconditionError("both factors need order >= 2");
  if ((a.order() - 1) * (b.order() - 1) < 2) {
    throw PreconditionError("(|A|-1)(|B|-1) must be >= 2; Z/2 * Z/2 is elementary");
  }
}

FreeProductSpec FreeProductSpec::cyclic(int order_a, int order_b) {
  return FreeProductSpec(FiniteGroupTable::cyclic(order_a), FiniteGroupTable::cyclic(order_b));
}

FreeProductSpec parse_free_product_spec(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::optional<FiniteGroupTable> a;
  std::optional<FiniteGroupTable> b;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    int order = 0;
    if (!(ls >> order)) throw PreconditionError("free product spec: missing order after " + name);
    std::vector<int> table;
    int v = 0;
    while (ls >> v) table.push_back(v);
    if (!ls.eof()) throw PreconditionError("free product spec: bad table entry on line '" + line + "'");
    FiniteGroupTable g = table.empty() ? FiniteGroupTable::cyclic(order)
                                       : FiniteGroupTable(order, std::move(table));
    if (name == "A") {
      a = std::move(g);
    } else if (name == "B") {
      b = std::move(g);
    } else {
      throw PreconditionError("free product spec: unknown factor '" + name + "'");
    }
  }
  if (!a || !b) throw PreconditionError("free product spec needs lines for A and B");
  return FreeProductSpec(std::move(*a), std::move(*b));
}

std::string serialize(const FreeProductSpec& spec) {
  std::ostringstream os;
  auto line = [&](const char* name, const FiniteGroupTable& g) {
    os << name << ' ' << g.order();
    for (int v : g.table()) os << ' ' << v;
    os << '\n';
  };
  line("A", spec.a);
  line("B", spec.b);
  return os.str();
}

std::size_t FPElement::tree_length() const noexcept {
  std::size_t b = 0;
  for (const auto& s : syllables) b += static_cast<std::size_t>(s.factor == 1);
  return 2 * b;
}

namespace {
const FiniteGroupTable& factor(const FreeProductSpec& spec, int f) { return f == 0 ? spec.a : spec.b; }
}  // namespace

void fp_append(FPElement& g, Syllable x, const FreeProductSpec& spec) {
  if (x.element == 0) return;
  if (!g.syllables.empty() && g.syllables.back().factor == x.factor) {
    auto& last = g.syllables.back();
    last.element = factor(spec, x.factor).mul(last.element, x.element);
    if (last.element == 0) g.syllables.pop_back();
  } else {
    g.syllables.push_back(x);
  }
}

FPElement fp_mul(const FPElement& x, const FPElement& y, const FreeProductSpec& spec) {
  FPElement out = x;
  for (const auto& s : y.syllables) fp_append(out, s, spec);
  return out;
}

FPElement fp_inverse(const FPElement& x, const FreeProductSpec& spec) {
  FPElement out;
  for (auto it = x.syllables.rbegin(); it != x.syllables.rend(); ++it) {
    out.syllables.push_back({it->factor, factor(spec, it->factor).inverse(it->element)});
  }
  return out;
}

void fp_validate(const FPElement& x, const FreeProductSpec& spec) {
  for (std::size_t i = 0; i < x.syllables.size(); ++i) {
    const auto& s = x.syllables[i];
    if (s.factor != 0 && s.factor != 1) throw PreconditionError("syllable factor must be A or B");
    if (s.element <= 0 || s.element >= factor(spec, s.factor).order()) {
      throw PreconditionError("syllable element must be a nontrivial element of its factor");
    }
    if (i > 0 && x.syllables[i - 1].factor == s.factor) {
      throw PreconditionError("adjacent syllables must come from different factors");
    }
  }
}

std::string to_string(const FPElement& x) {
  if (x.syllables.empty()) return "1";
  std::ostringstream os;
  for (std::size_t i = 0; i < x.syllables.size(); ++i) {
    os << (i ? " " : "") << (x.syllables[i].factor == 0 ? 'a' : 'b') << x.syllables[i].element;
  }
  return os.str();
}

LatticeMeasure solve_rho(const FreeProductSpec& spec) {
  const double a = spec.a.order() - 1.0;
  const double b = spec.b.order() - 1.0;
  LatticeMeasure m;
  m.rho = std::sqrt(a * b);
  m.weight_a = a / (a + m.rho);
  m.weight_b = b / (b + m.rho);
  m.residual = std::abs(m.weight_a + m.weight_b - 1.0);
  return m;
}

FactorPassage fp_first_passage(const FreeProductSpec& spec, const LatticeMeasure& m,
                               std::size_t horizon) {
  if (horizon < 1) throw PreconditionError("first-passage horizon must be >= 1");
  const double na = spec.a.order() - 1.0;
  const double nb = spec.b.order() - 1.0;
  // To reach a nontrivial a: step onto it; or step to another a' and then
  // reach a'^-1 a (law f_A); or step into B and first return to e (law f_B).
  std::vector<FirstPassageSystem::Equation> eqs(2);
  eqs[0].direct = m.weight_a / na;
  eqs[0].hold = m.weight_a * (na - 1.0) / na;
  eqs[0].terms.push_back({m.weight_b, 1});
  eqs[1].direct = m.weight_b / nb;
  eqs[1].hold = m.weight_b * (nb - 1.0) / nb;
  eqs[1].terms.push_back({m.weight_a, 0});
  auto laws = FirstPassageSystem(std::move(eqs)).solve(horizon);
  FactorPassage p;
  p.law_a = std::move(laws[0]);
  p.law_b = std::move(laws[1]);
  auto total = [](const PassageLaw& l) {
    return std::min(1.0, l.mass + (std::isfinite(l.tail) ? l.tail : 0.0));
  };
  p.x_a = total(p.law_a);
  p.x_b = total(p.law_b);
  return p;
}

FpDeltaResult fp_walk_delta(const FreeProductSpec& spec, const LatticeMeasure& m,
                            const WalkConfig& cfg, std::size_t f_horizon) {
  if (cfg.horizon < 100) throw PreconditionError("horizon n must be >= 100");
  if (cfg.paths < 10) throw PreconditionError("path count m must be >= 10");
  const FactorPassage fp = fp_first_passage(spec, m, f_horizon);
  const double cost_a = -std::log(fp.x_a);
  const double cost_b = -std::log(fp.x_b);
  const int na = spec.a.order() - 1;
  const int nb = spec.b.order() - 1;

  struct PathStats {
    double tree = 0.0;
    double syl = 0.0;
    double green = 0.0;
  };
  const auto samples = parallel_map<PathStats>(cfg.paths, cfg.workers, [&](std::size_t j) {
    CounterRng rng(cfg.rng, j);
    FPElement g;
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      const double u = rng.uniform();
      Syllable x;
      if (u < m.weight_a) {
        x = {0, 1 + static_cast<int>(std::min<double>(na - 1, std::floor(u / m.weight_a * na)))};
      } else {
        const double v = (u - m.weight_a) / m.weight_b;
        x = {1, 1 + static_cast<int>(std::min<double>(nb - 1, std::floor(v * nb)))};
      }
      fp_append(g, x, spec);
    }
    PathStats s;
    const double n = static_cast<double>(cfg.horizon);
    s.tree = static_cast<double>(g.tree_length()) / n;
    s.syl = static_cast<double>(g.syllable_length()) / n;
    double cost = 0.0;
    for (const auto& y : g.syllables) cost += y.factor == 0 ? cost_a : cost_b;
    s.green = cost / n;
    return s;
  });

  auto summarize = [&](auto field, const std::string& method) {
    double sum = 0.0;
    for (const auto& s : samples) sum += field(s);
    const double mean = sum / static_cast<double>(samples.size());
    double ss = 0.0;
    for (const auto& s : samples) ss += (field(s) - mean) * (field(s) - mean);
    const double se = std::sqrt(ss / static_cast<double>(samples.size() - 1) /
                                static_cast<double>(samples.size()));
    return EstimatorReport{mean, se, cfg.paths, cfg.horizon, cfg.rng, method};
  };
  FpDeltaResult r;
  r.x_a = fp.x_a;
  r.x_b = fp.x_b;
  r.drift = summarize([](const PathStats& s) { return s.tree; }, "monte-carlo:tree-metric");
  r.syllable_drift = summarize([](const PathStats& s) { return s.syl; }, "monte-carlo:syllable-length");
  r.entropy = summarize([](const PathStats& s) { return s.green; },
                        "green-metric:F-horizon=" + std::to_string(f_horizon));
  if (r.drift.value <= 3.0 * r.drift.std_error || r.drift.value == 0.0) {
    throw PreconditionError("tree drift is consistent with zero; delta(mu_1) is undefined");
  }
  r.delta.value = r.entropy.value / r.drift.value;
  r.delta.std_error = r.delta.value * std::hypot(r.entropy.std_error / r.entropy.value,
                                                 r.drift.std_error / r.drift.value);
  r.delta.n_samples = cfg.paths;
  r.delta.horizon = cfg.horizon;
  r.delta.seed = cfg.rng;
  r.delta.method = "ratio:green-metric/tree-metric";
  return r;
}

FpGrowth fp_growth_exact(const FreeProductSpec& spec, std::size_t n_max) {
  const std::uint64_t a = static_cast<std::uint64_t>(spec.a.order());
  const std::uint64_t b = static_cast<std::uint64_t>(spec.b.order());
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  auto sat_mul = [](std::uint64_t x, std::uint64_t y) {
    std::uint64_t r = 0;
    return __builtin_mul_overflow(x, y, &r) ? kMax : r;
  };
  FpGrowth g;
  g.vertices.assign(n_max + 1, 0);
  g.orbit.assign(n_max + 1, 0);
  g.vertices[0] = 1;
  g.orbit[0] = 1;
  // From v_A: |A| neighbours of type B; then alternately |B|-1 and |A|-1 children.
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n == 1) {
      g.vertices[n] = a;
    } else {
      g.vertices[n] = sat_mul(g.vertices[n - 1], n % 2 == 0 ? b - 1 : a - 1);
    }
    if (n % 2 == 0) g.orbit[n] = g.vertices[n];
  }
  g.delta = 0.5 * std::log(static_cast<double>((a - 1) * (b - 1)));
  return g;
}

void fp_for_each(const FreeProductSpec& spec, std::size_t max_syllables,
                 const std::function<void(const FPElement&)>& visit) {
  FPElement g;
  std::function<void()> rec = [&]() {
    visit(g);
    if (g.syllables.size() == max_syllables) return;
    for (int f = 0; f < 2; ++f) {
      if (!g.syllables.empty() && g.syllables.back().factor == f) continue;
      for (int e = 1; e < factor(spec, f).order(); ++e) {
        g.syllables.push_back({f, e});
        rec();
        g.syllables.pop_back();
      }
    }
  };
  rec();
}

}  // namespace cogrowth
