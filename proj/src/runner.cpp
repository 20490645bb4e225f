#include "cogrowth/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cogrowth/annulus.hpp"
#include "cogrowth/errors.hpp"
#include "cogrowth/estimators.hpp"
#include "cogrowth/free_product.hpp"
#include "cogrowth/green.hpp"
#include "cogrowth/quotient.hpp"
#include "cogrowth/spectral.hpp"
#include "cogrowth/srs.hpp"
#include "cogrowth/subgroup.hpp"

#ifndef COGROWTH_VERSION
#define COGROWTH_VERSION "0.0.0"
#endif

namespace cogrowth {

const char* code_version() { return COGROWTH_VERSION; }

namespace {

using json = nlohmann::ordered_json;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
std::string num(T x) requires std::is_integral_v<T> {
  return std::to_string(x);
}

// JSON has no infinities; they are written as strings.
json jnum(double x) {
  if (std::isfinite(x)) return x;
  return num(x);
}

json estimator_json(const EstimatorReport& r) {
  return json{{"value", jnum(r.value)},
              {"std_error", jnum(r.std_error)},
              {"n_samples", r.n_samples},
              {"horizon", r.horizon},
              {"seed", r.seed.seed},
              {"stream", r.seed.stream},
              {"method", r.method}};
}

std::string read_file(const std::filesystem::path& p, const std::string& key) {
  std::ifstream in(p);
  if (!in) throw PreconditionError("params." + key + ": cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

struct Context {
  RunReport& report;
  RngState rng;
  int workers;
  std::uint64_t budget;
  const RunOptions& options;

  void flush() const {
    if (options.on_progress) options.on_progress(report);
  }
  void header(std::vector<std::string> h) const { report.table.header = std::move(h); }
  void row(std::vector<std::string> r) const { report.table.rows.push_back(std::move(r)); }
  void fail_verdict(const std::string& message) const {
    report.status = "verdict-failed";
    report.message = message;
    report.exit_code = exit_code(ErrorKind::verdict);
  }
};

using Plan = std::function<void(Context&)>;

FreeGroupRank rank_of(const ParamReader& p) {
  const auto k = p.uint("k");
  if (k < 2 || k > static_cast<std::uint64_t>(FreeGroupRank::kMax)) p.fail("k", "rank must lie in [2, 26]");
  return FreeGroupRank(static_cast<int>(k));
}

StepDistribution measure_of(const ParamReader& p, FreeGroupRank rank) {
  const std::string& spec = p.text("measure");
  try {
    if (spec == "uniform") return StepDistribution::uniform(rank);
    if (starts_with(spec, "nn:")) {
      std::vector<double> w;
      std::istringstream in(spec.substr(3));
      std::string item;
      while (std::getline(in, item, ',')) w.push_back(std::stod(item));
      if (w.size() != static_cast<std::size_t>(rank.letters())) {
        p.fail("measure", "nn: needs " + std::to_string(rank.letters()) + " weights");
      }
      return StepDistribution::nearest_neighbour(rank, w);
    }
    if (starts_with(spec, "file:")) {
      StepDistribution mu = parse_distribution(read_file(p.resolve(spec.substr(5)), "measure"));
      if (mu.rank() != rank) p.fail("measure", "distribution rank differs from k");
      return mu;
    }
  } catch (const std::invalid_argument&) {
    p.fail("measure", "malformed weight list");
  } catch (const PreconditionError& e) {
    const std::string what = e.what();
    if (starts_with(what, "params.")) throw;
    p.fail("measure", what);
  }
  p.fail("measure", "expected uniform, nn:<weights> or file:<path>");
}

std::vector<Word> word_list(const ParamReader& p, const std::string& key, const std::string& text,
                            FreeGroupRank rank) {
  std::vector<Word> out;
  std::istringstream in(text);
  std::string item;
  try {
    while (std::getline(in, item, ',')) out.push_back(parse_word(rank, item));
  } catch (const PreconditionError& e) {
    p.fail(key, e.what());
  }
  return out;
}

CoreGraph subgroup_of(const ParamReader& p, FreeGroupRank rank, const std::string& key = "subgroup") {
  const std::string& spec = p.text(key);
  try {
    if (spec == "trivial") return CoreGraph::fold(rank, std::vector<Word>{});
    if (spec == "free") {
      std::vector<Word> gens;
      for (int i = 1; i <= rank.k(); ++i) gens.push_back(Word::generator(rank, i));
      return CoreGraph::fold(rank, gens);
    }
    if (starts_with(spec, "gens:")) {
      return CoreGraph::fold(rank, word_list(p, key, spec.substr(5), rank));
    }
    if (starts_with(spec, "file:")) {
      CoreGraph h = parse_core_graph(read_file(p.resolve(spec.substr(5)), key));
      if (h.rank() != rank) p.fail(key, "core graph rank differs from k");
      return h;
    }
  } catch (const PreconditionError& e) {
    const std::string what = e.what();
    if (starts_with(what, "params.")) throw;
    p.fail(key, what);
  }
  p.fail(key, "expected gens:<words>, free, trivial or file:<path>");
}

WalkConfig walk_of(const ParamReader& p) {
  WalkConfig w;
  w.horizon = p.uint("n");
  w.paths = p.uint("m");
  if (w.horizon < 100) p.fail("n", "walk length must be >= 100");
  if (w.paths < 10) p.fail("m", "path count must be >= 10");
  return w;
}

std::vector<std::size_t> radii_of(const ParamReader& p, double q) {
  std::vector<std::size_t> out;
  for (auto i : p.uint_list("i")) {
    AnnulusSpec a{static_cast<std::size_t>(i), q};
    try {
      a.validate();
    } catch (const PreconditionError& e) {
      p.fail("i", e.what());
    }
    out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

double thickness_of(const ParamReader& p) {
  const double q = p.real("q");
  if (!(q > 0.0 && q < 1.0)) p.fail("q", "thickness exponent must lie in (0, 1), got " + num(q));
  return q;
}

HittingConfig hitting_of(const ParamReader& p, double q) {
  HittingConfig h;
  h.paths = p.uint("m");
  if (h.paths < 1) p.fail("m", "need at least one path");
  h.q = q;
  return h;
}

std::vector<std::string> walk_row(const std::string& quantity, int k, const EstimatorReport& r,
                                  std::size_t n, std::size_t m, std::uint64_t seed) {
  return {quantity, num(k), num(r.value), num(r.std_error), num(n), num(m), num(seed)};
}

const std::vector<std::string> kWalkHeader = {"quantity", "k", "value", "std_error", "n", "m", "seed"};

// ---- experiments ---------------------------------------------------------

Plan plan_drift(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto mu = measure_of(p, rank);
  auto walk = walk_of(p);
  return [=](Context& c) {
    WalkConfig w = walk;
    w.rng = c.rng;
    w.workers = c.workers;
    c.header(kWalkHeader);
    const auto r = drift_estimate(mu, w);
    c.report.results["drift"] = estimator_json(r);
    c.row(walk_row("drift", rank.k(), r, w.horizon, w.paths, c.rng.seed));
    c.flush();
  };
}

Plan plan_entropy(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto mu = measure_of(p, rank);
  auto walk = walk_of(p);
  const std::string method = p.text("method");
  if (method != "exact" && method != "green") p.fail("method", "expected exact or green");
  if (method == "green" && !mu.nearest_neighbour_support()) {
    p.fail("method", "the Green-metric estimator needs a nearest-neighbour measure");
  }
  const std::size_t n_max = p.uint("n_max");
  const std::size_t f_horizon = p.uint("f_horizon");
  const std::uint64_t max_states = p.uint("max_states");
  if (f_horizon < 1) p.fail("f_horizon", "must be >= 1");
  if (max_states < 1) p.fail("max_states", "must be >= 1");
  return [=](Context& c) {
    c.header(kWalkHeader);
    const std::uint64_t cap = std::min<std::uint64_t>(max_states, c.budget);
    if (method == "exact") {
      const std::size_t depth = n_max > 0 ? n_max : entropy_horizon_for(mu, cap);
      const auto r = entropy_exact(mu, depth, cap);
      c.report.results["entropy"] = estimator_json(r.report);
      c.report.results["H_n"] = r.entropy;
      c.report.results["support"] = r.support;
      c.report.results["fit_points"] = r.fit_points;
      c.row(walk_row("entropy", rank.k(), r.report, depth, 0, c.rng.seed));
    } else {
      WalkConfig w = walk;
      w.rng = c.rng;
      w.workers = c.workers;
      const auto r = green_metric_entropy(mu, w, f_horizon);
      c.report.results["entropy"] = estimator_json(r);
      c.row(walk_row("entropy", rank.k(), r, w.horizon, w.paths, c.rng.seed));
    }
    c.flush();
  };
}

Plan plan_delta_mu(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto mu = measure_of(p, rank);
  DeltaConfig d;
  d.walk = walk_of(p);
  const std::string method = p.text("method");
  if (method == "exact") {
    d.method = EntropyMethod::exact;
  } else if (method == "green") {
    d.method = EntropyMethod::green;
  } else if (method == "both") {
    d.method = EntropyMethod::both;
  } else {
    p.fail("method", "expected exact, green or both");
  }
  if (d.method != EntropyMethod::exact && !mu.nearest_neighbour_support()) {
    p.fail("method", "the Green-metric estimator needs a nearest-neighbour measure");
  }
  d.n_max = p.uint("n_max");
  d.f_horizon = p.uint("f_horizon");
  d.max_states = p.uint("max_states");
  return [=](Context& c) {
    DeltaConfig cfg = d;
    cfg.walk.rng = c.rng;
    cfg.walk.workers = c.workers;
    cfg.max_states = std::min<std::uint64_t>(cfg.max_states, c.budget);
    const auto r = delta_mu(mu, cfg);
    c.header(kWalkHeader);
    auto& res = c.report.results;
    res["drift"] = estimator_json(r.drift);
    c.row(walk_row("drift", rank.k(), r.drift, cfg.walk.horizon, cfg.walk.paths, c.rng.seed));
    res["entropy"] = json::array();
    res["delta"] = json::array();
    for (std::size_t i = 0; i < r.delta.size(); ++i) {
      res["entropy"].push_back(estimator_json(r.entropy[i]));
      res["delta"].push_back(estimator_json(r.delta[i]));
      const std::string tag = starts_with(r.entropy[i].method, "green") ? "green" : "exact";
      c.row(walk_row("entropy:" + tag, rank.k(), r.entropy[i], r.entropy[i].horizon,
                     r.entropy[i].n_samples, c.rng.seed));
      c.row(walk_row("delta:" + tag, rank.k(), r.delta[i], r.delta[i].horizon, r.delta[i].n_samples,
                     c.rng.seed));
    }
    res["growth_bound"] = r.growth;
    res["guivarch_holds"] = r.guivarch_holds;
    c.flush();
    if (!r.guivarch_holds) c.fail_verdict("delta(mu) exceeds log(2k-1) by more than 3 standard errors");
  };
}

Plan plan_green(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto mu = measure_of(p, rank);
  auto targets = word_list(p, "targets", p.text("targets"), rank);
  const std::size_t horizon = p.uint("horizon");
  if (horizon < 1) p.fail("horizon", "must be >= 1");
  return [=](Context& c) {
    c.header({"target", "quantity", "value", "tail_bound", "horizon"});
    auto& rows = c.report.results["first_passage"] = json::array();
    for (const auto& g : targets) {
      const auto f = first_return_F(mu, g, horizon);
      rows.push_back(json{{"target", to_string(g)},
                          {"value", jnum(f.value)},
                          {"log_value", jnum(f.log_value)},
                          {"tail_bound", jnum(f.tail_bound)},
                          {"extrapolated", jnum(f.extrapolated())},
                          {"horizon", f.horizon},
                          {"method", f.method}});
      c.row({to_string(g), g.is_identity() ? "U" : "F", num(f.value), num(f.tail_bound), num(horizon)});
      c.flush();
    }
    const auto gee = green_identity(mu, horizon);
    c.report.results["G_identity"] = json{{"value", jnum(gee.value)},
                                          {"tail_bound", jnum(gee.tail_bound)},
                                          {"horizon", gee.horizon},
                                          {"method", gee.method}};
    c.row({"1", "G", num(gee.value), num(gee.tail_bound), num(horizon)});
    c.flush();
  };
}

Plan plan_hitting(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto mu = measure_of(p, rank);
  const double q = thickness_of(p);
  auto radii = radii_of(p, q);
  HittingConfig h = hitting_of(p, q);
  h.horizon_factor = p.real("horizon_factor");
  if (!(h.horizon_factor >= 1.0)) p.fail("horizon_factor", "must be >= 1");
  return [=](Context& c) {
    HittingConfig cfg = h;
    cfg.rng = c.rng;
    cfg.workers = c.workers;
    c.header({"i", "q", "mean_tau_over_i", "std_err", "censored_frac", "m", "seed"});
    const auto rows = hitting_ratio_experiment(mu, radii, cfg);
    auto& out = c.report.results["rows"] = json::array();
    for (const auto& r : rows) {
      out.push_back(json{{"i", r.i},
                         {"q", r.q},
                         {"tau_over_i", estimator_json(r.ratio)},
                         {"censored_fraction", r.censored_fraction},
                         {"step_cap", r.cap},
                         {"valid", r.valid},
                         {"within_target", r.within_target}});
      c.row({num(r.i), num(r.q), num(r.ratio.value), num(r.ratio.std_error), num(r.censored_fraction),
             num(cfg.paths), num(c.rng.seed)});
    }
    c.flush();
  };
}

Plan plan_tanaka(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto mu = measure_of(p, rank);
  const double q = thickness_of(p);
  auto radii = radii_of(p, q);
  HittingConfig h = hitting_of(p, q);
  const std::size_t f_horizon = p.uint("f_horizon");
  const std::size_t direct_max = p.uint("direct_max_i");
  if (f_horizon < 1) p.fail("f_horizon", "must be >= 1");
  return [=](Context& c) {
    HittingConfig cfg = h;
    cfg.rng = c.rng;
    cfg.workers = c.workers;
    c.header({"i", "observable", "value", "std_err"});
    const auto rows = tanaka_pointwise_experiment(mu, radii, cfg, f_horizon, direct_max);
    auto& out = c.report.results["rows"] = json::array();
    for (const auto& r : rows) {
      out.push_back(json{{"i", r.i}, {"observable", r.observable}, {"estimate", estimator_json(r.estimate)}});
      c.row({num(r.i), r.observable, num(r.estimate.value), num(r.estimate.std_error)});
    }
    c.flush();
  };
}

Plan plan_poincare(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto h = subgroup_of(p, rank);
  const std::string wspec = p.text("W");
  std::shared_ptr<WordSet> w;
  if (wspec != "-") {
    try {
      if (starts_with(wspec, "subgroup:")) {
        w = subgroup_words(parse_core_graph(read_file(p.resolve(wspec.substr(9)), "W")));
      } else {
        w = parse_word_set(rank, wspec);
      }
    } catch (const PreconditionError& e) {
      const std::string what = e.what();
      if (starts_with(what, "params.")) throw;
      p.fail("W", what);
    }
  }
  const double s = p.real("s");
  const std::size_t j_max = p.uint("j_max");
  if (!(s >= 0.0)) p.fail("s", "exponent must be >= 0");
  if (j_max < 1) p.fail("j_max", "must be >= 1");
  return [=](Context& c) {
    auto& res = c.report.results;
    c.header({"j", "partial_sum", "ratio"});
    if (w) {
      // Visited-set sums over the nontrivial elements of W.
      const auto partial = visited_set_poincare(*w, rank, j_max, s, c.budget);
      res["W"] = w->describe();
      res["s"] = s;
      res["partial_sums"] = partial;
      for (std::size_t j = 0; j < partial.size(); ++j) {
        const double ratio = j == 0 || partial[j - 1] == 0.0 ? 1.0 : partial[j] / partial[j - 1];
        c.row({num(j), num(partial[j]), num(ratio)});
      }
      c.flush();
      return;
    }
    const auto t = poincare_partial(h, s, j_max);
    for (std::size_t j = 0; j < t.partial_sums.size(); ++j) {
      c.row({num(j), num(t.partial_sums[j]), num(t.ratios[j])});
    }
    res["s"] = t.s;
    res["partial_sums"] = t.partial_sums;
    res["ratios"] = t.ratios;
    res["verdict"] = to_string(t.verdict);
    res["tail_ratio"] = jnum(t.tail_ratio);
    c.flush();
  };
}

json spectrum_json(const NBSpectrum& sp) {
  return json{{"delta", jnum(sp.delta())},          {"spectral_radius", sp.spectral_radius},
              {"iterations", sp.iterations},        {"residual", sp.residual},
              {"converged", sp.converged},          {"empty", sp.empty},
              {"components", sp.components}};
}

Plan plan_subgroup_delta(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto h = subgroup_of(p, rank);
  const std::size_t n_oracle = p.uint("n_oracle");
  if (n_oracle < 2) p.fail("n_oracle", "must be >= 2");
  return [=](Context& c) {
    const auto sp = critical_exponent_fg(h);
    auto& res = c.report.results;
    res["vertices"] = h.vertex_count();
    res["finite_index"] = h.is_complete();
    res["spectrum"] = spectrum_json(sp);
    c.header({"quantity", "value"});
    c.row({"delta", num(sp.delta())});
    c.row({"spectral_radius", num(sp.spectral_radius)});
    c.flush();
    const auto bc = ball_count_oracle(h, n_oracle);
    res["oracle"] = json{{"counts", bc.counts}, {"slope", bc.slope}, {"fit_lo", bc.fit_lo}, {"fit_hi", bc.fit_hi}};
    c.row({"oracle_slope", num(bc.slope)});
    c.flush();
  };
}

Plan plan_systole(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto h = subgroup_of(p, rank);
  auto g = word_list(p, "g", p.text("g"), rank);
  if (g.size() != 1) p.fail("g", "expected a single word");
  const std::size_t radius = p.uint("radius");
  if (radius < 1) p.fail("radius", "search radius must be >= 1");
  return [=](Context& c) {
    const auto sys = schreier_systole(h, g.front(), radius);
    auto& res = c.report.results;
    res["g"] = to_string(g.front());
    res["radius"] = radius;
    if (sys) {
      res["systole"] = *sys;
    } else {
      res["systole"] = "exceeds-radius";
    }
    c.header({"quantity", "value"});
    c.row({"systole", sys ? num(*sys) : std::string("exceeds-radius")});
    c.flush();
  };
}

Plan plan_confine(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto h = subgroup_of(p, rank);
  const std::size_t threshold = p.uint("T");
  if (threshold < 1) p.fail("T", "threshold must be >= 1");
  return [=](Context& c) {
    const auto v = confinement_probe(h, threshold, c.budget);
    auto& res = c.report.results;
    res["verdict"] = to_string(v.kind);
    res["threshold"] = v.threshold;
    res["witness"] = v.witness ? json(to_string(*v.witness)) : json(nullptr);
    res["witness_systole"] = v.witness ? (v.witness_systole ? json(*v.witness_systole) : json("infinite")) : json(nullptr);
    res["bound"] = v.bound ? json(*v.bound) : json(nullptr);
    res["cosets_examined"] = v.cosets_examined;
    res["note"] = v.note;
    c.header({"quantity", "value"});
    c.row({"verdict", to_string(v.kind)});
    if (v.witness) c.row({"witness", to_string(*v.witness)});
    if (v.witness_systole) c.row({"witness_systole", num(*v.witness_systole)});
    if (v.bound) c.row({"bound", num(*v.bound)});
    c.flush();
  };
}

Plan plan_quotient(const ParamReader& p) {
  const auto rank = rank_of(p);
  std::shared_ptr<QuotientOracle> q;
  try {
    q = parse_quotient(rank, p.text("quotient"));
  } catch (const PreconditionError& e) {
    p.fail("quotient", e.what());
  }
  const std::size_t n_max = p.uint("n_max");
  if (n_max < 2) p.fail("n_max", "must be >= 2");
  return [=](Context& c) {
    const auto g = quotient_dp_growth(*q, n_max, c.budget);
    auto& res = c.report.results;
    res["quotient"] = q->describe();
    res["counts"] = g.counts;
    res["delta"] = g.delta;
    res["fit_lo"] = g.fit_lo;
    res["fit_hi"] = g.fit_hi;
    res["states"] = g.states;
    res["trivial_kernel"] = g.trivial_kernel;
    c.header({"n", "count"});
    for (std::size_t n = 0; n < g.counts.size(); ++n) c.row({num(n), num(g.counts[n])});
    c.flush();
  };
}

Plan plan_srs(const ParamReader& p) {
  const auto rank = rank_of(p);
  auto mu = measure_of(p, rank);
  auto h = subgroup_of(p, rank, "base");
  if (h.is_trivial()) p.fail("base", "base subgroup must be nontrivial");
  SrsConfig base;
  base.steps = p.uint("steps");
  base.paths = p.uint("paths");
  base.frequency_gate = p.real("gate");
  if (base.steps < 1) p.fail("steps", "must be >= 1");
  if (base.paths < 2) p.fail("paths", "need at least two walks");
  if (!(base.frequency_gate > 0.0 && base.frequency_gate < 1.0)) p.fail("gate", "must lie in (0, 1)");
  std::optional<VisitWindow> window;
  const std::string& vspec = p.text("V");
  try {
    if (starts_with(vspec, "ball:")) {
      const auto radius = std::stoul(vspec.substr(5));
      if (radius < 1) p.fail("V", "ball radius must be >= 1");
      if (ball_size(rank, radius) > default_budget()) p.fail("V", "ball exceeds the enumeration budget");
      window = VisitWindow::ball(rank, radius);
    } else if (starts_with(vspec, "list:")) {
      std::istringstream in(read_file(p.resolve(vspec.substr(5)), "V"));
      std::vector<Word> words;
      std::string w;
      while (in >> w) words.push_back(parse_word(rank, w));
      window = VisitWindow::list(std::move(words));
    } else {
      p.fail("V", "expected ball:<L> or list:<file>");
    }
  } catch (const std::logic_error&) {
    p.fail("V", "malformed ball radius");
  } catch (const PreconditionError& e) {
    const std::string what = e.what();
    if (starts_with(what, "params.")) throw;
    p.fail("V", what);
  }
  const std::size_t cesaro_n = p.uint("cesaro_N");
  const std::string dm = p.text("delta_mu");
  std::optional<double> given;
  if (dm != "auto") {
    char* end = nullptr;
    const double v = std::strtod(dm.c_str(), &end);
    if (end != dm.c_str() + dm.size() || !(v > 0.0)) p.fail("delta_mu", "expected auto or a positive number");
    given = v;
  } else if (!mu.nearest_neighbour_support()) {
    p.fail("delta_mu", "auto needs a nearest-neighbour measure; give a value");
  }
  WalkConfig dwalk;
  dwalk.horizon = p.uint("delta_n");
  dwalk.paths = p.uint("delta_m");
  if (dwalk.horizon < 100) p.fail("delta_n", "must be >= 100");
  if (dwalk.paths < 10) p.fail("delta_m", "must be >= 10");
  return [=](Context& c) {
    SrsConfig cfg = base;
    cfg.rng = c.rng;
    cfg.workers = c.workers;
    auto& res = c.report.results;
    if (given) {
      cfg.delta_mu = *given;
      cfg.delta_mu_se = 0.0;
      res["delta_mu"] = json{{"value", *given}, {"method", "given"}};
    } else {
      DeltaConfig d;
      d.walk = dwalk;
      d.walk.rng = RngState{c.rng.seed, c.rng.stream + 2};
      d.walk.workers = c.workers;
      d.method = EntropyMethod::green;
      const auto r = delta_mu(mu, d);
      cfg.delta_mu = r.primary().value;
      cfg.delta_mu_se = r.primary().std_error;
      res["delta_mu"] = estimator_json(r.primary());
    }
    c.flush();
    CoreGraph delta = h;
    if (cesaro_n > 0) {
      auto draw = cesaro_sample(h, mu, cesaro_n, RngState{c.rng.seed, c.rng.stream + 3}, 0);
      res["cesaro"] = json{{"N", cesaro_n}, {"steps", draw.steps}, {"conjugator", to_string(draw.conjugator)},
                           {"vertices", draw.graph.vertex_count()}};
      delta = std::move(draw.graph);
    }
    const auto r = srs_delta_experiment(delta, mu, *window, cfg);
    res["visit_frequency"] = json{{"value", r.frequency.frequency},
                                  {"std_error", r.frequency.std_error},
                                  {"steps", r.frequency.steps},
                                  {"paths", r.frequency.paths}};
    res["hypothesis_evidence"] = r.hypothesis_evidence;
    res["w_shells"] = r.w_shells;
    res["w_complete"] = r.w_complete;
    res["w_poincare_verdict"] = to_string(r.w_poincare.verdict);
    res["delta_poincare_verdict"] = to_string(r.delta_poincare.verdict);
    res["spectrum"] = spectrum_json(r.spectrum);
    res["delta"] = jnum(r.delta);
    res["delta_check"] = r.delta_check;
    res["verdict"] = r.verdict;
    c.header({"quantity", "value"});
    c.row({"delta_mu", num(cfg.delta_mu)});
    c.row({"visit_frequency", num(r.frequency.frequency)});
    c.row({"delta", num(r.delta)});
    c.row({"verdict", r.verdict});
    c.flush();
    if (r.verdict == "fail") c.fail_verdict("delta(Delta) > delta(mu)/2 check failed with positive evidence");
  };
}

Plan plan_freeproduct(const ParamReader& p) {
  const std::string spec_text = p.text("spec");
  std::optional<FreeProductSpec> spec;
  try {
    if (starts_with(spec_text, "cyclic:")) {
      const std::string body = spec_text.substr(7);
      const auto comma = body.find(',');
      if (comma == std::string::npos) p.fail("spec", "expected cyclic:<|A|>,<|B|>");
      const int a = std::stoi(body.substr(0, comma));
      const int b = std::stoi(body.substr(comma + 1));
      spec.emplace(FreeProductSpec::cyclic(a, b));
    } else if (starts_with(spec_text, "file:")) {
      spec.emplace(parse_free_product_spec(read_file(p.resolve(spec_text.substr(5)), "spec")));
    } else {
      p.fail("spec", "expected cyclic:<|A|>,<|B|> or file:<path>");
    }
  } catch (const std::logic_error&) {
    p.fail("spec", "malformed group orders");
  } catch (const PreconditionError& e) {
    const std::string what = e.what();
    if (starts_with(what, "params.")) throw;
    p.fail("spec", what);
  }
  auto walk = walk_of(p);
  const std::size_t f_horizon = p.uint("f_horizon");
  const std::size_t n_max = p.uint("n_max");
  if (f_horizon < 1) p.fail("f_horizon", "must be >= 1");
  const FreeProductSpec fp = *spec;
  return [=](Context& c) {
    auto& res = c.report.results;
    const auto m = solve_rho(fp);
    res["orders"] = json::array({fp.a.order(), fp.b.order()});
    res["rho"] = m.rho;
    res["weight_a"] = m.weight_a;
    res["weight_b"] = m.weight_b;
    res["residual"] = m.residual;
    const auto g = fp_growth_exact(fp, n_max);
    res["growth"] = json{{"metric", "tree"}, {"orbit", g.orbit}, {"delta", g.delta}};
    c.header({"quantity", "metric", "value", "std_error", "n", "m", "seed"});
    c.row({"rho", "-", num(m.rho), "0", "0", "0", num(c.rng.seed)});
    c.row({"delta_exact", "tree", num(g.delta), "0", num(n_max), "0", num(c.rng.seed)});
    c.flush();
    WalkConfig w = walk;
    w.rng = c.rng;
    w.workers = c.workers;
    const auto r = fp_walk_delta(fp, m, w, f_horizon);
    auto est = [&](const EstimatorReport& e, const char* metric) {
      json j = estimator_json(e);
      j["metric"] = metric;
      return j;
    };
    res["drift"] = est(r.drift, "tree");
    res["syllable_drift"] = est(r.syllable_drift, "syllable");
    res["entropy"] = est(r.entropy, "tree");
    res["delta"] = est(r.delta, "tree");
    res["x_a"] = r.x_a;
    res["x_b"] = r.x_b;
    auto row = [&](const char* q, const char* metric, const EstimatorReport& e) {
      c.row({q, metric, num(e.value), num(e.std_error), num(w.horizon), num(w.paths), num(c.rng.seed)});
    };
    row("drift", "tree", r.drift);
    row("drift", "syllable", r.syllable_drift);
    row("entropy", "tree", r.entropy);
    row("delta", "tree", r.delta);
    c.flush();
  };
}

Plan plan_elstrodt(const ParamReader& p) {
  const double d = p.real("d");
  if (!(d > 0.0)) p.fail("d", "dimension must be positive");
  const auto deltas = p.real_list("deltas");
  for (double x : deltas) {
    if (!(x >= 0.0 && x <= d)) p.fail("deltas", "each delta must lie in [0, d], got " + num(x));
  }
  return [=](Context& c) {
    c.header({"delta", "d", "lambda0"});
    auto& rows = c.report.results["rows"] = json::array();
    for (double x : deltas) {
      const double l = elstrodt_lambda0(x, d);
      rows.push_back(json{{"delta", x}, {"lambda0", l}});
      c.row({num(x), num(d), num(l)});
    }
    const double eps = 1e-7;
    const double left = elstrodt_lambda0(d / 2 - eps, d);
    const double right = elstrodt_lambda0(d / 2 + eps, d);
    const double at = elstrodt_lambda0(d / 2, d);
    c.report.results["continuity"] = json{{"left", left}, {"at", at}, {"right", right},
                                          {"gap", std::fabs(left - right)}};
    c.flush();
  };
}

Plan plan_grigorchuk(const ParamReader& p) {
  const auto rank = rank_of(p);
  const int k = rank.k();
  const auto deltas = p.real_list("deltas");
  const double top = std::log(2.0 * k - 1.0);
  for (double x : deltas) {
    if (!(x >= 0.0 && x <= top + 1e-12)) p.fail("deltas", "each delta must lie in [0, log(2k-1)], got " + num(x));
  }
  const std::size_t depth = p.uint("tree_depth");
  const std::size_t explicit_depth = p.uint("explicit_depth");
  if (depth < 1) p.fail("tree_depth", "must be >= 1");
  return [=](Context& c) {
    c.header({"quantity", "delta", "k", "value"});
    auto& rows = c.report.results["rho"] = json::array();
    for (double x : deltas) {
      const double v = grigorchuk_rho(std::min(x, top), k);
      rows.push_back(json{{"delta", x}, {"rho", v}});
      c.row({"rho", num(x), num(k), num(v)});
    }
    c.flush();
    const double exact = std::sqrt(2.0 * k - 1.0) / k;
    c.report.results["tree_exact"] = exact;
    const auto radial = tree_radial_power_iteration(k, depth);
    c.report.results["tree_radial"] = json{{"depth", depth}, {"value", radial.value},
                                           {"iterations", radial.iterations}, {"change", radial.change}};
    c.row({"tree-radial", "0", num(k), num(radial.value)});
    c.flush();
    if (explicit_depth > 0) {
      if (ball_size(rank, explicit_depth) > c.budget) {
        throw BudgetError("explicit tree exceeds the budget", ball_size(rank, explicit_depth));
      }
      const auto ex = tree_explicit_power_iteration(k, explicit_depth);
      c.report.results["tree_explicit"] = json{{"depth", explicit_depth}, {"value", ex.value},
                                               {"iterations", ex.iterations}, {"change", ex.change}};
      c.row({"tree-explicit", "0", num(k), num(ex.value)});
      c.flush();
    }
  };
}

Plan make_plan(const ExperimentConfig& config) {
  const ParamReader p(config);
  const std::string& e = config.experiment;
  if (e == "drift") return plan_drift(p);
  if (e == "entropy") return plan_entropy(p);
  if (e == "delta-mu") return plan_delta_mu(p);
  if (e == "green") return plan_green(p);
  if (e == "hitting") return plan_hitting(p);
  if (e == "tanaka") return plan_tanaka(p);
  if (e == "poincare") return plan_poincare(p);
  if (e == "subgroup-delta") return plan_subgroup_delta(p);
  if (e == "systole") return plan_systole(p);
  if (e == "confine") return plan_confine(p);
  if (e == "quotient-growth") return plan_quotient(p);
  if (e == "srs") return plan_srs(p);
  if (e == "freeproduct") return plan_freeproduct(p);
  if (e == "elstrodt") return plan_elstrodt(p);
  if (e == "grigorchuk") return plan_grigorchuk(p);
  schema_for(e);
  throw PreconditionError("experiment: no runner for '" + e + "'");
}

}  // namespace

void validate(const ExperimentConfig& config) { (void)make_plan(config); }

RunReport run(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.config = config.with_defaults();
  const std::uint64_t budget = config.budget ? *config.budget : default_budget();
  report.config.budget = budget;
  Plan plan = make_plan(report.config);

  set_budget_override(config.budget ? *config.budget : 0);
  Context ctx{report, RngState{config.seed, config.stream}, std::max(1, options.workers), budget, options};
  try {
    plan(ctx);
  } catch (const Error& e) {
    report.status = e.kind() == ErrorKind::budget       ? "budget-exhausted"
                    : e.kind() == ErrorKind::precondition ? "precondition-failed"
                                                          : "verdict-failed";
    report.message = e.what();
    report.exit_code = exit_code(e.kind());
    if (const auto* b = dynamic_cast<const BudgetError*>(&e); b && b->required() > 0) {
      report.results["budget_required"] = b->required();
    }
  }
  set_budget_override(0);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string to_json(const RunReport& r) {
  json config = json::object();
  config["experiment"] = r.config.experiment;
  config["seed"] = r.config.seed;
  config["stream"] = r.config.stream;
  if (r.config.budget) config["budget"] = *r.config.budget;
  json params = json::object();
  for (const auto& [k, v] : r.config.params) params[k] = v;
  config["params"] = params;

  json j = json::object();
  j["experiment"] = r.config.experiment;
  j["status"] = r.status;
  if (!r.message.empty()) j["message"] = r.message;
  j["artifact_version"] = kArtifactVersion;
  j["provenance"] = json{{"seed", r.config.seed}, {"stream", r.config.stream}, {"code_version", code_version()}};
  j["config"] = config;
  j["results"] = r.results;
  j["wall_time_s"] = r.wall_time_s;
  return j.dump(2) + "\n";
}

std::string to_csv(const RunReport& r) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << quote(cells[i]);
    out << "\n";
  };
  line(r.table.header);
  for (const auto& row : r.table.rows) line(row);
  return out.str();
}

std::string render(const RunReport& report) {
  return report.config.format == "csv" ? to_csv(report) : to_json(report);
}

}  // namespace cogrowth
