// Acceptance suite: one PASS/FAIL line per criterion, with timing. Exit code
// is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "cogrowth/annulus.hpp"
#include "cogrowth/config.hpp"
#include "cogrowth/core_graph.hpp"
#include "cogrowth/estimators.hpp"
#include "cogrowth/free_product.hpp"
#include "cogrowth/green.hpp"
#include "cogrowth/runner.hpp"
#include "cogrowth/spectral.hpp"
#include "cogrowth/srs.hpp"
#include "cogrowth/subgroup.hpp"

using namespace cogrowth;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "MISS ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

const FreeGroupRank k2(2);

CoreGraph sub(std::initializer_list<const char*> gens) {
  std::vector<Word> g;
  for (const char* s : gens) g.push_back(parse_word(k2, s));
  return CoreGraph::fold(k2, g);
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string strip_time(const std::string& text) {
  static const std::regex time_field(",?\n *\"wall_time_s\"[^\n]*");
  return std::regex_replace(text, time_field, "");
}

Outcome c1() {
  Outcome o;
  const double targets[] = {std::log(3.0), std::log(5.0)};
  for (int k : {2, 3}) {
    const auto t0 = std::chrono::steady_clock::now();
    DeltaConfig cfg;
    cfg.walk.horizon = 2000;
    cfg.walk.paths = 2000;
    cfg.walk.rng = RngState{1, 0};
    cfg.method = EntropyMethod::both;
    const auto d = delta_mu(StepDistribution::uniform(FreeGroupRank(k)), cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& r : d.delta) {
      o.require(within_rel(r.value, targets[k - 2], 0.05),
                "k=" + std::to_string(k) + " " + r.method + fmt(" %.4f vs %.4f", r.value, targets[k - 2]));
    }
    o.require(d.delta.size() == 2, "both methods");
    o.require(secs < 120, "k=" + std::to_string(k) + fmt(" %.1fs", secs));
  }
  return o;
}

Outcome c2() {
  Outcome o;
  for (int k : {2, 3}) {
    WalkConfig cfg;
    cfg.rng = RngState{2, 0};
    const auto r = drift_estimate(StepDistribution::uniform(FreeGroupRank(k)), cfg);
    const double l = 1.0 - 1.0 / k;
    o.require(std::abs(r.value - l) <= 3 * r.std_error && within_rel(r.value, l, 0.01),
              "k=" + std::to_string(k) + fmt(" %.5f +- %.5f", r.value, r.std_error));
  }
  return o;
}

Outcome c3() {
  Outcome o;
  const auto mu = StepDistribution::uniform(k2);
  const double fa = first_return_F(mu, parse_word(k2, "a"), 60).value;
  const double fab = first_return_F(mu, parse_word(k2, "ab"), 60).value;
  const double g = green_identity(mu, 60).value;
  o.require(std::abs(fa - 1.0 / 3) < 1e-6, fmt("F(a)=%.9f", fa));
  o.require(std::abs(fab - 1.0 / 9) < 1e-6, fmt("F(ab)=%.9f", fab));
  o.require(std::abs(g - 1.5) < 1e-6, fmt("G=%.9f", g));
  return o;
}

Outcome c4() {
  Outcome o;
  const double targets[] = {2.0, 1.5};
  for (int k : {2, 3}) {
    HittingConfig cfg;
    cfg.rng = RngState{4, 0};
    const auto rows = hitting_ratio_experiment(StepDistribution::uniform(FreeGroupRank(k)), {200}, cfg);
    o.require(within_rel(rows[0].ratio.value, targets[k - 2], 0.05) && rows[0].censored_fraction < 1e-3,
              "k=" + std::to_string(k) + fmt(" tau/i=%.4f censored=%.4f", rows[0].ratio.value, rows[0].censored_fraction));
  }
  return o;
}

Outcome c5() {
  Outcome o;
  HittingConfig cfg;
  cfg.rng = RngState{5, 0};
  const auto rows = tanaka_pointwise_experiment(StepDistribution::uniform(k2), {400}, cfg, 60);
  o.require(within_rel(rows[0].estimate.value, std::log(3.0), 0.05), fmt("i=400 %.4f vs %.4f", rows[0].estimate.value, std::log(3.0)));
  return o;
}

Outcome c6() {
  Outcome o;
  const auto all = all_words(k2);
  const auto at = visited_set_poincare(*all, k2, 30, std::log(3.0), 10'000'000);
  double worst = 0;
  for (std::size_t j = 1; j <= 30; ++j) worst = std::max(worst, std::abs(at[j] - at[j - 1] - 4.0 / 3));
  o.require(worst <= 1e-9, fmt("slope error %.2e, P(30)=%.12f", worst, at[30]));
  const auto above = visited_set_poincare(*all, k2, 600, std::log(3.0) + 0.05, 10'000'000);
  const double tail = above[600] - above[400];
  o.require(std::abs(tail) < 1e-6, fmt("tail beyond 400 %.2e", tail));
  return o;
}

Outcome c7() {
  Outcome o;
  const double d_a = critical_exponent_fg(sub({"a"})).delta();
  const double d_h = critical_exponent_fg(sub({"a", "baB"})).delta();
  const double d_k = critical_exponent_fg(sub({"aa", "ab", "aB"})).delta();
  o.require(d_a == 0.0, fmt("<a> %.3g", d_a));
  o.require(std::abs(d_h - std::log(2.0)) < 1e-9, fmt("<a,bab^-1> err %.1e", d_h - std::log(2.0)));
  o.require(std::abs(d_k - std::log(3.0)) < 1e-9, fmt("index 2 err %.1e", d_k - std::log(3.0)));
  double worst = 0;
  for (std::uint64_t j = 0; j < 20; ++j) {
    const auto h = CoreGraph::fold(k2, random_generators(k2, 2 + j % 2, 6, RngState{11, 0}, j));
    const auto sp = critical_exponent_fg(h);
    worst = std::max(worst, std::abs((sp.empty ? 0.0 : sp.delta()) - ball_count_oracle(h, 16).slope));
  }
  o.require(worst < 0.05, fmt("20 random: worst |NB - slope| %.4f", worst));
  return o;
}

Outcome c8() {
  Outcome o;
  const auto mu = StepDistribution::uniform(k2);
  DeltaConfig dc;
  dc.walk.rng = RngState{8, 0};
  dc.walk.paths = 500;
  dc.method = EntropyMethod::green;
  const auto d = delta_mu(mu, dc);
  SrsConfig cfg;
  cfg.rng = RngState{8, 1};
  cfg.delta_mu = d.primary().value;
  cfg.delta_mu_se = d.primary().std_error;
  const auto v = VisitWindow::ball(k2, 2);
  const double bar = 0.5 * std::log(3.0);

  int fat = 0, fat_pass = 0;
  for (std::uint64_t j = 0; fat < 20 && j < 500; ++j) {
    const auto h = CoreGraph::fold(k2, random_generators(k2, 3, 4, RngState{23, 0}, j));
    const auto sp = critical_exponent_fg(h);
    if (sp.empty || h.is_complete() || sp.delta() < bar + 0.05) continue;
    ++fat;
    fat_pass += srs_delta_experiment(h, mu, v, cfg).verdict == "pass";
  }
  o.require(fat == 20 && fat_pass == 20, std::to_string(fat_pass) + "/" + std::to_string(fat) + " fat subgroups pass");

  int thin_ok = 0;
  for (auto gens : {std::vector<const char*>{"a"}, {"ab"}, {"aaa", "bbb"}, {"aaaa", "bbbb"}, {"aabb"}}) {
    std::vector<Word> g;
    for (const char* s : gens) g.push_back(parse_word(k2, s));
    const auto r = srs_delta_experiment(CoreGraph::fold(k2, g), mu, v, cfg);
    thin_ok += r.verdict == "hypothesis-failed" && !r.hypothesis_evidence;
  }
  o.require(thin_ok == 5, std::to_string(thin_ok) + "/5 thin subgroups hypothesis-failed");
  o.detail += fmt("; delta(mu)=%.4f", cfg.delta_mu);
  return o;
}

Outcome c9() {
  Outcome o;
  int infinite = 0, witnessed = 0, finite = 0, bounded = 0;
  for (const auto& entry : fs::directory_iterator(COGROWTH_FIXTURES "/subgroups")) {
    const auto h = parse_core_graph(read_file(entry.path()));
    const auto v = confinement_probe(h, 50, 1'000'000);
    if (h.is_complete()) {
      ++finite;
      bounded += v.kind == ConfinementVerdict::Kind::confined && v.bound.has_value();
    } else if (!h.is_trivial()) {
      ++infinite;
      bool ok = v.kind == ConfinementVerdict::Kind::witness && v.witness.has_value();
      if (ok) {
        const auto s = schreier_systole(h, *v.witness, 60);
        ok = !s.has_value() || *s > 50;
      }
      witnessed += ok;
    }
  }
  o.require(infinite > 0 && witnessed == infinite, std::to_string(witnessed) + "/" + std::to_string(infinite) + " infinite-index witnesses");
  o.require(finite > 0 && bounded == finite, std::to_string(bounded) + "/" + std::to_string(finite) + " finite-index bounds");
  return o;
}

Outcome c10() {
  Outcome o;
  const double rho = solve_rho(FreeProductSpec::cyclic(2, 3)).rho;
  o.require(std::abs(rho - std::sqrt(2.0)) < 1e-12, fmt("rho(2,3) err %.1e", rho - std::sqrt(2.0)));
  for (auto [a, b] : {std::pair{2, 3}, std::pair{3, 3}}) {
    const auto spec = FreeProductSpec::cyclic(a, b);
    WalkConfig cfg;
    cfg.rng = RngState{10, 0};
    const auto r = fp_walk_delta(spec, solve_rho(spec), cfg);
    const double exact = fp_growth_exact(spec, 16).delta;
    const double target = a == 2 ? 0.5 * std::log(2.0) : std::log(2.0);
    o.require(std::abs(exact - target) < 1e-12 && within_rel(r.delta.value, target, 0.05),
              "(" + std::to_string(a) + "," + std::to_string(b) + ")" + fmt(" walk %.4f exact %.4f", r.delta.value, exact));
  }
  return o;
}

Outcome c11() {
  Outcome o;
  double worst = 0;
  for (double d = 0.5; d <= 4.0; d += 0.5) {
    const double h = d / 2;
    worst = std::max(worst, std::abs(elstrodt_lambda0(std::nextafter(h, 0.0), d) - elstrodt_lambda0(std::nextafter(h, d), d)));
    worst = std::max(worst, std::abs(elstrodt_lambda0(h, d) - d * d / 4));
  }
  o.require(worst <= 1e-12, fmt("Elstrodt jump %.1e", worst));
  const double r0 = grigorchuk_rho(0.0, 2), r1 = grigorchuk_rho(std::log(3.0), 2);
  o.require(std::abs(r0 - std::sqrt(3.0) / 2) < 1e-12 && std::abs(r1 - 1) < 1e-12, fmt("rho(0)=%.13f rho(log3)=%.13f", r0, r1));
  const double tree = tree_radial_power_iteration(2, 64).value;
  const double explicit8 = tree_explicit_power_iteration(2, 8).value;
  const double radial8 = tree_radial_power_iteration(2, 8).value;
  o.require(std::abs(tree - std::sqrt(3.0) / 2) < 1e-2, fmt("tree depth 64 %.6f", tree));
  o.require(std::abs(explicit8 - radial8) < 1e-9, fmt("explicit depth 8 %.6f", explicit8));
  return o;
}

Outcome c12() {
  Outcome o;
  int configs = 0, matched = 0, echoed = 0;
  for (const auto& entry : fs::directory_iterator(COGROWTH_GOLDEN "/configs")) {
    ++configs;
    const auto c = load_config(entry.path());
    const std::string expected = strip_time(read_file(fs::path(COGROWTH_GOLDEN "/expected") / (entry.path().stem().string() + ".out")));
    bool same = true;
    std::string first;
    for (int workers : {1, 8}) {
      RunOptions opts;
      opts.workers = workers;
      const auto report = run(c, opts);
      const std::string out = strip_time(render(report));
      same = same && out == expected;
      if (workers == 1) {
        first = out;
        auto echo = parse_config(serialize(report.config));
        echo.base_dir = c.base_dir;
        echoed += strip_time(render(run(echo, opts))) == out;
      }
    }
    matched += same;
  }
  o.require(configs == 10 && matched == configs, std::to_string(matched) + "/" + std::to_string(configs) + " golden outputs at workers 1 and 8");
  o.require(echoed == configs, std::to_string(echoed) + "/" + std::to_string(configs) + " echoed configs reproduce");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"delta(mu_k) reproduction", c1},     {"drift closed form", c2},
      {"Green function exactness", c3},     {"hitting-time law", c4},
      {"Tanaka decay", c5},                 {"Poincare divergence dichotomy", c6},
      {"exact critical exponents", c7},     {"stationary random subgroup pipeline", c8},
      {"confinement", c9},                  {"free-product lattice", c10},
      {"spectral bridges", c11},            {"reproducibility", c12}};
  const double limits[] = {240, 60, 10, 120, 300, 5, 60, 600, 120, 300, 5, 600};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limits[i]) {
      o.pass = false;
      o.detail += fmt("; over time limit %.0fs", limits[i]);
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed;
}
