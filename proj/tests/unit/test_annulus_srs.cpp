#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "cogrowth/annulus.hpp"
#include "cogrowth/errors.hpp"
#include "cogrowth/srs.hpp"
#include "cogrowth/subgroup.hpp"
#include "doctest.h"

using namespace cogrowth;

namespace {

const FreeGroupRank k2(2);

Word w2(const char* s) { return parse_word(k2, s); }

CoreGraph sub(std::initializer_list<const char*> gens) {
  std::vector<Word> g;
  for (const char* s : gens) g.push_back(w2(s));
  return CoreGraph::fold(k2, g);
}

HittingConfig small_config(std::size_t paths, std::uint64_t seed) {
  HittingConfig c;
  c.paths = paths;
  c.rng = RngState{seed, 0};
  return c;
}

}  // namespace

TEST_CASE("annulus windows") {
  CHECK(AnnulusSpec{1, 0.5}.lower() == 0);
  CHECK(AnnulusSpec{4, 0.5}.lower() == 2);
  CHECK(AnnulusSpec{10, 0.5}.lower() == 7);
  CHECK(AnnulusSpec{8, 1.0 / 3}.lower() == 6);
  CHECK(AnnulusSpec{400, 0.5}.lower() == 380);
  for (std::size_t i = 1; i < 500; ++i) {
    const AnnulusSpec s{i, 1.0 / 3};
    const double real_lower = static_cast<double>(i) - std::pow(static_cast<double>(i), 1.0 / 3);
    CHECK(static_cast<double>(s.lower()) >= real_lower - 1e-9);
    CHECK(static_cast<double>(s.lower()) < real_lower + 1);
  }
  CHECK_THROWS_AS(AnnulusSpec({5, 1.5}).validate(), PreconditionError);
  CHECK_THROWS_AS(AnnulusSpec({0, 0.5}).validate(), PreconditionError);
}

TEST_CASE("first hitting times") {
  const auto mu = StepDistribution::uniform(k2);
  int two = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    const auto p = sample_path(mu, 20, RngState{static_cast<std::uint64_t>(t), 3});
    const auto one = first_hitting_time(p, {1, 0.5});
    CHECK_FALSE(one.censored);
    CHECK(one.tau == 1);
    const auto four = first_hitting_time(p, {4, 0.5});
    if (!four.censored) {
      CHECK(four.point.length() >= 2);
      CHECK(four.point.length() <= 4);
      for (std::size_t n = 1; n < four.tau; ++n) CHECK(p.lengths[n] < 2);
    }
    two += !four.censored && four.tau == 2;
  }
  CHECK(std::abs(two / double(trials) - 0.75) < 4 * std::sqrt(0.75 * 0.25 / trials));

  const auto ray = sample_path(StepDistribution::point_mass(w2("a")), 30, RngState{});
  const auto h = first_hitting_time(ray, {10, 0.5});
  CHECK(h.tau == 7);
  CHECK(to_string(h.point) == "aaaaaaa");
  CHECK(first_hitting_time(ray, {40, 0.5}).censored);
}

TEST_CASE("hitting ratio for a deterministic ray") {
  auto cfg = small_config(20, 1);
  const auto rows = hitting_ratio_experiment(StepDistribution::point_mass(w2("a")), {50}, cfg);
  const double lower = static_cast<double>(AnnulusSpec{50, cfg.q}.lower());
  CHECK(rows[0].ratio.value == doctest::Approx(lower / 50));
  CHECK(rows[0].censored_fraction == 0.0);
}

TEST_CASE("hitting measure bookkeeping") {
  HittingMeasureEstimate e;
  e.annulus = {3, 0.5};
  HittingSample s;
  s.censored = false;
  s.point = w2("ab");
  e.add(s);
  e.add(s);
  HittingSample c;
  e.add(c);
  CHECK(e.total == 3);
  CHECK(e.censored == 1);
  CHECK(e.probability(w2("ab")) == doctest::Approx(2.0 / 3));
  HittingMeasureEstimate f = e;
  e.merge(f);
  CHECK(e.total == 6);
  CHECK(e.probability(w2("ab")) == doctest::Approx(2.0 / 3));
}

TEST_CASE("support counts") {
  auto cfg = small_config(2000, 5);
  const auto pm = hitting_support_count(StepDistribution::point_mass(w2("a")), 5, 0.5, 0.0, cfg);
  CHECK(pm.count == 1);
  CHECK(pm.degenerate);

  const auto mu = StepDistribution::uniform(k2);
  const auto two = hitting_support_count(mu, 2, 1.0, std::log(3.0), cfg);
  CHECK(two.count == two.distinct);
  CHECK(two.distinct <= 1 + 4 + 12);
  CHECK_THROWS_AS(hitting_support_count(mu, 8, 0.5, std::log(3.0), small_config(100, 5)), BudgetError);
}

TEST_CASE("visited-set Poincare sums") {
  const double s = std::log(3.0);
  const auto all = visited_set_poincare(*all_words(k2), k2, 30, s, 1'000'000);
  CHECK(all[30] == doctest::Approx(40.0).epsilon(1e-12));
  const auto axis = visited_set_poincare(*axis_words(w2("a")), k2, 60, s, 1'000'000);
  CHECK(axis.back() == doctest::Approx(1.0).epsilon(1e-12));
  const auto none = visited_set_poincare(*no_words(), k2, 10, s, 1'000'000);
  for (double v : none) CHECK(v == 0.0);

  // Exact shell counts against membership enumeration.
  for (const char* spec : {"mod-length:1,3", "axis:ab", "all"}) {
    const auto w = parse_word_set(k2, spec);
    std::vector<double> brute(9, 0.0);
    for_each_in_ball(k2, 8, 1'000'000, [&](const Word& g) {
      if (w->contains(g)) brute[g.length()] += 1;
    });
    const auto logs = shell_log_counts(*w, k2, 8, 1'000'000);
    for (std::size_t n = 0; n <= 8; ++n) {
      CHECK(std::exp(logs[n]) == doctest::Approx(brute[n]).epsilon(1e-12));
    }
  }
}

TEST_CASE("weighted visited Poincare") {
  const auto mu = StepDistribution::uniform(k2);
  auto cfg = small_config(40, 2);
  const auto all = all_words(k2);
  const auto one = weighted_visited_poincare(mu, *all, parse_radial_weight("one"), 40, 0.1, std::log(3.0),
                                             0.5, cfg, 500);
  CHECK(one.running_max.back() > 0);
  CHECK(one.bounded_away);
  CHECK(one.values.back() > one.values.front());
  CHECK_FALSE(one.hypothesis_violation);

  const auto harm = weighted_visited_poincare(mu, *all, parse_radial_weight("harmonic"), 40, 0.1,
                                              std::log(3.0), 0.5, cfg, 500);
  CHECK(harm.running_max.back() > 0);
  CHECK_FALSE(harm.hypothesis_violation);

  const auto ex = weighted_visited_poincare(mu, *all, parse_radial_weight("exp:1"), 20, 0.1,
                                            std::log(3.0), 0.5, cfg, 500);
  CHECK(ex.hypothesis_violation);
}

TEST_CASE("Cesaro sampling at N = 1") {
  const auto base = sub({"a"});
  const auto mu = StepDistribution::uniform(k2);
  std::map<std::string, int> seen;
  const int draws = 40000;
  for (int t = 0; t < draws; ++t) {
    const auto d = cesaro_sample(base, mu, 1, RngState{8, 0}, static_cast<std::uint64_t>(t));
    CHECK(d.steps == 1);
    ++seen[serialize(d.graph)];
  }
  const std::map<std::string, double> expected{{serialize(base), 0.5},
                                               {serialize(sub({"Bab"})), 0.25},
                                               {serialize(sub({"baB"})), 0.25}};
  double tv = 0;
  for (const auto& [g, p] : expected) tv += std::abs(p - seen[g] / double(draws));
  CHECK(seen.size() == 3);
  CHECK(tv / 2 < 0.01);

  const auto normal = sub({"aa", "ab", "aB"});
  for (int t = 0; t < 50; ++t) {
    CHECK(cesaro_sample(normal, mu, 20, RngState{1, 1}, static_cast<std::uint64_t>(t)).graph == normal);
  }
  const auto x = cesaro_sample(base, mu, 30, RngState{3, 0}, 7);
  const auto y = cesaro_sample(base, mu, 30, RngState{3, 0}, 7);
  CHECK(x.graph == y.graph);
  CHECK(x.graph == conjugate_subgroup(base, x.conjugator));
}

TEST_CASE("window tester against brute force") {
  const auto h = sub({"a", "baB"});
  const auto v = VisitWindow::ball(k2, 2);
  CHECK(v.words.size() == 16);
  const WindowTester t(h, v);
  for_each_in_ball(k2, 5, 1'000'000, [&](const Word& g) {
    bool brute = false;
    for (const auto& x : v.words) brute |= membership(h, conjugate(g, x));
    CHECK(t.meets(g) == brute);
  });
  CHECK_THROWS_AS(VisitWindow::list({}), PreconditionError);
  CHECK_THROWS_AS(VisitWindow::list({Word(k2)}), PreconditionError);
}

TEST_CASE("visit frequencies") {
  const auto mu = StepDistribution::uniform(k2);
  const auto v = VisitWindow::ball(k2, 2);
  const auto fin = visit_frequency(sub({"aa", "ab", "aB"}), v, mu, 300, 8, RngState{2, 0});
  CHECK(fin.frequency == 1.0);
  const auto triv = visit_frequency(sub({}), v, mu, 300, 8, RngState{2, 0});
  CHECK(triv.frequency == 0.0);
  const auto thin = visit_frequency(sub({"a"}), v, mu, 2000, 8, RngState{2, 0});
  CHECK(thin.frequency < 0.02);
  CHECK(thin.running.back() < thin.running[9]);
  const auto par = visit_frequency(sub({"a"}), v, mu, 2000, 8, RngState{2, 0}, 4);
  CHECK(par.frequency == thin.frequency);
}

TEST_CASE("srs pipeline examples") {
  const auto mu = StepDistribution::uniform(k2);
  SrsConfig cfg;
  cfg.steps = 800;
  cfg.paths = 8;
  cfg.rng = RngState{5, 0};
  cfg.delta_mu = std::log(3.0);
  cfg.delta_mu_se = 0.005;
  const auto v = VisitWindow::ball(k2, 2);

  const auto k = srs_delta_experiment(sub({"aa", "ab", "aB"}), mu, v, cfg);
  CHECK(k.verdict == "pass");
  CHECK(std::abs(k.delta - std::log(3.0)) < 1e-9);
  CHECK(k.delta_poincare.verdict == Verdict::diverging);

  const auto h = srs_delta_experiment(sub({"a", "baB"}), mu, v, cfg);
  CHECK(h.verdict == "pass");
  CHECK(h.delta_check);

  const auto a = srs_delta_experiment(sub({"a"}), mu, v, cfg);
  CHECK(a.verdict == "hypothesis-failed");
  CHECK_FALSE(a.hypothesis_evidence);
}

TEST_CASE("conjugacy growth bound") {
  const auto a = conjugacy_growth_bound_check(w2("a"), 5, 10'000'000);
  for (const auto& row : a) CHECK(row.holds);
  CHECK(a.back().r == 5);
  CHECK(a.back().lhs >= 17);

  const auto e = conjugacy_growth_bound_check(Word(k2), 6, 10'000'000);
  for (const auto& row : e) {
    CHECK(row.lhs == ball_size(k2, row.r));
    CHECK(row.rhs == ball_size(k2, row.r / 2));
  }
  // Brute force for gamma = ab.
  const Word g = w2("ab");
  const auto rows = conjugacy_growth_bound_check(g, 6, 10'000'000);
  for (const auto& row : rows) {
    std::uint64_t lhs = 0;
    for_each_in_ball(k2, row.r, 10'000'000, [&](const Word& x) { lhs += conjugate(x, g).length() <= row.r; });
    CHECK(row.lhs == lhs);
    if (row.r < 2) {
      CHECK(row.rhs == 0);
      CHECK(row.lhs == 0);
    }
    CHECK(row.holds);
  }
}
