#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "cogrowth/errors.hpp"
#include "cogrowth/free_product.hpp"
#include "cogrowth/rng.hpp"
#include "doctest.h"

using namespace cogrowth;

namespace {

FiniteGroupTable s3() {
  // Permutations of {0,1,2}, composed as tables of (p*q)(x) = p(q(x)).
  const std::vector<std::vector<int>> perms{{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
  std::vector<int> table;
  for (const auto& p : perms) {
    for (const auto& q : perms) {
      std::vector<int> r{p[q[0]], p[q[1]], p[q[2]]};
      for (int i = 0; i < 6; ++i) {
        if (perms[i] == r) table.push_back(i);
      }
    }
  }
  return FiniteGroupTable(6, table);
}

FPElement random_element(const FreeProductSpec& spec, CounterRng& rng) {
  FPElement g;
  const auto n = rng.below(7);
  for (std::uint64_t i = 0; i < n; ++i) {
    const int f = static_cast<int>(rng.below(2));
    const int order = f == 0 ? spec.a.order() : spec.b.order();
    fp_append(g, {f, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(order - 1)))}, spec);
  }
  return g;
}

}  // namespace

TEST_CASE("finite group tables") {
  CHECK_NOTHROW(s3());
  CHECK_THROWS_AS(FiniteGroupTable(2, {0, 1, 1, 1}), PreconditionError);
  CHECK_THROWS_AS(FreeProductSpec::cyclic(2, 2), PreconditionError);
  const auto z4 = FiniteGroupTable::cyclic(4);
  CHECK(z4.mul(3, 3) == 2);
  CHECK(z4.inverse(1) == 3);
}

TEST_CASE("normal form examples") {
  const auto spec = FreeProductSpec::cyclic(3, 2);
  FPElement x{{{0, 1}}}, y{{{0, 2}}};
  CHECK(fp_mul(x, y, spec).is_identity());
  FPElement u{{{0, 1}, {1, 1}}}, v{{{1, 1}, {0, 1}}};
  CHECK(fp_mul(u, v, spec) == FPElement{{{0, 2}}});
  CHECK_THROWS_AS(fp_validate(FPElement{{{0, 1}, {0, 1}}}, spec), PreconditionError);
  CHECK_THROWS_AS(fp_validate(FPElement{{{1, 0}}}, spec), PreconditionError);
}

TEST_CASE("group axioms on random triples") {
  for (auto spec : {FreeProductSpec::cyclic(2, 3), FreeProductSpec::cyclic(4, 5), FreeProductSpec(s3(), FiniteGroupTable::cyclic(2))}) {
    CounterRng rng(RngState{17, 0}, static_cast<std::uint64_t>(spec.a.order() * 10 + spec.b.order()));
    for (int t = 0; t < 100000 / 3; ++t) {
      const auto a = random_element(spec, rng), b = random_element(spec, rng), c = random_element(spec, rng);
      CHECK(fp_mul(fp_mul(a, b, spec), c, spec) == fp_mul(a, fp_mul(b, c, spec), spec));
      CHECK(fp_mul(a, fp_inverse(a, spec), spec).is_identity());
      CHECK_NOTHROW(fp_validate(fp_mul(a, b, spec), spec));
    }
  }
}

TEST_CASE("spec text round trip") {
  const FreeProductSpec spec(s3(), FiniteGroupTable::cyclic(2));
  const auto back = parse_free_product_spec(serialize(spec));
  CHECK(back.a.table() == spec.a.table());
  CHECK(back.b.table() == spec.b.table());
}

TEST_CASE("rho solves the lattice equation") {
  CHECK(std::abs(solve_rho(FreeProductSpec::cyclic(2, 3)).rho - std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(solve_rho(FreeProductSpec::cyclic(3, 3)).rho - 2.0) < 1e-12);
  for (int a = 2; a <= 10; ++a) {
    for (int b = 2; b <= 10; ++b) {
      if ((a - 1) * (b - 1) < 2) continue;
      const auto m = solve_rho(FreeProductSpec::cyclic(a, b));
      const double lhs = (a - 1) / (a - 1 + m.rho) + (b - 1) / (b - 1 + m.rho);
      CHECK(std::abs(lhs - 1.0) < 1e-12);
      CHECK(m.residual < 1e-12);
      CHECK(m.rho > 0);
    }
  }
}

TEST_CASE("orbit growth against enumeration") {
  for (auto spec : {FreeProductSpec::cyclic(2, 3), FreeProductSpec::cyclic(3, 3), FreeProductSpec(s3(), FiniteGroupTable::cyclic(2))}) {
    const std::size_t n_max = 8;
    const auto g = fp_growth_exact(spec, n_max);
    CHECK(g.vertices[0] == 1);
    CHECK(g.orbit[0] == 1);
    // Orbit points g v_A are cosets gA: strip a trailing A syllable.
    std::set<std::vector<std::pair<int, int>>> cosets;
    std::vector<std::uint64_t> brute(n_max + 1, 0);
    fp_for_each(spec, n_max + 1, [&](const FPElement& x) {
      FPElement rep = x;
      if (!rep.syllables.empty() && rep.syllables.back().factor == 0) rep.syllables.pop_back();
      if (rep.tree_length() > n_max) return;
      std::vector<std::pair<int, int>> key;
      for (const auto& s : rep.syllables) key.emplace_back(s.factor, s.element);
      if (cosets.insert(key).second) ++brute[rep.tree_length()];
    });
    CHECK(g.orbit == brute);
    CHECK(g.delta == doctest::Approx(0.5 * std::log((spec.a.order() - 1.0) * (spec.b.order() - 1.0))));
  }
  CHECK(fp_growth_exact(FreeProductSpec::cyclic(3, 3), 4).delta == doctest::Approx(std::log(2.0)));
}

TEST_CASE("first passage in the lattice") {
  // For |A| = |B| the two factors are symmetric and x = 1/rho.
  const auto spec = FreeProductSpec::cyclic(3, 3);
  const auto p = fp_first_passage(spec, solve_rho(spec), 400);
  CHECK(p.x_a == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(p.x_b == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("lattice walk") {
  const auto spec = FreeProductSpec::cyclic(2, 3);
  WalkConfig cfg;
  cfg.horizon = 400;
  cfg.paths = 100;
  cfg.rng = RngState{2, 0};
  const auto r = fp_walk_delta(spec, solve_rho(spec), cfg, 200);
  CHECK(r.syllable_drift.value > 0);
  CHECK(r.drift.value > 0);
  const auto again = fp_walk_delta(spec, solve_rho(spec), cfg, 200);
  CHECK(again.delta.value == r.delta.value);
  cfg.workers = 3;
  CHECK(fp_walk_delta(spec, solve_rho(spec), cfg, 200).delta.value == r.delta.value);
}
