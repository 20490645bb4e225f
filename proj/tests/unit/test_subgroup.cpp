#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "cogrowth/core_graph.hpp"
#include "cogrowth/errors.hpp"
#include "cogrowth/quotient.hpp"
#include "cogrowth/spectral.hpp"
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

// Elements of length <= max_len among products of at most `factors`
// generators and inverses. Complete when the generators are Nielsen reduced
// and factors >= max_len.
std::set<std::string> products(const std::vector<Word>& gens, std::size_t factors, std::size_t max_len) {
  std::vector<Word> alphabet;
  for (const auto& g : gens) {
    alphabet.push_back(g);
    alphabet.push_back(inverse(g));
  }
  std::set<std::string> out{"1"};
  std::vector<Word> frontier{Word(k2)};
  for (std::size_t f = 0; f < factors; ++f) {
    std::vector<Word> next;
    for (const auto& w : frontier) {
      for (const auto& x : alphabet) {
        Word p = mul(w, x);
        if (p.length() <= max_len + 12) next.push_back(p);
        if (p.length() <= max_len) out.insert(to_string(p));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

std::vector<std::uint64_t> member_counts(const CoreGraph& h, std::size_t radius) {
  std::vector<std::uint64_t> c(radius + 1, 0);
  for_each_in_ball(h.rank(), radius, 100'000'000, [&](const Word& w) {
    if (membership(h, w)) ++c[w.length()];
  });
  return c;
}

}  // namespace

TEST_CASE("fold examples") {
  const auto a = sub({"a"});
  CHECK(a.vertex_count() == 1);
  CHECK(a.edge_count() == 1);
  CHECK(a.target(0, letter_index(1)) == 0);

  const auto h = sub({"a", "baB"});
  CHECK(h.vertex_count() == 2);
  CHECK(h.edge_count() == 3);
  for (int v = 0; v < 2; ++v) CHECK(h.target(v, letter_index(1)) == v);

  const auto f = sub({"a", "b"});
  CHECK(f.vertex_count() == 1);
  CHECK(f.is_complete());
  CHECK(sub({}).is_trivial());
  CHECK(sub({"ab", "aB"}).vertex_count() == sub({"ab", "aB"}).vertex_count());
  CHECK(sub({"aa", "ab", "aB"}).vertex_count() == 2);
  CHECK(sub({"aa", "ab", "aB"}).is_complete());
}

TEST_CASE("membership examples") {
  CHECK(membership(sub({"a"}), w2("aaa")));
  CHECK_FALSE(membership(sub({"a"}), w2("baB")));
  CHECK(membership(sub({"a", "baB"}), w2("baaBA")));
  CHECK_FALSE(membership(sub({"a", "baB"}), w2("b")));
}

TEST_CASE("membership against generator products") {
  for (auto gens : {std::vector<const char*>{"a", "baB"}, {"aaa", "bbb"}, {"abAB"}, {"aa", "bb"}}) {
    std::vector<Word> g;
    for (const char* s : gens) g.push_back(w2(s));
    const auto h = CoreGraph::fold(k2, g);
    const auto oracle = products(g, 7, 7);
    std::set<std::string> found;
    for_each_in_ball(k2, 7, 1'000'000, [&](const Word& w) {
      if (membership(h, w)) found.insert(to_string(w));
    });
    CHECK(found == oracle);
  }
}

TEST_CASE("basis generates the same subgroup") {
  const auto h = sub({"aab", "bAb", "abab"});
  const auto again = CoreGraph::fold(k2, h.basis());
  CHECK(again == h);
  CHECK(parse_core_graph(serialize(h)) == h);
}

TEST_CASE("conjugate subgroups") {
  const auto a = sub({"a"});
  const auto ab = conjugate_subgroup(a, w2("b"));
  CHECK(ab == sub({"Bab"}));
  CHECK(conjugate_subgroup(ab, w2("B")) == a);

  const auto k = sub({"aa", "ab", "aB"});
  for (const char* g : {"a", "b", "abA", "bbaB"}) {
    const auto c = conjugate_subgroup(k, w2(g));
    CHECK(c.vertex_count() == k.vertex_count());
    CHECK(c.is_complete());
    CHECK(member_counts(c, 6) == member_counts(k, 6));
  }

  const auto h = sub({"a", "baB", "abbA"});
  for (const char* g : {"b", "ab", "BaB"}) {
    const Word gw = w2(g);
    const auto c = conjugate_subgroup(h, gw);
    for_each_in_ball(k2, 6, 1'000'000, [&](const Word& x) {
      CHECK(membership(c, x) == membership(h, conjugate(gw, x)));
    });
    CHECK(critical_exponent_fg(c).delta() == doctest::Approx(critical_exponent_fg(h).delta()).epsilon(1e-10));
  }
}

TEST_CASE("critical exponents") {
  CHECK(critical_exponent_fg(sub({"a"})).delta() == doctest::Approx(0.0));
  CHECK(std::abs(critical_exponent_fg(sub({"a", "baB"})).delta() - std::log(2.0)) < 1e-9);
  CHECK(std::abs(critical_exponent_fg(sub({"aa", "ab", "aB"})).delta() - std::log(3.0)) < 1e-9);
  CHECK(std::abs(critical_exponent_fg(sub({"a", "b"})).delta() - std::log(3.0)) < 1e-9);
  const auto e = critical_exponent_fg(sub({}));
  CHECK(e.empty);
  CHECK(std::isinf(e.delta()));
  // Rank 3, index 2: Perron value 2k - 1 = 5.
  const FreeGroupRank k3(3);
  const auto h3 = CoreGraph::fold(k3, std::vector<Word>{parse_word(k3, "aa"), parse_word(k3, "ab"),
                                                        parse_word(k3, "aB"), parse_word(k3, "ac"),
                                                        parse_word(k3, "aC")});
  CHECK(std::abs(critical_exponent_fg(h3).delta() - std::log(5.0)) < 1e-9);
}

TEST_CASE("ball counts against enumeration") {
  for (auto gens : {std::vector<const char*>{"a"}, {"a", "baB"}, {"aa", "bb"}, {"abAB"}, {"aab", "bAb"},
                    {"aa", "ab", "aB"}}) {
    std::vector<Word> g;
    for (const char* s : gens) g.push_back(w2(s));
    const auto h = CoreGraph::fold(k2, g);
    const auto bc = ball_count_oracle(h, 8);
    CHECK(bc.counts == member_counts(h, 8));
  }
  const auto a = ball_count_oracle(sub({"a"}), 10);
  for (std::size_t n = 1; n <= 10; ++n) CHECK(a.counts[n] == 2);
  const auto f = ball_count_oracle(sub({"a", "b"}), 10);
  for (std::size_t n = 1; n <= 10; ++n) CHECK(f.counts[n] == sphere_size(k2, n));
  // x_{n+1} = x_n + 2 y_n, y_{n+1} = x_n has Perron value 2.
  const auto h = ball_count_oracle(sub({"a", "baB"}), 16);
  CHECK(std::abs(h.slope - std::log(2.0)) < 0.05);
}

TEST_CASE("NB exponent matches ball-count slope on random subgroups") {
  for (std::uint64_t j = 0; j < 10; ++j) {
    const auto h = CoreGraph::fold(k2, random_generators(k2, 2 + j % 2, 6, RngState{11, 0}, j));
    const auto sp = critical_exponent_fg(h);
    const auto bc = ball_count_oracle(h, 16);
    CHECK(std::abs((sp.empty ? 0.0 : sp.delta()) - bc.slope) < 0.05);
  }
}

TEST_CASE("Poincare partial sums") {
  const auto f = poincare_partial(sub({"a", "b"}), std::log(3.0), 30);
  CHECK(f.partial_sums[30] == doctest::Approx(41.0).epsilon(1e-12));
  CHECK(f.verdict == Verdict::diverging);

  const auto a = poincare_partial(sub({"a"}), 0.1, 600);
  const double closed = 1 + 2 * std::exp(-0.1) / (1 - std::exp(-0.1));
  CHECK(a.partial_sums.back() == doctest::Approx(closed).epsilon(1e-9));
  CHECK(closed == doctest::Approx(20.0).epsilon(0.01));
  CHECK(a.verdict == Verdict::converging);
  CHECK(poincare_partial(sub({"a"}), 0.0, 50).verdict == Verdict::diverging);

  const auto above = poincare_partial(sub({"a", "b"}), std::log(3.0) + 0.05, 600);
  CHECK(above.verdict == Verdict::converging);
}

TEST_CASE("Schreier systoles") {
  const auto k = sub({"aa", "ab", "aB"});
  for (const char* g : {"a", "b", "ab", "BBa"}) CHECK(schreier_systole(k, w2(g), 6) == 2u);
  CHECK(schreier_systole(sub({"a"}), Word(k2), 4) == 1u);
  CHECK_FALSE(schreier_systole(sub({"a"}), w2("bbbbb"), 5).has_value());
  CHECK(schreier_systole(sub({"a"}), w2("bbbbb"), 6) == 11u);

  // Brute force: shortest nontrivial x with g x g^-1 in H.
  const auto h = sub({"a", "baB"});
  for (const char* g : {"b", "bb", "ab", "Ba"}) {
    const Word gw = w2(g);
    std::size_t best = 0;
    for_each_in_ball(k2, 7, 1'000'000, [&](const Word& x) {
      if (!x.is_identity() && best == 0 && membership(h, conjugate(gw, x))) best = x.length();
    });
    CHECK(schreier_systole(h, gw, 8) == best);
  }
}

TEST_CASE("confinement") {
  const auto a = confinement_probe(sub({"a"}), 100, 100000);
  REQUIRE(a.kind == ConfinementVerdict::Kind::witness);
  REQUIRE(a.witness.has_value());
  const auto s = schreier_systole(sub({"a"}), *a.witness, 120);
  CHECK((!s.has_value() || *s > 100));

  const auto h = confinement_probe(sub({"a", "baB"}), 50, 100000);
  CHECK(h.kind == ConfinementVerdict::Kind::witness);

  const auto k = confinement_probe(sub({"aa", "ab", "aB"}), 50, 100000);
  CHECK(k.kind == ConfinementVerdict::Kind::confined);
  CHECK(k.bound == 2u);
  const auto f = confinement_probe(sub({"a", "b"}), 50, 100000);
  CHECK(f.bound == 1u);
}

TEST_CASE("semicontinuity") {
  std::vector<CoreGraph> seq;
  for (int n = 1; n <= 8; ++n) {
    std::string w = "b" + std::string(static_cast<std::size_t>(n), 'a') + "B";
    seq.push_back(CoreGraph::fold(k2, std::vector<Word>{w2("a"), parse_word(k2, w)}));
  }
  const auto r = delta_semicontinuity_check(seq, sub({"a"}));
  CHECK(r.holds);
  for (double d : r.deltas) CHECK(d > 0.0);
  for (std::size_t i = 1; i < r.deltas.size(); ++i) CHECK(r.deltas[i] <= r.deltas[i - 1] + 1e-12);

  const auto h = sub({"a", "baB"});
  std::vector<CoreGraph> conj;
  Word g(k2);
  for (int n = 0; n < 5; ++n) {
    conj.push_back(conjugate_subgroup(h, g));
    g = mul(g, w2("b"));
  }
  const auto c = delta_semicontinuity_check(conj, h);
  CHECK(c.holds);
  CHECK(c.liminf == doctest::Approx(c.limit_delta).epsilon(1e-10));
}

TEST_CASE("quotient growth") {
  const auto t = quotient_dp_growth(*trivial_quotient(k2), 10, 1000);
  for (std::size_t n = 1; n <= 10; ++n) CHECK(t.counts[n] == sphere_size(k2, n));
  CHECK(std::abs(t.delta - std::log(3.0)) < 0.05);

  const auto z2 = quotient_dp_growth(*cyclic_quotient(k2, 2, {1, 1}), 12, 1000);
  CHECK(z2.counts == ball_count_oracle(sub({"aa", "ab", "aB"}), 12).counts);

  const auto fr = quotient_dp_growth(*free_quotient(k2), 8, 1'000'000);
  for (std::size_t n = 1; n <= 8; ++n) CHECK(fr.counts[n] == 0);
  CHECK(fr.trivial_kernel);
  CHECK(fr.delta == 0.0);

  // S3 via a -> (0 1), b -> (1 2): kernel has index 6.
  const auto s3 = quotient_dp_growth(*parse_quotient(k2, "perm:1,0,2;0,2,1"), 8, 1000);
  CHECK(s3.states == 6);
  std::vector<std::uint64_t> brute(9, 0);
  const auto oracle = parse_quotient(k2, "perm:1,0,2;0,2,1");
  for_each_in_ball(k2, 8, 1'000'000, [&](const Word& w) {
    Handle h = oracle->identity();
    for (Letter x : w.letters()) h = oracle->multiply(h, letter_index(x));
    if (h == oracle->identity()) ++brute[w.length()];
  });
  CHECK(s3.counts == brute);
  CHECK_THROWS_AS(quotient_dp_growth(*free_quotient(k2), 12, 100), BudgetError);
}

TEST_CASE("spectral bridges") {
  CHECK(elstrodt_lambda0(0.3, 1) == doctest::Approx(0.25));
  CHECK(elstrodt_lambda0(1, 1) == doctest::Approx(0.0));
  CHECK(elstrodt_lambda0(0.75, 1) == doctest::Approx(0.1875));
  for (double d : {1.0, 2.0, 3.0}) {
    CHECK(std::abs(elstrodt_lambda0(d / 2, d) - elstrodt_lambda0(std::nextafter(d / 2, d), d)) < 1e-12);
  }

  // rho = sqrt(2k-1)/k below the threshold, else (sqrt(2k-1)/2k)(q/a + a/q), a = e^delta, q = sqrt(2k-1).
  for (int k : {2, 3}) {
    const double q = std::sqrt(2.0 * k - 1);
    for (double d = 0; d <= std::log(2.0 * k - 1); d += 0.01) {
      const double a = std::exp(d);
      const double expect = a <= q ? q / k : (q / (2.0 * k)) * (q / a + a / q);
      CHECK(grigorchuk_rho(d, k) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK(std::abs(grigorchuk_rho(0, 2) - std::sqrt(3.0) / 2) < 1e-12);
  CHECK(std::abs(grigorchuk_rho(std::log(3.0), 2) - 1) < 1e-12);
  CHECK(std::abs(grigorchuk_rho(0.5 * std::log(3.0), 2) - std::sqrt(3.0) / 2) < 1e-12);
  CHECK(std::abs(grigorchuk_rho(critical_exponent_fg(sub({"aa", "ab", "aB"})).delta(), 2) - 1) < 1e-12);

  CHECK(std::abs(tree_radial_power_iteration(2, 64).value - std::sqrt(3.0) / 2) < 1e-2);
  CHECK(tree_explicit_power_iteration(2, 6).value ==
        doctest::Approx(tree_radial_power_iteration(2, 6).value).epsilon(1e-9));
}
