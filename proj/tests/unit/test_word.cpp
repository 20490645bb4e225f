#include <cmath>
#include <set>
#include <vector>

#include "cogrowth/errors.hpp"
#include "cogrowth/rng.hpp"
#include "cogrowth/word.hpp"
#include "doctest.h"

using namespace cogrowth;

namespace {

// Naive reduction with a stack, independent of Word::push_reduced.
std::vector<int> naive_reduce(const std::vector<int>& raw) {
  std::vector<int> out;
  for (int x : raw) {
    if (!out.empty() && out.back() == -x) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

std::vector<int> letters_of(const Word& w) {
  std::vector<int> v;
  for (Letter x : w.letters()) v.push_back(x);
  return v;
}

}  // namespace

TEST_CASE("rank bounds") {
  CHECK_THROWS_AS(FreeGroupRank(1), PreconditionError);
  CHECK_THROWS_AS(FreeGroupRank(27), PreconditionError);
  CHECK(FreeGroupRank(26).letters() == 52);
}

TEST_CASE("reduce and multiply") {
  const FreeGroupRank r(2);
  CHECK(Word::reduce(r, {1, 2, -2, -1}).is_identity());
  CHECK(to_string(Word::reduce(r, {1, 2, -2, 2})) == "ab");
  CHECK(to_string(mul(parse_word(r, "ab"), parse_word(r, "Ba"))) == "aa");
  CHECK(to_string(mul(parse_word(r, "ab"), parse_word(r, "BA"))) == "1");
  CHECK(to_string(parse_word(r, "aAb")) == "b");
  CHECK(to_string(inverse(parse_word(r, "abA"))) == "aBA");
  CHECK_THROWS_AS(Word::reduce(r, {3}), PreconditionError);
  CHECK_THROWS_AS(parse_word(r, "c"), PreconditionError);
}

TEST_CASE("conjugate") {
  const FreeGroupRank r(2);
  CHECK(to_string(conjugate(parse_word(r, "b"), parse_word(r, "a"))) == "baB");
  CHECK(to_string(conjugate(parse_word(r, "a"), parse_word(r, "a"))) == "a");
  CHECK(to_string(conjugate(parse_word(r, "ab"), parse_word(r, "Ba"))) == "aaBA");
  CHECK(to_string(conjugate(parse_word(r, "ab"), parse_word(r, "b"))) == "abA");
}

TEST_CASE("random words agree with naive reduction; associativity; conjugate bound") {
  for (int k : {2, 3, 4}) {
    const FreeGroupRank r(k);
    CounterRng rng(RngState{99, static_cast<std::uint64_t>(k)}, 0);
    auto random_raw = [&](std::size_t len) {
      std::vector<int> raw;
      for (std::size_t i = 0; i < len; ++i) {
        const int g = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        raw.push_back(rng.below(2) ? g : -g);
      }
      return raw;
    };
    for (int t = 0; t < 2000; ++t) {
      const auto ra = random_raw(rng.below(12));
      const auto rb = random_raw(rng.below(12));
      const auto rc = random_raw(rng.below(12));
      const Word a = Word::reduce(r, ra), b = Word::reduce(r, rb), c = Word::reduce(r, rc);
      CHECK(letters_of(a) == naive_reduce(ra));
      auto cat = ra;
      cat.insert(cat.end(), rb.begin(), rb.end());
      CHECK(letters_of(mul(a, b)) == naive_reduce(cat));
      CHECK(mul(mul(a, b), c) == mul(a, mul(b, c)));
      CHECK(mul(a, inverse(a)).is_identity());
      const Word x = conjugate(a, b);
      CHECK(x.length() <= 2 * a.length() + b.length());
      CHECK(x == mul(mul(a, b), inverse(a)));
      CHECK(parse_word(r, to_string(a)) == a);
    }
  }
}

TEST_CASE("sphere sizes against enumeration") {
  for (int k : {2, 3, 4}) {
    const FreeGroupRank r(k);
    for (std::size_t n = 0; n <= 8; ++n) {
      const std::uint64_t expected =
          n == 0 ? 1 : static_cast<std::uint64_t>(2 * k * std::pow(2 * k - 1, n - 1) + 0.5);
      CHECK(sphere_size(r, n) == expected);
      if (k == 4 && n > 6) continue;
      SphereEnumerator e(r, n, 100'000'000);
      Word w(r);
      std::uint64_t count = 0;
      std::set<std::vector<int>> seen;
      while (e.next(w)) {
        ++count;
        CHECK(w.length() == n);
        if (n <= 4) seen.insert(letters_of(w));
      }
      CHECK(count == expected);
      if (n <= 4) CHECK(seen.size() == expected);
    }
  }
  CHECK_THROWS_AS(SphereEnumerator(FreeGroupRank(2), 20, 1000), BudgetError);
}

TEST_CASE("ball enumeration") {
  const FreeGroupRank r(3);
  std::uint64_t n = 0;
  for_each_in_ball(r, 4, 1'000'000, [&](const Word&) { ++n; });
  CHECK(n == ball_size(r, 4));
  CHECK(ball_size(r, 4) == 1 + 6 + 30 + 150 + 750);
}

TEST_CASE("Philox known answer") {
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);
}

TEST_CASE("rng streams are reproducible and distinct") {
  CounterRng a(RngState{1, 2}, 3), b(RngState{1, 2}, 3), c(RngState{1, 2}, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  CounterRng u(RngState{5, 0}, 0);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    CHECK((v >= 0.0 && v < 1.0));
    sum += v;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  std::vector<int> hist(7);
  for (int i = 0; i < 70000; ++i) ++hist[u.below(7)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}
