#include "cogrowth/word.hpp"

#include <atomic>
#include <cctype>
#include <cstdlib>
#include <limits>

#include "cogrowth/errors.hpp"

namespace cogrowth {

namespace {
std::atomic<std::uint64_t> g_budget_override{0};
}

void set_budget_override(std::uint64_t budget) { g_budget_override.store(budget); }

std::uint64_t default_budget() {
  if (const std::uint64_t o = g_budget_override.load()) return o;
  static const std::uint64_t budget = [] {
    if (const char* env = std::getenv("COGROWTH_LAB_BUDGET")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end != env && v > 0) return static_cast<std::uint64_t>(v);
    }
    return std::uint64_t{20'000'000};
  }();
  return budget;
}

FreeGroupRank::FreeGroupRank(int k) : k_(k) {
  if (k < 2 || k > kMax) {
    throw PreconditionError("free group rank must lie in [2, 26], got " + std::to_string(k));
  }
}

Word Word::reduce(FreeGroupRank rank, std::span<const int> raw) {
  Word w(rank);
  w.letters_.reserve(raw.size());
  for (int x : raw) {
    if (x == 0 || x > rank.k() || x < -rank.k()) {
      throw PreconditionError("letter " + std::to_string(x) + " outside alphabet of F_" +
                              std::to_string(rank.k()));
    }
    w.push_reduced(static_cast<Letter>(x));
  }
  return w;
}

Word Word::generator(FreeGroupRank rank, int signed_index) {
  const int raw[] = {signed_index};
  return reduce(rank, raw);
}

Word Word::inverse() const {
  Word w(rank_);
  w.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(-*it);
  return w;
}

void Word::push_reduced(Letter x) {
  if (!letters_.empty() && letters_.back() == -x) {
    letters_.pop_back();
  } else {
    letters_.push_back(x);
  }
}

std::strong_ordering Word::operator<=>(const Word& other) const noexcept {
  if (auto c = rank_.k() <=> other.rank_.k(); c != 0) return c;
  if (auto c = letters_.size() <=> other.letters_.size(); c != 0) return c;
  const int k = rank_.k();
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (auto c = letter_order(letters_[i], k) <=> letter_order(other.letters_[i], k); c != 0) {
      return c;
    }
  }
  return std::strong_ordering::equal;
}

namespace {
void require_same_rank(const Word& a, const Word& b) {
  if (a.rank() != b.rank()) {
    throw PreconditionError("rank mismatch: F_" + std::to_string(a.rank().k()) + " vs F_" +
                            std::to_string(b.rank().k()));
  }
}
}  // namespace

Word mul(const Word& a, const Word& b) {
  require_same_rank(a, b);
  Word out = a;
  for (Letter x : b.letters()) out.push_reduced(x);
  return out;
}

Word inverse(const Word& w) { return w.inverse(); }

Word conjugate(const Word& g, const Word& x) {
  require_same_rank(g, x);
  Word out = mul(mul(g, x), g.inverse());
  if (out.length() > 2 * g.length() + x.length()) {
    throw VerdictError("conjugate length bound violated for " + to_string(g) + " . " +
                       to_string(x));
  }
  return out;
}

std::string to_string(const Word& w) {
  if (w.is_identity()) return "1";
  std::string s;
  s.reserve(w.length());
  for (Letter x : w.letters()) {
    s.push_back(x > 0 ? static_cast<char>('a' + x - 1) : static_cast<char>('A' - x - 1));
  }
  return s;
}

Word parse_word(FreeGroupRank rank, std::string_view text) {
  Word w(rank);
  if (text == "1" || text.empty()) return w;
  for (char c : text) {
    int x = 0;
    if (c >= 'a' && c <= 'z') {
      x = c - 'a' + 1;
    } else if (c >= 'A' && c <= 'Z') {
      x = -(c - 'A' + 1);
    } else {
      throw PreconditionError(std::string("invalid character '") + c + "' in word \"" +
                              std::string(text) + "\"");
    }
    if (x > rank.k() || x < -rank.k()) {
      throw PreconditionError("letter '" + std::string(1, c) + "' outside alphabet of F_" +
                              std::to_string(rank.k()));
    }
    w.push_reduced(static_cast<Letter>(x));
  }
  return w;
}

std::uint64_t sphere_size(FreeGroupRank rank, std::size_t n) {
  if (n == 0) return 1;
  constexpr auto kMaxU = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t branch = static_cast<std::uint64_t>(rank.letters() - 1);
  std::uint64_t count = static_cast<std::uint64_t>(rank.letters());
  for (std::size_t i = 1; i < n; ++i) {
    if (count > kMaxU / branch) return kMaxU;
    count *= branch;
  }
  return count;
}

std::uint64_t ball_size(FreeGroupRank rank, std::size_t n) {
  constexpr auto kMaxU = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  for (std::size_t j = 0; j <= n; ++j) {
    const std::uint64_t s = sphere_size(rank, j);
    if (s == kMaxU || total > kMaxU - s) return kMaxU;
    total += s;
  }
  return total;
}

SphereEnumerator::SphereEnumerator(FreeGroupRank rank, std::size_t n, std::uint64_t budget)
    : rank_(rank), n_(n), digits_(n, 0) {
  const std::uint64_t required = sphere_size(rank, n);
  if (required > budget) {
    throw BudgetError("sphere of radius " + std::to_string(n) + " in F_" +
                          std::to_string(rank.k()) + " has " + std::to_string(required) +
                          " words, budget is " + std::to_string(budget),
                      required);
  }
}

bool SphereEnumerator::advance() {
  const int k = rank_.k();
  const int top = 2 * k;
  auto inv = [k](int d) { return d < k ? d + k : d - k; };
  auto fill = [&](std::size_t from) {
    for (std::size_t i = from; i < n_; ++i) {
      int d = 0;
      if (i > 0 && d == inv(digits_[i - 1])) d = 1;
      digits_[i] = d;
    }
  };
  if (!started_) {
    started_ = true;
    fill(0);
    return true;
  }
  std::size_t i = n_;
  while (i > 0) {
    --i;
    int d = digits_[i] + 1;
    if (i > 0 && d == inv(digits_[i - 1])) ++d;
    if (d < top) {
      digits_[i] = d;
      fill(i + 1);
      return true;
    }
  }
  return false;
}

bool SphereEnumerator::next(Word& out) {
  if (done_) return false;
  if (!advance()) {
    done_ = true;
    return false;
  }
  if (n_ == 0) done_ = true;
  const int k = rank_.k();
  out = Word(rank_);
  for (int d : digits_) out.push_reduced(static_cast<Letter>(d < k ? d + 1 : -(d - k + 1)));
  return true;
}

void for_each_in_ball(FreeGroupRank rank, std::size_t radius, std::uint64_t budget,
                      const std::function<void(const Word&)>& visit) {
  const std::uint64_t required = ball_size(rank, radius);
  if (required > budget) {
    throw BudgetError("ball of radius " + std::to_string(radius) + " in F_" +
                          std::to_string(rank.k()) + " has " + std::to_string(required) +
                          " words, budget is " + std::to_string(budget),
                      required);
  }
  Word w(rank);
  for (std::size_t j = 0; j <= radius; ++j) {
    SphereEnumerator e(rank, j, budget);
    while (e.next(w)) visit(w);
  }
}

}  // namespace cogrowth

std::size_t std::hash<cogrowth::Word>::operator()(const cogrowth::Word& w) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(w.rank().k());
  for (cogrowth::Letter x : w.letters()) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint8_t>(x)) + 0x9e3779b97f4a7c15ULL +
         (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}
