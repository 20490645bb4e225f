#pragma once

// Reduced words in the free group F_k.
//
// A letter is a signed generator index in {±1, ..., ±k}; a negative sign marks
// the inverse generator. Words are kept freely reduced at all times, so
// length() is the word-metric norm on the Cayley tree.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cogrowth {

using Letter = std::int8_t;

class FreeGroupRank {
 public:
  static constexpr int kMax = 26;

  /// Throws PreconditionError unless 2 <= k <= 26.
  explicit FreeGroupRank(int k);

  int k() const noexcept { return k_; }
  /// Number of signed letters, 2k.
  int letters() const noexcept { return 2 * k_; }

  auto operator<=>(const FreeGroupRank&) const = default;

 private:
  int k_;
};

/// Dense index of a signed letter: a, A, b, B, ... -> 0, 1, 2, 3, ...
/// The inverse of the letter with index i has index i ^ 1.
constexpr int letter_index(Letter x) noexcept { return x > 0 ? 2 * (x - 1) : 2 * (-x - 1) + 1; }
constexpr Letter letter_from_index(int i) noexcept {
  return static_cast<Letter>((i & 1) ? -(i / 2 + 1) : (i / 2 + 1));
}
/// Position of a letter in the enumeration order: a < b < ... < A < B < ...
constexpr int letter_order(Letter x, int k) noexcept { return x > 0 ? x - 1 : k - x - 1; }

class Word {
 public:
  explicit Word(FreeGroupRank rank) : rank_(rank) {}

  /// Builds the reduced form of a raw letter sequence. Throws on letters
  /// outside {±1..±k}.
  static Word reduce(FreeGroupRank rank, std::span<const int> raw);
  static Word reduce(FreeGroupRank rank, std::initializer_list<int> raw) {
    return reduce(rank, std::span<const int>(raw.begin(), raw.size()));
  }
  static Word generator(FreeGroupRank rank, int signed_index);

  FreeGroupRank rank() const noexcept { return rank_; }
  std::span<const Letter> letters() const noexcept { return letters_; }
  std::size_t length() const noexcept { return letters_.size(); }
  bool is_identity() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const noexcept { return letters_[i]; }
  Letter back() const noexcept { return letters_.back(); }

  Word inverse() const;

  /// Right multiplication by a single letter, reducing on the fly.
  void push_reduced(Letter x);
  void pop() { letters_.pop_back(); }

  bool operator==(const Word& other) const noexcept {
    return rank_ == other.rank_ && letters_ == other.letters_;
  }
  /// Shortlex order using letter_order, so generators precede inverses.
  std::strong_ordering operator<=>(const Word& other) const noexcept;

 private:
  FreeGroupRank rank_;
  std::vector<Letter> letters_;
};

Word mul(const Word& a, const Word& b);
Word inverse(const Word& w);

/// Reduced g x g^-1. Asserts the bound |g x g^-1| <= 2|g| + |x|.
Word conjugate(const Word& g, const Word& x);

/// Compact text form: lowercase = generator, uppercase = inverse, "1" = identity.
std::string to_string(const Word& w);
Word parse_word(FreeGroupRank rank, std::string_view text);

/// |S_n| = 2k(2k-1)^{n-1} for n >= 1 and 1 for n = 0. Saturates at UINT64_MAX.
std::uint64_t sphere_size(FreeGroupRank rank, std::size_t n);
std::uint64_t ball_size(FreeGroupRank rank, std::size_t n);

/// Streams every reduced word of length exactly n once, in lexicographic order
/// with generators before inverses. Single consumer.
class SphereEnumerator {
 public:
  /// Throws BudgetError when the sphere is larger than `budget`.
  SphereEnumerator(FreeGroupRank rank, std::size_t n, std::uint64_t budget);

  /// Writes the next word into `out`; returns false when exhausted.
  bool next(Word& out);

 private:
  bool advance();

  FreeGroupRank rank_;
  std::size_t n_;
  std::vector<int> digits_;  // letter_order values
  bool started_ = false;
  bool done_ = false;
};

/// Calls `visit` on every word with length <= radius, shell by shell.
void for_each_in_ball(FreeGroupRank rank, std::size_t radius, std::uint64_t budget,
                      const std::function<void(const Word&)>& visit);

}  // namespace cogrowth

template <>
struct std::hash<cogrowth::Word> {
  std::size_t operator()(const cogrowth::Word& w) const noexcept;
};
