#pragma once

// Growth of normal subgroups N = ker(F_k -> Q) from a multiplication oracle
// for Q, by dynamic programming over (element of Q, last letter).

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cogrowth/word.hpp"

namespace cogrowth {

/// Elements of Q are handled by canonical forms; equal handles mean equal
/// elements.
using Handle = std::vector<std::int64_t>;

class QuotientOracle {
 public:
  explicit QuotientOracle(FreeGroupRank rank) : rank_(rank) {}
  virtual ~QuotientOracle() = default;

  FreeGroupRank rank() const noexcept { return rank_; }
  virtual Handle identity() const = 0;
  /// h * x for the letter with the given letter_index.
  virtual Handle multiply(const Handle& h, int letter_index) const = 0;
  virtual std::string describe() const = 0;

 private:
  FreeGroupRank rank_;
};

std::unique_ptr<QuotientOracle> trivial_quotient(FreeGroupRank rank);
/// Z/n with generator i mapped to images[i].
std::unique_ptr<QuotientOracle> cyclic_quotient(FreeGroupRank rank, std::int64_t n,
                                                std::vector<std::int64_t> images);
/// Permutation group on {0..d-1}; generator i acts by perms[i] (right action).
std::unique_ptr<QuotientOracle> permutation_quotient(FreeGroupRank rank,
                                                     std::vector<std::vector<std::int64_t>> perms);
/// F_k itself: handles are reduced words, so N is trivial.
std::unique_ptr<QuotientOracle> free_quotient(FreeGroupRank rank);
/// PSL(2, Z) (p = 0) or PSL(2, Z/p); generator i maps to mats[i] = {a, b, c, d}
/// with determinant 1. Handles are sign-normalised matrices.
std::unique_ptr<QuotientOracle> psl2_quotient(FreeGroupRank rank, std::int64_t p,
                                              std::vector<std::array<std::int64_t, 4>> mats);

/// Parses `trivial`, `cyclic:n:i1,i2,...`, `perm:<p1>;<p2>;...` (each p a
/// comma list), `free`, `psl2:<p>:a,b,c,d;...`.
std::unique_ptr<QuotientOracle> parse_quotient(FreeGroupRank rank, const std::string& spec);

struct QuotientGrowth {
  std::vector<std::uint64_t> counts;  // counts[n] = #{h in N : |h| = n}
  double delta = 0.0;                 // slope of log counts; 0 if N looks trivial
  std::size_t fit_lo = 0;
  std::size_t fit_hi = 0;
  std::size_t states = 0;  // distinct elements of Q reached
  bool trivial_kernel = false;  // no nontrivial element of N up to n_max
};

/// Throws BudgetError when more than `budget` elements of Q are reached or a
/// count overflows.
QuotientGrowth quotient_dp_growth(const QuotientOracle& q, std::size_t n_max,
                                  std::uint64_t budget);

}  // namespace cogrowth
