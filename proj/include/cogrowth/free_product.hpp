#pragma once

// The lattice A * B of two finite groups acting on its Bass-Serre tree: normal
// forms, the measure mu_1 weighted by rho, walk estimates of delta(mu_1) and
// exact orbit growth.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cogrowth/estimators.hpp"
#include "cogrowth/green.hpp"
#include "cogrowth/rng.hpp"

namespace cogrowth {

/// A finite group given by its multiplication table; element 0 is the identity.
class FiniteGroupTable {
 public:
  /// Validates closure, identity 0, inverses and associativity. Order 1..12.
  FiniteGroupTable(int order, std::vector<int> table);
  static FiniteGroupTable cyclic(int order);

  int order() const noexcept { return order_; }
  int mul(int x, int y) const noexcept { return table_[static_cast<std::size_t>(x * order_ + y)]; }
  int inverse(int x) const noexcept { return inverse_[static_cast<std::size_t>(x)]; }
  const std::vector<int>& table() const noexcept { return table_; }

 private:
  int order_;
  std::vector<int> table_;
  std::vector<int> inverse_;
};

struct FreeProductSpec {
  FiniteGroupTable a;
  FiniteGroupTable b;

  /// Throws PreconditionError unless (|A| - 1)(|B| - 1) >= 2.
  FreeProductSpec(FiniteGroupTable a, FiniteGroupTable b);
  static FreeProductSpec cyclic(int order_a, int order_b);
};

/// Lines `A <order> [table entries row by row]` and `B <order> [...]`.
FreeProductSpec parse_free_product_spec(const std::string& text);
std::string serialize(const FreeProductSpec& spec);

struct Syllable {
  int factor = 0;   // 0 = A, 1 = B
  int element = 0;  // nonzero element of that factor

  bool operator==(const Syllable&) const = default;
};

/// Alternating normal form; empty = identity.
struct FPElement {
  std::vector<Syllable> syllables;

  bool operator==(const FPElement&) const = default;
  bool is_identity() const noexcept { return syllables.empty(); }
  std::size_t syllable_length() const noexcept { return syllables.size(); }
  /// d(g v_A, v_A) on the Bass-Serre tree: twice the number of B syllables.
  std::size_t tree_length() const noexcept;
};

/// Appends one syllable-sized factor element, merging at the junction.
void fp_append(FPElement& g, Syllable x, const FreeProductSpec& spec);
FPElement fp_mul(const FPElement& x, const FPElement& y, const FreeProductSpec& spec);
FPElement fp_inverse(const FPElement& x, const FreeProductSpec& spec);
/// Throws PreconditionError unless syllables alternate and are nontrivial.
void fp_validate(const FPElement& x, const FreeProductSpec& spec);
std::string to_string(const FPElement& x);

struct LatticeMeasure {
  double rho = 0.0;
  double weight_a = 0.0;
  double weight_b = 0.0;
  double residual = 0.0;  // |w_A + w_B - 1|
};

/// rho = sqrt((|A| - 1)(|B| - 1)), the positive root of
/// (|A|-1)/(|A|-1+rho) + (|B|-1)/(|B|-1+rho) = 1.
LatticeMeasure solve_rho(const FreeProductSpec& spec);

/// F(e, a) and F(e, b) for nontrivial a in A, b in B under mu_1, from the
/// coupled first-passage system truncated at `horizon` (geometric tail added).
struct FactorPassage {
  double x_a = 0.0;
  double x_b = 0.0;
  PassageLaw law_a;
  PassageLaw law_b;
};
FactorPassage fp_first_passage(const FreeProductSpec& spec, const LatticeMeasure& m,
                               std::size_t horizon);

struct FpDeltaResult {
  EstimatorReport drift;           // tree displacement per step
  EstimatorReport syllable_drift;  // syllable length per step
  EstimatorReport entropy;         // Green-metric drift
  EstimatorReport delta;           // entropy / tree drift
  double x_a = 0.0;
  double x_b = 0.0;
};

/// Walks of length cfg.horizon; path j uses substream j of cfg.rng. Throws
/// PreconditionError when the tree drift is consistent with zero.
FpDeltaResult fp_walk_delta(const FreeProductSpec& spec, const LatticeMeasure& m,
                            const WalkConfig& cfg, std::size_t f_horizon = 400);

struct FpGrowth {
  std::vector<std::uint64_t> vertices;  // tree vertices at distance n from v_A
  std::vector<std::uint64_t> orbit;     // points of the orbit Gamma v_A at distance n
  double delta = 0.0;                   // 1/2 log((|A|-1)(|B|-1))
};

/// Closed-form biregular recursion; saturates at UINT64_MAX.
FpGrowth fp_growth_exact(const FreeProductSpec& spec, std::size_t n_max);

/// Calls visit on every normal form with at most max_syllables syllables.
void fp_for_each(const FreeProductSpec& spec, std::size_t max_syllables,
                 const std::function<void(const FPElement&)>& visit);

}  // namespace cogrowth
