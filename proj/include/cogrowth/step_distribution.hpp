#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cogrowth/word.hpp"

namespace cogrowth {

/// Relaxations of the default acceptance policy for step distributions.
struct DistributionPolicy {
  /// Allows an identity atom. A lazy walk with holding probability p has its
  /// drift and entropy rescaled by (1 - p).
  bool lazy = false;
  /// Accepts mu != mu-check (reported, never hidden).
  bool asymmetric = false;
  /// Accepts a support that does not generate F_k (e.g. point masses).
  bool degenerate = false;
};

struct Atom {
  Word word;
  double weight;
};

struct ValidationReport {
  bool positive = true;
  bool sums_to_one = true;
  bool identity_ok = true;
  bool symmetric = true;
  bool generating = true;
  /// Generators whose loop is missing from the folded support graph.
  std::vector<Letter> missing_generators;
  std::vector<std::string> problems;

  bool valid(const DistributionPolicy& policy) const {
    return positive && sums_to_one && identity_ok && (symmetric || policy.asymmetric) &&
           (generating || policy.degenerate);
  }
};

/// Checks positivity, normalisation (1e-12), the identity-atom policy,
/// symmetry, and that support u support^-1 generates F_k (its folded core
/// graph is a wedge of k loops).
ValidationReport validate_distribution(FreeGroupRank rank, std::span<const Atom> atoms,
                                       const DistributionPolicy& policy);

/// A validated, immutable, finitely supported probability measure on F_k.
class StepDistribution {
 public:
  /// Validates and throws PreconditionError with every problem on failure.
  /// Atoms with equal words are merged; atoms are stored in shortlex order.
  static StepDistribution create(FreeGroupRank rank, std::vector<Atom> atoms,
                                 DistributionPolicy policy = {});
  /// mu_k: uniform on the 2k generators and their inverses.
  static StepDistribution uniform(FreeGroupRank rank);
  /// Nearest-neighbour measure with weights in letter_index order (a, A, b, B, ...).
  static StepDistribution nearest_neighbour(FreeGroupRank rank, std::span<const double> weights,
                                            DistributionPolicy policy = {});
  /// Point mass at w; flagged asymmetric and degenerate.
  static StepDistribution point_mass(const Word& w);

  FreeGroupRank rank() const noexcept { return rank_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  const DistributionPolicy& policy() const noexcept { return policy_; }
  const ValidationReport& report() const noexcept { return report_; }
  bool symmetric() const noexcept { return report_.symmetric; }
  /// All atoms have length <= 1.
  bool nearest_neighbour_support() const noexcept { return max_atom_length_ <= 1; }
  std::size_t max_atom_length() const noexcept { return max_atom_length_; }
  double weight_of(const Word& w) const noexcept;
  double identity_weight() const noexcept;

  /// Maps u in [0,1) to an atom index by inverse CDF.
  std::size_t sample_index(double u) const noexcept;

 private:
  StepDistribution(FreeGroupRank rank, std::vector<Atom> atoms, DistributionPolicy policy,
                   ValidationReport report);

  FreeGroupRank rank_;
  std::vector<Atom> atoms_;
  std::vector<double> cdf_;
  DistributionPolicy policy_;
  ValidationReport report_;
  std::size_t max_atom_length_ = 0;
};

/// Text table: `rank k`, optional `flags lazy asymmetric degenerate`, then
/// `word weight` lines.
std::string serialize(const StepDistribution& mu);
StepDistribution parse_distribution(std::string_view text);

}  // namespace cogrowth
