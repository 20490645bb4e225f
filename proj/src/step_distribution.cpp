#include "cogrowth/step_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "cogrowth/core_graph.hpp"
#include "cogrowth/errors.hpp"

namespace cogrowth {

namespace {
constexpr double kSumTolerance = 1e-12;

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) {
    if (!s.empty()) s += "; ";
    s += p;
  }
  return s;
}
}  // namespace

ValidationReport validate_distribution(FreeGroupRank rank, std::span<const Atom> atoms,
                                       const DistributionPolicy& policy) {
  ValidationReport r;
  if (atoms.empty()) {
    r.positive = r.sums_to_one = r.generating = false;
    r.problems.push_back("empty support");
    return r;
  }
  double total = 0.0;
  std::map<Word, double> weights;
  for (const Atom& a : atoms) {
    if (a.word.rank() != rank) {
      r.positive = false;
      r.problems.push_back("atom " + to_string(a.word) + " has the wrong rank");
      continue;
    }
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      r.positive = false;
      r.problems.push_back("atom " + to_string(a.word) + " has non-positive weight");
    }
    if (a.word.is_identity() && !policy.lazy) {
      r.identity_ok = false;
      r.problems.push_back("identity atom requires the lazy flag");
    }
    total += a.weight;
    weights[a.word] += a.weight;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    r.sums_to_one = false;
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << total << ", not 1";
    r.problems.push_back(os.str());
  }
  for (const auto& [w, p] : weights) {
    const auto it = weights.find(w.inverse());
    const double q = it == weights.end() ? 0.0 : it->second;
    if (std::abs(p - q) > kSumTolerance) {
      r.symmetric = false;
      break;
    }
  }
  if (!r.symmetric && !policy.asymmetric) {
    r.problems.push_back("measure is not symmetric (set the asymmetric flag to accept it)");
  }

  std::vector<Word> support;
  for (const auto& [w, p] : weights) support.push_back(w);
  const CoreGraph g = CoreGraph::fold(rank, support);
  for (int x = 1; x <= rank.k(); ++x) {
    if (g.target(0, letter_index(static_cast<Letter>(x))) != 0) {
      r.missing_generators.push_back(static_cast<Letter>(x));
    }
  }
  r.generating = r.missing_generators.empty() && g.vertex_count() == 1;
  if (!r.generating && !policy.degenerate) {
    std::string names;
    for (Letter x : r.missing_generators) {
      Word w(rank);
      w.push_reduced(x);
      names += (names.empty() ? "" : ",") + to_string(w);
    }
    r.problems.push_back("support does not generate F_" + std::to_string(rank.k()) +
                         "; missing generator direction(s): " + names);
  }
  return r;
}

StepDistribution::StepDistribution(FreeGroupRank rank, std::vector<Atom> atoms,
                                   DistributionPolicy policy, ValidationReport report)
    : rank_(rank), atoms_(std::move(atoms)), policy_(policy), report_(std::move(report)) {
  double acc = 0.0;
  cdf_.reserve(atoms_.size());
  for (const Atom& a : atoms_) {
    acc += a.weight;
    cdf_.push_back(acc);
    max_atom_length_ = std::max(max_atom_length_, a.word.length());
  }
  cdf_.back() = 1.0;
}

StepDistribution StepDistribution::create(FreeGroupRank rank, std::vector<Atom> atoms,
                                          DistributionPolicy policy) {
  ValidationReport report = validate_distribution(rank, atoms, policy);
  if (!report.valid(policy)) {
    throw PreconditionError("invalid step distribution: " + join(report.problems));
  }
  std::map<Word, double> merged;
  for (Atom& a : atoms) merged[a.word] += a.weight;
  std::vector<Atom> sorted;
  sorted.reserve(merged.size());
  for (auto& [w, p] : merged) sorted.push_back({w, p});
  return StepDistribution(rank, std::move(sorted), policy, std::move(report));
}

StepDistribution StepDistribution::uniform(FreeGroupRank rank) {
  std::vector<double> w(static_cast<std::size_t>(rank.letters()), 1.0 / rank.letters());
  return nearest_neighbour(rank, w);
}

StepDistribution StepDistribution::nearest_neighbour(FreeGroupRank rank,
                                                     std::span<const double> weights,
                                                     DistributionPolicy policy) {
  if (weights.size() != static_cast<std::size_t>(rank.letters())) {
    throw PreconditionError("nearest-neighbour measure needs " +
                            std::to_string(rank.letters()) + " weights");
  }
  std::vector<Atom> atoms;
  for (int li = 0; li < rank.letters(); ++li) {
    if (weights[static_cast<std::size_t>(li)] == 0.0) continue;
    Word w(rank);
    w.push_reduced(letter_from_index(li));
    atoms.push_back({w, weights[static_cast<std::size_t>(li)]});
  }
  return create(rank, std::move(atoms), policy);
}

StepDistribution StepDistribution::point_mass(const Word& w) {
  DistributionPolicy policy;
  policy.asymmetric = true;
  policy.degenerate = true;
  policy.lazy = w.is_identity();
  return create(w.rank(), {{w, 1.0}}, policy);
}

double StepDistribution::weight_of(const Word& w) const noexcept {
  for (const Atom& a : atoms_) {
    if (a.word == w) return a.weight;
  }
  return 0.0;
}

double StepDistribution::identity_weight() const noexcept {
  for (const Atom& a : atoms_) {
    if (a.word.is_identity()) return a.weight;
  }
  return 0.0;
}

std::size_t StepDistribution::sample_index(double u) const noexcept {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return cdf_.size() - 1;
  return static_cast<std::size_t>(it - cdf_.begin());
}

std::string serialize(const StepDistribution& mu) {
  std::ostringstream os;
  os.precision(17);
  os << "rank " << mu.rank().k() << "\n";
  const auto& p = mu.policy();
  if (p.lazy || p.asymmetric || p.degenerate) {
    os << "flags";
    if (p.lazy) os << " lazy";
    if (p.asymmetric) os << " asymmetric";
    if (p.degenerate) os << " degenerate";
    os << "\n";
  }
  for (const Atom& a : mu.atoms()) os << to_string(a.word) << " " << a.weight << "\n";
  return os.str();
}

StepDistribution parse_distribution(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  int k = -1;
  DistributionPolicy policy;
  std::vector<std::pair<std::string, double>> raw;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "rank") {
      if (!(ls >> k)) throw PreconditionError("line " + std::to_string(line_no) + ": bad rank");
    } else if (head == "flags") {
      std::string f;
      while (ls >> f) {
        if (f == "lazy") {
          policy.lazy = true;
        } else if (f == "asymmetric") {
          policy.asymmetric = true;
        } else if (f == "degenerate") {
          policy.degenerate = true;
        } else {
          throw PreconditionError("line " + std::to_string(line_no) + ": unknown flag " + f);
        }
      }
    } else {
      double w = 0.0;
      if (!(ls >> w)) {
        throw PreconditionError("line " + std::to_string(line_no) + ": expected `word weight`");
      }
      raw.emplace_back(head, w);
    }
  }
  if (k < 0) throw PreconditionError("distribution file needs a `rank k` header");
  const FreeGroupRank rank(k);
  std::vector<Atom> atoms;
  for (const auto& [w, p] : raw) atoms.push_back({parse_word(rank, w), p});
  return StepDistribution::create(rank, std::move(atoms), policy);
}

}  // namespace cogrowth
