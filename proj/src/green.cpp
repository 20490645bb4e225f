#include "cogrowth/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "cogrowth/errors.hpp"

namespace cogrowth {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : -kInf; }

PassageLaw make_law(std::vector<double> pmf) {
  PassageLaw law;
  law.mass = 0.0;
  for (double p : pmf) law.mass += p;
  law.mass = std::min(law.mass, 1.0);
  law.tail = std::min(geometric_tail(pmf), 1.0 - law.mass);
  law.pmf = std::move(pmf);
  return law;
}
}  // namespace

double GreenEstimate::extrapolated() const {
  if (!std::isfinite(tail_bound)) return std::min(1.0, value);
  return std::clamp(value + tail_bound, 0.0, 1.0);
}

double geometric_tail(std::span<const double> pmf) {
  const std::size_t h = pmf.size();
  if (h < 5) return kInf;
  const double last = pmf[h - 1] + pmf[h - 2];
  const double prev = pmf[h - 3] + pmf[h - 4];
  if (last == 0.0) return 0.0;
  if (prev == 0.0) return kInf;
  const double r = last / prev;
  if (r >= 1.0) return kInf;
  // Pairs of terms decay by r per two steps.
  return last * r / (1.0 - r);
}

FirstPassageSystem::FirstPassageSystem(std::vector<Equation> equations)
    : equations_(std::move(equations)) {
  for (const auto& eq : equations_) {
    for (const auto& term : eq.terms) {
      if (term.via < 0 || static_cast<std::size_t>(term.via) >= equations_.size()) {
        throw PreconditionError("first-passage term refers to an unknown law");
      }
    }
  }
}

std::vector<PassageLaw> FirstPassageSystem::solve(std::size_t horizon) const {
  const std::size_t n = equations_.size();
  std::vector<std::vector<double>> f(n, std::vector<double>(horizon + 1, 0.0));
  for (std::size_t t = 1; t <= horizon; ++t) {
    for (std::size_t x = 0; x < n; ++x) {
      const Equation& eq = equations_[x];
      double v = (t == 1) ? eq.direct : 0.0;
      if (t >= 2) {
        v += eq.hold * f[x][t - 1];
        for (const Term& term : eq.terms) {
          const auto& g = f[static_cast<std::size_t>(term.via)];
          double conv = 0.0;
          // (g * f_x)(t - 1) with g(0) = f_x(0) = 0.
          for (std::size_t s = 1; s + 1 < t; ++s) conv += g[s] * f[x][t - 1 - s];
          v += term.coef * conv;
        }
      }
      f[x][t] = v;
    }
  }
  std::vector<PassageLaw> laws;
  laws.reserve(n);
  for (auto& pmf : f) laws.push_back(make_law(std::move(pmf)));
  return laws;
}

GreenKernel::GreenKernel(const StepDistribution& mu, std::size_t horizon) : horizon_(horizon) {
  if (!mu.nearest_neighbour_support()) {
    throw PreconditionError("GreenKernel requires a nearest-neighbour step distribution");
  }
  if (horizon < 1) throw PreconditionError("first-passage horizon must be >= 1");
  const int letters = mu.rank().letters();
  std::vector<double> weight(static_cast<std::size_t>(letters), 0.0);
  for (const Atom& a : mu.atoms()) {
    if (!a.word.is_identity()) weight[static_cast<std::size_t>(letter_index(a.word[0]))] = a.weight;
  }
  const double hold = mu.identity_weight();

  std::vector<FirstPassageSystem::Equation> eqs(static_cast<std::size_t>(letters));
  for (int x = 0; x < letters; ++x) {
    auto& eq = eqs[static_cast<std::size_t>(x)];
    eq.direct = weight[static_cast<std::size_t>(x)];
    eq.hold = hold;
    for (int y = 0; y < letters; ++y) {
      if (y == x || weight[static_cast<std::size_t>(y)] == 0.0) continue;
      eq.terms.push_back({weight[static_cast<std::size_t>(y)], y ^ 1});
    }
  }
  laws_ = FirstPassageSystem(std::move(eqs)).solve(horizon);
  log_letter_.reserve(laws_.size());
  for (const auto& law : laws_) log_letter_.push_back(safe_log(law.mass));

  std::vector<double> u(horizon + 1, 0.0);
  if (horizon >= 1) u[1] = hold;
  for (std::size_t t = 2; t <= horizon; ++t) {
    for (int y = 0; y < letters; ++y) {
      u[t] += weight[static_cast<std::size_t>(y)] * laws_[static_cast<std::size_t>(y ^ 1)].pmf[t - 1];
    }
  }
  return_law_ = make_law(std::move(u));
}

double GreenKernel::log_first_passage(const Word& g) const noexcept {
  double s = 0.0;
  for (Letter x : g.letters()) s += log_letter_[static_cast<std::size_t>(letter_index(x))];
  return s;
}

GreenEstimate GreenKernel::first_return(const Word& target) const {
  GreenEstimate est;
  est.horizon = horizon_;
  if (target.is_identity()) {
    est.method = "nn-return";
    est.value = return_law_.mass;
    est.log_value = safe_log(est.value);
    est.tail_bound = return_law_.tail;
    return est;
  }
  est.method = "nn-product";
  est.log_value = log_first_passage(target);
  est.value = std::exp(est.log_value);
  double upper = 1.0;
  bool finite = true;
  for (Letter x : target.letters()) {
    const auto& law = laws_[static_cast<std::size_t>(letter_index(x))];
    if (!std::isfinite(law.tail)) finite = false;
    upper *= std::min(1.0, law.mass + (std::isfinite(law.tail) ? law.tail : 0.0));
  }
  est.tail_bound = finite ? std::max(0.0, upper - est.value) : kInf;
  return est;
}

GreenEstimate ball_first_passage(const StepDistribution& mu, const Word& target,
                                 std::size_t horizon, std::uint64_t budget) {
  if (horizon < 1) throw PreconditionError("first-passage horizon must be >= 1");
  if (target.rank() != mu.rank()) throw PreconditionError("first_return_F: rank mismatch");
  std::unordered_map<Word, double> live{{Word(mu.rank()), 1.0}};
  std::vector<double> hit(horizon + 1, 0.0);
  for (std::size_t t = 1; t <= horizon && !live.empty(); ++t) {
    std::unordered_map<Word, double> next;
    next.reserve(live.size() * mu.atoms().size());
    for (const auto& [w, p] : live) {
      for (const Atom& a : mu.atoms()) {
        Word v = mul(w, a.word);
        if (v == target) {
          hit[t] += p * a.weight;
        } else {
          next[std::move(v)] += p * a.weight;
        }
      }
    }
    if (next.size() > budget) {
      throw BudgetError("taboo walk support reached " + std::to_string(next.size()) +
                            " words at step " + std::to_string(t) + ", budget is " +
                            std::to_string(budget),
                        next.size());
    }
    live = std::move(next);
  }
  const PassageLaw law = make_law(std::move(hit));
  GreenEstimate est;
  est.horizon = horizon;
  est.method = target.is_identity() ? "ball-dp-return" : "ball-dp";
  est.value = law.mass;
  est.log_value = safe_log(law.mass);
  est.tail_bound = law.tail;
  return est;
}

GreenEstimate first_return_F(const StepDistribution& mu, const Word& target, std::size_t horizon) {
  if (horizon < 1) throw PreconditionError("first_return_F: horizon must be >= 1");
  if (target.rank() != mu.rank()) throw PreconditionError("first_return_F: rank mismatch");
  if (mu.nearest_neighbour_support()) return GreenKernel(mu, horizon).first_return(target);
  return ball_first_passage(mu, target, horizon, default_budget());
}

GreenEstimate green_identity(const StepDistribution& mu, std::size_t horizon) {
  GreenEstimate u = first_return_F(mu, Word(mu.rank()), horizon);
  const double ret = u.extrapolated();
  if (ret >= 1.0) throw PreconditionError("walk is recurrent at this horizon: G(e,e) diverges");
  GreenEstimate g;
  g.horizon = horizon;
  g.method = "green-from-return:" + u.method;
  g.value = 1.0 / (1.0 - ret);
  g.log_value = std::log(g.value);
  // dG/dU = G^2; the uncertainty is the tail estimate itself.
  g.tail_bound = std::isfinite(u.tail_bound) ? g.value * g.value * u.tail_bound : kInf;
  return g;
}

AnnulusGreenSum annulus_green_sum(const StepDistribution& mu, std::size_t n,
                                  std::size_t f_horizon, std::uint64_t budget) {
  AnnulusGreenSum out;
  out.partial_sums.assign(n + 1, 0.0);
  std::vector<double> shell(n + 1, 0.0);
  if (mu.nearest_neighbour_support()) {
    const GreenKernel kernel(mu, f_horizon);
    for_each_in_ball(mu.rank(), n, budget, [&](const Word& g) {
      shell[g.length()] += g.is_identity() ? 1.0 : std::exp(kernel.log_first_passage(g));
    });
  } else {
    for_each_in_ball(mu.rank(), n, budget, [&](const Word& g) {
      shell[g.length()] +=
          g.is_identity() ? 1.0 : ball_first_passage(mu, g, f_horizon, budget).value;
    });
  }
  double acc = 0.0;
  out.ratios.assign(n + 1, 1.0);
  for (std::size_t j = 0; j <= n; ++j) {
    acc += shell[j];
    out.partial_sums[j] = acc;
    if (j > 0) out.ratios[j] = acc / out.partial_sums[j - 1];
  }
  return out;
}

}  // namespace cogrowth
