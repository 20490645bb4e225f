#pragma once

#include <cstddef>
#include <vector>

#include "cogrowth/rng.hpp"
#include "cogrowth/step_distribution.hpp"
#include "cogrowth/word.hpp"

namespace cogrowth {

/// Increments g_1..g_n and positions omega_0 = e, omega_i = g_1 ... g_i.
struct SamplePath {
  std::vector<Word> increments;  // increments[i-1] = g_i
  std::vector<Word> positions;   // positions[0] = identity
  std::vector<std::size_t> lengths;

  std::size_t horizon() const noexcept { return increments.size(); }
};

/// Draws n i.i.d. increments from mu using substream 0 of `rng`.
SamplePath sample_path(const StepDistribution& mu, std::size_t n, RngState rng);

/// Tracks the current position of a walk as a reduced word without storing
/// the history. Observers see every elementary pop/push so that derived
/// quantities (automaton state, log Green sums) can be maintained in O(1).
class WalkCursor {
 public:
  WalkCursor(const StepDistribution& mu, RngState rng, std::uint64_t substream)
      : mu_(&mu), rng_(rng, substream), position_(mu.rank()) {}

  const Word& position() const noexcept { return position_; }
  std::size_t steps() const noexcept { return steps_; }

  /// Samples one increment and applies it. Returns the atom index.
  std::size_t step() { return step([](Letter) {}, [](Letter) {}); }

  /// on_pop(x) is called before the last letter x is removed; on_push(x)
  /// after x is appended.
  template <class Pop, class Push>
  std::size_t step(Pop&& on_pop, Push&& on_push) {
    const std::size_t idx = mu_->sample_index(rng_.uniform());
    for (Letter x : mu_->atoms()[idx].word.letters()) {
      if (!position_.is_identity() && position_.back() == -x) {
        on_pop(position_.back());
        position_.pop();
      } else {
        position_.push_reduced(x);
        on_push(x);
      }
    }
    ++steps_;
    return idx;
  }

 private:
  const StepDistribution* mu_;
  CounterRng rng_;
  Word position_;
  std::size_t steps_ = 0;
};

}  // namespace cogrowth
