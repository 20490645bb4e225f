#include "cogrowth/walk.hpp"

#include "cogrowth/errors.hpp"

namespace cogrowth {

SamplePath sample_path(const StepDistribution& mu, std::size_t n, RngState rng) {
  if (n < 1) throw PreconditionError("sample_path: horizon must be >= 1");
  SamplePath path;
  path.increments.reserve(n);
  path.positions.reserve(n + 1);
  path.lengths.reserve(n + 1);
  path.positions.emplace_back(mu.rank());
  path.lengths.push_back(0);
  WalkCursor cursor(mu, rng, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = cursor.step();
    path.increments.push_back(mu.atoms()[idx].word);
    path.positions.push_back(cursor.position());
    path.lengths.push_back(cursor.position().length());
  }
  return path;
}

}  // namespace cogrowth
