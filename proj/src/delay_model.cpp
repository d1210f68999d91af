#include "delay_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace rapsa {

void DelayModel::validate() const {
  if (!(mean > 0.0)) {
    throw invalid_argument_error("delay model: mean must be positive, got " +
                                 std::to_string(mean));
  }
  if (stddev < 0.0) {
    throw invalid_argument_error("delay model: stddev must be non-negative, got " +
                                 std::to_string(stddev));
  }
  if (delta_max < 1) {
    throw invalid_argument_error("delay model: delta_max must be at least 1, got " +
                                 std::to_string(delta_max));
  }
}

std::int64_t DelayModel::sample(SplitMix64& rng) const {
  const double raw = rng.next_normal(mean, stddev);
  const double clipped = std::clamp(raw, 1.0, static_cast<double>(delta_max));
  return std::llround(clipped);
}

std::size_t resolve_conflict(std::size_t group_size, SplitMix64& rng) {
  if (group_size == 0) {
    throw invalid_argument_error("resolve_conflict: empty writer group");
  }
  if (group_size == 1) return 0;
  return static_cast<std::size_t>(rng.next_below(group_size));
}

}  // namespace rapsa
