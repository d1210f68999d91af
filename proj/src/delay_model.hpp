#pragma once

#include <cstdint>

#include "rng.hpp"

namespace rapsa {

// Processor compute-time distribution for the asynchronous engines. A task's
// duration is drawn as normal(mean, stddev), clipped to [1, delta_max], and
// rounded to an integer number of clock ticks. delta_max doubles as the hard
// bounded-delay parameter the simulator asserts against.
struct DelayModel {
  double mean = 1.0;
  double stddev = 0.0;
  std::int64_t delta_max = 1;

  // Throws Error(invalid_argument) on a non-positive mean, negative stddev,
  // or delta_max < 1.
  void validate() const;

  // One clipped, rounded duration in [1, delta_max]. Always consumes the
  // same number of draws from the stream regardless of the parameters.
  std::int64_t sample(SplitMix64& rng) const;
};

// Uniformly picks the surviving writer among `group_size` processors trying
// to commit to the same block at the same instant. A singleton group wins
// outright without consuming randomness.
std::size_t resolve_conflict(std::size_t group_size, SplitMix64& rng);

}  // namespace rapsa
