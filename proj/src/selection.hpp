#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rng.hpp"

namespace rapsa {

// Random choices made once per iteration: which blocks the I processors work
// on, and which samples each processor's minibatch contains.
//
// Block subsets are drawn by a partial Fisher-Yates shuffle, so every
// I-subset of {0..B-1} is equally likely and no two processors ever share a
// block within an iteration. Minibatches are drawn with replacement.
class SelectionState {
 public:
  // processors = I, minibatch = L. Throws Error(invalid_argument) on zero
  // sizes.
  SelectionState(SplitMix64 rng, std::size_t processors, std::size_t minibatch);

  // Returns I distinct block indices in draw order (processor slot i works
  // on the i-th entry). Throws if I > B.
  std::vector<std::uint32_t> select_blocks(std::size_t num_blocks);

  // Returns L sample indices drawn uniformly with replacement from [0, N).
  // Throws on an empty dataset.
  std::vector<std::uint32_t> sample_minibatch(std::size_t num_samples);

  std::size_t processors() const noexcept { return processors_; }
  std::size_t minibatch() const noexcept { return minibatch_; }
  SplitMix64& rng() noexcept { return rng_; }

 private:
  SplitMix64 rng_;
  std::size_t processors_;
  std::size_t minibatch_;
  std::vector<std::uint32_t> permutation_;  // scratch, reused across calls
};

}  // namespace rapsa
