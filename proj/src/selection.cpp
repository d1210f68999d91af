#include "selection.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "errors.hpp"

namespace rapsa {

SelectionState::SelectionState(SplitMix64 rng, std::size_t processors,
                               std::size_t minibatch)
    : rng_(rng), processors_(processors), minibatch_(minibatch) {
  if (processors_ == 0) {
    throw invalid_argument_error("selection: processor count I must be positive");
  }
  if (minibatch_ == 0) {
    throw invalid_argument_error("selection: minibatch size L must be positive");
  }
}

std::vector<std::uint32_t> SelectionState::select_blocks(std::size_t num_blocks) {
  if (processors_ > num_blocks) {
    throw invalid_argument_error("selection: I=" + std::to_string(processors_) +
                                 " processors exceed B=" + std::to_string(num_blocks) +
                                 " blocks");
  }
  if (permutation_.size() != num_blocks) {
    permutation_.resize(num_blocks);
    std::iota(permutation_.begin(), permutation_.end(), 0u);
  }
  // Partial Fisher-Yates: after I swaps the prefix is a uniform I-subset in
  // uniform order. The scratch permutation carries over between calls, which
  // is fine: any starting permutation yields the same distribution.
  std::vector<std::uint32_t> chosen(processors_);
  for (std::size_t k = 0; k < processors_; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng_.next_below(num_blocks - k));
    std::swap(permutation_[k], permutation_[j]);
    chosen[k] = permutation_[k];
  }
  return chosen;
}

std::vector<std::uint32_t> SelectionState::sample_minibatch(std::size_t num_samples) {
  if (num_samples == 0) {
    throw invalid_argument_error("selection: cannot sample a minibatch from an empty dataset");
  }
  std::vector<std::uint32_t> batch(minibatch_);
  for (auto& idx : batch) {
    idx = static_cast<std::uint32_t>(rng_.next_below(num_samples));
  }
  return batch;
}

}  // namespace rapsa
