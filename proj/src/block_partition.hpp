#pragma once

#include <cstddef>
#include <vector>

namespace rapsa {

struct BlockRange {
  std::size_t offset = 0;
  std::size_t length = 0;
};

// Contiguous partition of coordinates 0..p-1 into B blocks. When B does not
// divide p, the first (p mod B) blocks receive one extra coordinate, so block
// sizes differ by at most one and every coordinate belongs to exactly one
// block.
class BlockPartition {
 public:
  // Throws Error(invalid_argument) unless 1 <= B <= p.
  static BlockPartition make(std::size_t p, std::size_t B);

  std::size_t dimension() const noexcept { return p_; }
  std::size_t count() const noexcept { return ranges_.size(); }

  const BlockRange& block(std::size_t b) const { return ranges_.at(b); }

  // Index of the block owning coordinate j.
  std::size_t block_of(std::size_t j) const;

 private:
  BlockPartition(std::size_t p, std::vector<BlockRange> ranges)
      : p_(p), ranges_(std::move(ranges)) {}

  std::size_t p_ = 0;
  std::vector<BlockRange> ranges_;
};

}  // namespace rapsa
