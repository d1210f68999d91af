#include "block_partition.hpp"

#include <string>

#include "errors.hpp"

namespace rapsa {

BlockPartition BlockPartition::make(std::size_t p, std::size_t B) {
  if (p == 0) {
    throw invalid_argument_error("block partition: dimension p must be positive");
  }
  if (B == 0 || B > p) {
    throw invalid_argument_error("block partition: block count B=" + std::to_string(B) +
                                 " must satisfy 1 <= B <= p=" + std::to_string(p));
  }
  const std::size_t base = p / B;
  const std::size_t extra = p % B;  // first `extra` blocks get base+1 coordinates
  std::vector<BlockRange> ranges(B);
  std::size_t offset = 0;
  for (std::size_t b = 0; b < B; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    ranges[b] = BlockRange{offset, len};
    offset += len;
  }
  return BlockPartition(p, std::move(ranges));
}

std::size_t BlockPartition::block_of(std::size_t j) const {
  if (j >= p_) {
    throw invalid_argument_error("block partition: coordinate " + std::to_string(j) +
                                 " outside dimension " + std::to_string(p_));
  }
  // Closed form: the first `extra` blocks have base+1 coordinates.
  const std::size_t B = ranges_.size();
  const std::size_t base = p_ / B;
  const std::size_t extra = p_ % B;
  const std::size_t wide = extra * (base + 1);
  if (j < wide) return j / (base + 1);
  return extra + (j - wide) / base;
}

}  // namespace rapsa
