#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "block_partition.hpp"
#include "errors.hpp"

namespace rapsa {

// Decision vector viewed through a block partition. Owns the flat storage;
// the partition is borrowed and must outlive the vector.
class ParamVector {
 public:
  ParamVector(const BlockPartition& partition, std::vector<double> data)
      : partition_(&partition), data_(std::move(data)) {
    if (data_.size() != partition.dimension()) {
      throw invalid_argument_error(
          "param vector: data length " + std::to_string(data_.size()) +
          " does not match partition dimension " + std::to_string(partition.dimension()));
    }
  }

  static ParamVector zeros(const BlockPartition& partition) {
    return ParamVector(partition, std::vector<double>(partition.dimension(), 0.0));
  }

  std::span<double> block(std::size_t b) {
    const BlockRange& r = partition_->block(b);
    return {data_.data() + r.offset, r.length};
  }
  std::span<const double> block(std::size_t b) const {
    const BlockRange& r = partition_->block(b);
    return {data_.data() + r.offset, r.length};
  }

  std::span<double> flat() noexcept { return {data_.data(), data_.size()}; }
  std::span<const double> flat() const noexcept { return {data_.data(), data_.size()}; }
  std::vector<double>& storage() noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  const BlockPartition& partition() const noexcept { return *partition_; }
  std::size_t dimension() const noexcept { return data_.size(); }

  // Hard guard behind every engine step: all entries must stay finite.
  void require_finite_block(std::size_t b, std::int64_t t) const {
    for (double value : block(b)) {
      if (!std::isfinite(value)) {
        throw divergence_error("divergence: non-finite coordinate in block " +
                               std::to_string(b) + " at iteration " + std::to_string(t));
      }
    }
  }

 private:
  const BlockPartition* partition_;
  std::vector<double> data_;
};

}  // namespace rapsa
