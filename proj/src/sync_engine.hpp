#pragma once

#include <cstdint>
#include <vector>

#include "block_partition.hpp"
#include "curvature_memory.hpp"
#include "param_vector.hpp"
#include "problem.hpp"
#include "run_trace.hpp"
#include "selection.hpp"
#include "step_schedule.hpp"

namespace rapsa {

enum class Algorithm { rapsa, arapsa };

struct SyncConfig {
  std::size_t blocks = 1;      // B
  std::size_t processors = 1;  // I
  std::size_t minibatch = 1;   // L
  StepSchedule schedule = StepSchedule::constant(1e-2);
  Algorithm algorithm = Algorithm::rapsa;
  std::size_t memory = 10;     // curvature pairs per block (arapsa only)
  std::int64_t iterations = 0;  // T
  std::uint64_t seed = 0;
  std::int64_t record_every = 1;
  int threads = 1;
  double divergence_factor = 1e6;
};

// Coordinated parallel optimizer. Each iteration draws I distinct blocks and
// per-processor minibatches, computes all block gradients (and, for arapsa,
// curvature-scaled directions) against the frozen iterate, then commits every
// block write at a single barrier. arapsa additionally re-evaluates each
// block gradient at the committed iterate on the same minibatch and feeds the
// displacement/gradient-difference pair to that block's curvature memory.
//
// Determinism contract: for a fixed (seed, config) the iterate sequence is
// identical for any thread count, because all randomness is drawn from
// per-purpose streams and workers only touch per-slot or per-block state.
class SyncEngine {
 public:
  SyncEngine(const Problem& problem, const SyncConfig& config,
             std::span<const double> x0);

  // One coordinated iteration (select, compute, commit, update memories).
  void step();

  // Runs the remaining iterations, recording the exact objective at t=0,
  // every record_every-th iteration, and the final iteration. f_star may be
  // NaN, in which case the gap column is NaN. Throws Error(diverged) when the
  // objective exceeds divergence_factor * F(x0) at a record point or any
  // coordinate goes non-finite.
  RunTrace run(double f_star);

  std::int64_t time() const noexcept { return t_; }
  const ParamVector& iterate() const noexcept { return x_; }
  const BlockPartition& partition() const noexcept { return partition_; }
  const CurvatureMemory& block_memory(std::size_t b) const { return memories_.at(b); }
  const SyncConfig& config() const noexcept { return config_; }

 private:
  void validate() const;

  const Problem& problem_;
  SyncConfig config_;
  BlockPartition partition_;
  ParamVector x_;
  SelectionState selector_;                 // shared stream: block subsets
  std::vector<SelectionState> batchers_;    // per-slot streams: minibatches
  std::vector<CurvatureMemory> memories_;   // per block (arapsa)
  std::int64_t t_ = 0;
  double initial_objective_ = 0.0;

  // Per-slot scratch, sized to the largest block.
  struct SlotScratch {
    std::vector<std::uint32_t> batch;
    std::vector<double> gradient;
    std::vector<double> direction;
    std::vector<double> gradient_after;
    std::vector<double> pair_v;
    std::vector<double> pair_r;
  };
  std::vector<SlotScratch> slots_;
  std::vector<std::uint32_t> selected_;
};

// Convenience wrapper: construct, run, and also return the final iterate.
struct SyncRunResult {
  RunTrace trace;
  std::vector<double> final_x;
};
SyncRunResult run_sync(const Problem& problem, const SyncConfig& config,
                       std::span<const double> x0, double f_star);

}  // namespace rapsa
