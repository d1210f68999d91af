#pragma once

#include <cstdint>
#include <vector>

#include "block_partition.hpp"
#include "curvature_memory.hpp"
#include "delay_model.hpp"
#include "param_vector.hpp"
#include "problem.hpp"
#include "run_trace.hpp"
#include "selection.hpp"
#include "step_schedule.hpp"
#include "sync_engine.hpp"

namespace rapsa {

struct AsyncConfig {
  std::size_t blocks = 1;
  std::size_t processors = 1;
  std::size_t minibatch = 1;
  StepSchedule schedule = StepSchedule::constant(1e-2);
  Algorithm algorithm = Algorithm::rapsa;
  std::size_t memory = 10;      // curvature pairs per block (arapsa only)
  std::int64_t iterations = 0;  // T, counted in commits
  std::uint64_t seed = 0;
  std::int64_t record_every = 1;
  DelayModel delay;
  double divergence_factor = 1e6;
};

// Deterministic event-driven model of uncoordinated processors sharing one
// iterate.
//
// Each processor repeatedly: snapshots the iterate, picks a block and a
// minibatch independently at random, computes its descent direction from the
// snapshot, and finishes after a random integer duration on its own clock
// (t_next = t_now + duration). Completions are replayed in clock order, ties
// broken by a seeded coin; processors finishing at the same instant on the
// same block form a conflict group from which exactly one writer survives
// and the rest are discarded. Every surviving write is a commit; commits are
// numbered consecutively and that number is the iteration index: the t-th
// commit applies x_b -= schedule(t) * d.
//
// The staleness of a commit is (commit index) - (commit count at snapshot).
// The simulator enforces the bounded-delay assumption as a hard error:
// staleness must never exceed delay.delta_max. Keeping processors * mean
// duration comfortably below delta_max leaves room for tie serialization.
//
// With one processor and zero clock variance the model degenerates to the
// synchronous engine: snapshots are never stale and the commit sequence
// reproduces run_sync bit for bit on the same seed.
class AsyncSimulator {
 public:
  AsyncSimulator(const Problem& problem, const AsyncConfig& config,
                 std::span<const double> x0);

  struct CommitInfo {
    std::int64_t t = 0;          // commit index
    std::size_t processor = 0;
    std::size_t block = 0;
    std::int64_t staleness = 0;  // commits between snapshot and this write
    std::int64_t discarded = 0;  // writes lost to conflicts while producing this commit
  };

  // Advances the event loop until exactly one more commit lands.
  CommitInfo step_commit();

  // Drives step_commit to config.iterations commits, recording the exact
  // objective at t=0, every record_every-th commit, and the final commit.
  RunTrace run(double f_star);

  std::int64_t commits() const noexcept { return commit_count_; }
  const ParamVector& iterate() const noexcept { return x_; }
  std::int64_t max_staleness() const noexcept { return max_staleness_; }
  std::int64_t total_discarded() const noexcept { return total_discarded_; }
  const CurvatureMemory& block_memory(std::size_t b) const { return memories_.at(b); }

 private:
  struct Task {
    std::int64_t read_t = 0;       // commit count at snapshot
    std::int64_t finish_clock = 0; // processor clock at completion (ordering key)
    std::uint64_t tie_coin = 0;
    std::size_t block = 0;
    std::vector<std::uint32_t> batch;
    std::vector<double> direction;      // applied at commit
    std::vector<double> gradient_read;  // arapsa: g at snapshot
    std::vector<double> block_at_read;  // arapsa: x_b at snapshot
  };
  struct ProcessorState {
    std::int64_t clock = 0;  // local completion clock
    Task task;
    bool busy = false;
  };

  void start_task(std::size_t i);
  void advance_tick();  // pops the earliest completion group into ready_

  const Problem& problem_;
  AsyncConfig config_;
  BlockPartition partition_;
  ParamVector x_;
  std::vector<ProcessorState> procs_;
  std::vector<SelectionState> block_pickers_;
  std::vector<SelectionState> batchers_;
  std::vector<SplitMix64> delay_rngs_;
  SplitMix64 tie_rng_;
  SplitMix64 conflict_rng_;
  std::vector<CurvatureMemory> memories_;

  std::vector<std::size_t> ready_;      // winners of the current tick, commit order
  std::size_t ready_next_ = 0;
  std::vector<std::size_t> finished_;   // processors to restart before the next tick
  std::int64_t pending_discards_ = 0;

  std::int64_t commit_count_ = 0;
  std::int64_t max_staleness_ = 0;
  std::int64_t total_discarded_ = 0;
  std::vector<double> scratch_gradient_;
  std::vector<double> scratch_pair_v_;
  std::vector<double> scratch_pair_r_;
};

SyncRunResult run_async_sim(const Problem& problem, const AsyncConfig& config,
                            std::span<const double> x0, double f_star);

}  // namespace rapsa
