#include "async_simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace rapsa {

AsyncSimulator::AsyncSimulator(const Problem& problem, const AsyncConfig& config,
                               std::span<const double> x0)
    : problem_(problem),
      config_(config),
      partition_(BlockPartition::make(problem.dimension(), config.blocks)),
      x_(partition_, std::vector<double>(x0.begin(), x0.end())),
      tie_rng_(SplitMix64(config.seed).derive(stream_tag::tie_break)),
      conflict_rng_(SplitMix64(config.seed).derive(stream_tag::conflict)) {
  config_.delay.validate();
  if (config_.processors == 0) {
    throw invalid_argument_error("async engine: processor count I must be positive");
  }
  if (config_.iterations < 0) {
    throw invalid_argument_error("async engine: commit budget T must be non-negative");
  }
  if (config_.record_every < 1) {
    throw invalid_argument_error("async engine: record_every must be at least 1");
  }
  if (config_.algorithm == Algorithm::arapsa && config_.memory == 0) {
    throw invalid_argument_error("async engine: arapsa needs a positive curvature memory tau");
  }

  const SplitMix64 root(config_.seed);
  for (std::size_t i = 0; i < config_.processors; ++i) {
    block_pickers_.emplace_back(root.derive(stream_tag::block_selection + i), 1,
                                config_.minibatch);
    batchers_.emplace_back(root.derive(stream_tag::minibatch + i), 1, config_.minibatch);
    delay_rngs_.emplace_back(root.derive(stream_tag::delay_clock + i));
  }
  if (config_.algorithm == Algorithm::arapsa) {
    memories_.reserve(config_.blocks);
    for (std::size_t b = 0; b < config_.blocks; ++b) {
      memories_.emplace_back(config_.memory, partition_.block(b).length);
    }
  }
  std::size_t max_block = 0;
  for (std::size_t b = 0; b < config_.blocks; ++b) {
    max_block = std::max(max_block, partition_.block(b).length);
  }
  scratch_gradient_.resize(max_block);
  scratch_pair_v_.resize(max_block);
  scratch_pair_r_.resize(max_block);

  procs_.resize(config_.processors);
  for (std::size_t i = 0; i < config_.processors; ++i) start_task(i);
}

void AsyncSimulator::start_task(std::size_t i) {
  ProcessorState& proc = procs_[i];
  Task& task = proc.task;
  task.read_t = commit_count_;
  task.block = block_pickers_[i].select_blocks(config_.blocks)[0];
  task.batch = batchers_[i].sample_minibatch(problem_.num_samples());
  proc.clock += config_.delay.sample(delay_rngs_[i]);
  task.finish_clock = proc.clock;
  task.tie_coin = tie_rng_.next_u64();

  const BlockRange& range = partition_.block(task.block);
  task.direction.resize(range.length);
  if (config_.algorithm == Algorithm::arapsa) {
    task.gradient_read.resize(range.length);
    problem_.block_minibatch_gradient(x_.flat(), range, task.batch, task.gradient_read);
    memories_[task.block].two_loop_step(task.gradient_read, task.direction);
    const auto xb = x_.block(task.block);
    task.block_at_read.assign(xb.begin(), xb.end());
  } else {
    problem_.block_minibatch_gradient(x_.flat(), range, task.batch, task.direction);
  }
  proc.busy = true;
}

void AsyncSimulator::advance_tick() {
  // Processors that committed or lost since the last tick snapshot the
  // current iterate and start their next task.
  std::sort(finished_.begin(), finished_.end());
  for (const std::size_t i : finished_) start_task(i);
  finished_.clear();

  std::int64_t tick = std::numeric_limits<std::int64_t>::max();
  for (const ProcessorState& proc : procs_) {
    if (proc.busy) tick = std::min(tick, proc.task.finish_clock);
  }
  if (tick == std::numeric_limits<std::int64_t>::max()) {
    throw internal_error("async engine: no pending tasks");
  }
  std::vector<std::size_t> group;
  for (std::size_t i = 0; i < procs_.size(); ++i) {
    if (procs_[i].busy && procs_[i].task.finish_clock == tick) group.push_back(i);
  }

  // Same-instant writers on the same block: one survives, the rest lose
  // their work entirely.
  ready_.clear();
  ready_next_ = 0;
  std::vector<std::size_t> candidates;
  for (const std::size_t i : group) {
    if (!procs_[i].busy) continue;  // already resolved as a loser below
    candidates.clear();
    for (const std::size_t j : group) {
      if (procs_[j].busy && procs_[j].task.block == procs_[i].task.block) {
        candidates.push_back(j);
      }
    }
    const std::size_t winner = candidates[resolve_conflict(candidates.size(), conflict_rng_)];
    for (const std::size_t j : candidates) {
      procs_[j].busy = false;
      if (j != winner) {
        finished_.push_back(j);
        ++pending_discards_;
        ++total_discarded_;
      }
    }
    ready_.push_back(winner);
  }

  // Surviving writes land in coin order; each becomes its own commit.
  std::sort(ready_.begin(), ready_.end(), [&](std::size_t a, std::size_t b) {
    const Task& ta = procs_[a].task;
    const Task& tb = procs_[b].task;
    if (ta.tie_coin != tb.tie_coin) return ta.tie_coin < tb.tie_coin;
    return a < b;
  });
}

AsyncSimulator::CommitInfo AsyncSimulator::step_commit() {
  while (ready_next_ >= ready_.size()) advance_tick();
  const std::size_t i = ready_[ready_next_++];
  Task& task = procs_[i].task;
  const BlockRange& range = partition_.block(task.block);

  const std::int64_t staleness = commit_count_ - task.read_t;
  if (staleness > config_.delay.delta_max) {
    throw precondition_error(
        "async engine: bounded delay assumption violated at commit " +
        std::to_string(commit_count_) + ": staleness " + std::to_string(staleness) +
        " exceeds delta_max " + std::to_string(config_.delay.delta_max));
  }
  max_staleness_ = std::max(max_staleness_, staleness);

  const double gamma = config_.schedule.at(commit_count_);
  std::span<double> xb = x_.block(task.block);
  for (std::size_t k = 0; k < range.length; ++k) {
    xb[k] -= gamma * task.direction[k];
  }
  x_.require_finite_block(task.block, commit_count_);

  if (config_.algorithm == Algorithm::arapsa) {
    // Displacement and same-minibatch gradient difference straddling the
    // whole read->commit window, including writes other processors landed on
    // this block in between.
    std::span<double> g_after(scratch_gradient_.data(), range.length);
    problem_.block_minibatch_gradient(x_.flat(), range, task.batch, g_after);
    for (std::size_t k = 0; k < range.length; ++k) {
      scratch_pair_v_[k] = xb[k] - task.block_at_read[k];
      scratch_pair_r_[k] = g_after[k] - task.gradient_read[k];
    }
    memories_[task.block].admit_pair(
        std::span<const double>(scratch_pair_v_.data(), range.length),
        std::span<const double>(scratch_pair_r_.data(), range.length));
  }

  CommitInfo info;
  info.t = commit_count_;
  info.processor = i;
  info.block = task.block;
  info.staleness = staleness;
  info.discarded = pending_discards_;
  pending_discards_ = 0;

  procs_[i].busy = false;
  finished_.push_back(i);
  ++commit_count_;
  return info;
}

RunTrace AsyncSimulator::run(double f_star) {
  const auto start = std::chrono::steady_clock::now();
  const double f0 = problem_.full_objective(x_.flat());
  const double divergence_limit = config_.divergence_factor * (f0 > 0.0 ? f0 : 1.0);
  // One block of ~p/B coordinates is updated per commit.
  const double work_per_commit = static_cast<double>(problem_.dimension()) /
                                 static_cast<double>(config_.blocks);

  RunTrace trace;
  auto record = [&](std::int64_t t) {
    const double objective = problem_.full_objective(x_.flat());
    if (!std::isfinite(objective) || objective > divergence_limit) {
      throw divergence_error("divergence: objective " + std::to_string(objective) +
                             " at commit " + std::to_string(t) + " exceeds limit " +
                             std::to_string(divergence_limit));
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.rows.push_back(TraceRow{t, work_per_commit * static_cast<double>(t), wall,
                                  objective, objective - f_star});
  };

  record(0);
  for (std::int64_t t = 1; t <= config_.iterations; ++t) {
    step_commit();
    if (t % config_.record_every == 0 || t == config_.iterations) {
      record(t);
    }
  }
  return trace;
}

SyncRunResult run_async_sim(const Problem& problem, const AsyncConfig& config,
                            std::span<const double> x0, double f_star) {
  AsyncSimulator sim(problem, config, x0);
  SyncRunResult result;
  result.trace = sim.run(f_star);
  const auto flat = sim.iterate().flat();
  result.final_x.assign(flat.begin(), flat.end());
  return result;
}

}  // namespace rapsa
