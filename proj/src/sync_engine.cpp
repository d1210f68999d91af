#include "sync_engine.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "parallel_for.hpp"
#include "rng.hpp"

namespace rapsa {

SyncEngine::SyncEngine(const Problem& problem, const SyncConfig& config,
                       std::span<const double> x0)
    : problem_(problem),
      config_(config),
      partition_(BlockPartition::make(problem.dimension(), config.blocks)),
      x_(partition_, std::vector<double>(x0.begin(), x0.end())),
      selector_(SplitMix64(config.seed).derive(stream_tag::block_selection),
                config.processors, config.minibatch) {
  validate();
  const SplitMix64 root(config_.seed);
  batchers_.reserve(config_.processors);
  for (std::size_t i = 0; i < config_.processors; ++i) {
    batchers_.emplace_back(root.derive(stream_tag::minibatch + i), 1, config_.minibatch);
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
  slots_.resize(config_.processors);
  for (auto& slot : slots_) {
    slot.gradient.resize(max_block);
    slot.direction.resize(max_block);
    slot.gradient_after.resize(max_block);
    slot.pair_v.resize(max_block);
    slot.pair_r.resize(max_block);
  }
  initial_objective_ = problem_.full_objective(x_.flat());
}

void SyncEngine::validate() const {
  if (x_.dimension() != problem_.dimension()) {
    throw invalid_argument_error("engine: initial iterate has dimension " +
                                 std::to_string(x_.dimension()) + ", problem expects " +
                                 std::to_string(problem_.dimension()));
  }
  if (config_.processors > config_.blocks) {
    throw invalid_argument_error("engine: processors I=" + std::to_string(config_.processors) +
                                 " must not exceed blocks B=" + std::to_string(config_.blocks));
  }
  if (config_.iterations < 0) {
    throw invalid_argument_error("engine: iteration count T must be non-negative");
  }
  if (config_.record_every < 1) {
    throw invalid_argument_error("engine: record_every must be at least 1");
  }
  if (config_.algorithm == Algorithm::arapsa && config_.memory == 0) {
    throw invalid_argument_error("engine: arapsa needs a positive curvature memory tau");
  }
  if (config_.threads < 1) {
    throw invalid_argument_error("engine: thread count must be at least 1");
  }
}

void SyncEngine::step() {
  const double gamma = config_.schedule.at(t_);
  const std::size_t num_samples = problem_.num_samples();
  selected_ = selector_.select_blocks(config_.blocks);
  const bool arapsa = config_.algorithm == Algorithm::arapsa;

  // Compute phase: every slot reads the frozen iterate; nothing is written.
  parallel_for(config_.processors, config_.threads, [&](std::size_t j) {
    SlotScratch& slot = slots_[j];
    const BlockRange& range = partition_.block(selected_[j]);
    slot.batch = batchers_[j].sample_minibatch(num_samples);
    std::span<double> g(slot.gradient.data(), range.length);
    problem_.block_minibatch_gradient(x_.flat(), range, slot.batch, g);
    std::span<double> d(slot.direction.data(), range.length);
    if (arapsa) {
      memories_[selected_[j]].two_loop_step(g, d);
    } else {
      std::copy(g.begin(), g.end(), d.begin());
    }
  });

  // Commit phase: all selected blocks are written at one barrier. Slots hold
  // distinct blocks, so the writes are disjoint.
  for (std::size_t j = 0; j < config_.processors; ++j) {
    const BlockRange& range = partition_.block(selected_[j]);
    std::span<double> xb = x_.block(selected_[j]);
    if (arapsa) {
      // Stash the pre-commit block; the memory phase turns it into the
      // realized displacement (identical arithmetic to the asynchronous
      // engines, where the displacement cannot be reconstructed from the
      // direction alone).
      std::copy(xb.begin(), xb.end(), slots_[j].pair_v.begin());
    }
    for (std::size_t i = 0; i < range.length; ++i) {
      xb[i] -= gamma * slots_[j].direction[i];
    }
    x_.require_finite_block(selected_[j], t_);
  }

  // Memory phase (arapsa): re-evaluate each block gradient at the committed
  // iterate on the same minibatch and admit the curvature pair.
  if (arapsa) {
    parallel_for(config_.processors, config_.threads, [&](std::size_t j) {
      SlotScratch& slot = slots_[j];
      const std::size_t b = selected_[j];
      const BlockRange& range = partition_.block(b);
      std::span<double> g_after(slot.gradient_after.data(), range.length);
      problem_.block_minibatch_gradient(x_.flat(), range, slot.batch, g_after);
      const std::span<const double> xb = x_.block(b);
      for (std::size_t i = 0; i < range.length; ++i) {
        slot.pair_v[i] = xb[i] - slot.pair_v[i];
        slot.pair_r[i] = g_after[i] - slot.gradient[i];
      }
      memories_[b].admit_pair(std::span<const double>(slot.pair_v.data(), range.length),
                              std::span<const double>(slot.pair_r.data(), range.length));
    });
  }
  ++t_;
}

RunTrace SyncEngine::run(double f_star) {
  const auto start = std::chrono::steady_clock::now();
  const double divergence_limit =
      config_.divergence_factor * (initial_objective_ > 0.0 ? initial_objective_ : 1.0);
  const double work_per_iter = static_cast<double>(problem_.dimension()) *
                               static_cast<double>(config_.processors) /
                               static_cast<double>(config_.blocks);

  RunTrace trace;
  auto record = [&](std::int64_t t) {
    const double objective = problem_.full_objective(x_.flat());
    if (!std::isfinite(objective) || objective > divergence_limit) {
      throw divergence_error("divergence: objective " + std::to_string(objective) +
                             " at iteration " + std::to_string(t) + " (step size " +
                             std::to_string(config_.schedule.at(t > 0 ? t - 1 : 0)) +
                             ") exceeds limit " + std::to_string(divergence_limit));
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.rows.push_back(TraceRow{t, work_per_iter * static_cast<double>(t), wall,
                                  objective, objective - f_star});
  };

  record(0);
  for (std::int64_t t = 1; t <= config_.iterations; ++t) {
    step();
    if (t % config_.record_every == 0 || t == config_.iterations) {
      record(t);
    }
  }
  return trace;
}

SyncRunResult run_sync(const Problem& problem, const SyncConfig& config,
                       std::span<const double> x0, double f_star) {
  SyncEngine engine(problem, config, x0);
  SyncRunResult result;
  result.trace = engine.run(f_star);
  const auto flat = engine.iterate().flat();
  result.final_x.assign(flat.begin(), flat.end());
  return result;
}

}  // namespace rapsa
