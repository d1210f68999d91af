#include "async_threads.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <string>
#include <thread>

#include "curvature_memory.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "selection.hpp"

namespace rapsa {

namespace {
struct Snapshot {
  std::int64_t t = 0;
  double wall = 0.0;
  std::vector<double> x;
};
}  // namespace

AsyncThreadsResult run_async_threads(const Problem& problem, const AsyncConfig& config,
                                     std::span<const double> x0, double f_star,
                                     double watchdog_seconds) {
  if (config.processors == 0) {
    throw invalid_argument_error("async threads: processor count I must be positive");
  }
  if (config.iterations < 0) {
    throw invalid_argument_error("async threads: commit budget T must be non-negative");
  }
  if (config.record_every < 1) {
    throw invalid_argument_error("async threads: record_every must be at least 1");
  }
  const BlockPartition partition = BlockPartition::make(problem.dimension(), config.blocks);
  const std::size_t p = problem.dimension();
  if (x0.size() != p) {
    throw invalid_argument_error("async threads: initial iterate has wrong dimension");
  }

  // Shared state. Coordinates are individually atomic; block versions detect
  // interfering commits; block mutexes serialize the commit sections only.
  std::vector<std::atomic<double>> shared(p);
  for (std::size_t j = 0; j < p; ++j) shared[j].store(x0[j], std::memory_order_relaxed);
  std::vector<std::atomic<std::uint64_t>> block_version(config.blocks);
  for (auto& v : block_version) v.store(0, std::memory_order_relaxed);
  std::deque<std::mutex> block_mutex(config.blocks);
  std::vector<CurvatureMemory> memories;
  if (config.algorithm == Algorithm::arapsa) {
    if (config.memory == 0) {
      throw invalid_argument_error("async threads: arapsa needs a positive curvature memory tau");
    }
    for (std::size_t b = 0; b < config.blocks; ++b) {
      memories.emplace_back(config.memory, partition.block(b).length);
    }
  }

  std::atomic<std::int64_t> commit_count{0};
  std::atomic<std::int64_t> conflicts_lost{0};
  std::atomic<bool> stop{false};

  // Trace rows are produced by a single collector fed through this queue.
  std::mutex queue_mutex;
  std::condition_variable queue_cv;
  std::deque<Snapshot> queue;
  const auto start = std::chrono::steady_clock::now();
  auto wall_now = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  auto copy_shared = [&]() {
    std::vector<double> copy(p);
    for (std::size_t j = 0; j < p; ++j) copy[j] = shared[j].load(std::memory_order_relaxed);
    return copy;
  };
  auto push_snapshot = [&](std::int64_t t) {
    Snapshot snap{t, wall_now(), copy_shared()};
    {
      std::lock_guard<std::mutex> lock(queue_mutex);
      queue.push_back(std::move(snap));
    }
    queue_cv.notify_one();
  };

  const double f0 = problem.full_objective(x0);
  const double divergence_limit = config.divergence_factor * (f0 > 0.0 ? f0 : 1.0);
  const double work_per_commit =
      static_cast<double>(p) / static_cast<double>(config.blocks);

  RunTrace trace;
  trace.rows.push_back(TraceRow{0, 0.0, 0.0, f0, f0 - f_star});
  std::exception_ptr collector_error;
  std::thread collector([&]() {
    try {
      while (true) {
        Snapshot snap;
        {
          std::unique_lock<std::mutex> lock(queue_mutex);
          queue_cv.wait(lock, [&]() { return !queue.empty() || stop.load(); });
          if (queue.empty()) {
            if (stop.load()) return;
            continue;
          }
          snap = std::move(queue.front());
          queue.pop_front();
        }
        const double objective = problem.full_objective(snap.x);
        if (!std::isfinite(objective) || objective > divergence_limit) {
          stop.store(true);
          throw divergence_error("divergence: objective " + std::to_string(objective) +
                                 " at commit " + std::to_string(snap.t));
        }
        trace.rows.push_back(TraceRow{snap.t, work_per_commit * static_cast<double>(snap.t),
                                      snap.wall, objective, objective - f_star});
      }
    } catch (...) {
      collector_error = std::current_exception();
      stop.store(true);
    }
  });

  std::exception_ptr worker_error;
  std::mutex worker_error_mutex;
  std::vector<std::thread> workers;
  const SplitMix64 root(config.seed);
  for (std::size_t i = 0; i < config.processors; ++i) {
    workers.emplace_back([&, i]() {
      try {
        SelectionState block_picker(root.derive(stream_tag::block_selection + i), 1,
                                    config.minibatch);
        SelectionState batcher(root.derive(stream_tag::minibatch + i), 1, config.minibatch);
        SplitMix64 coin(root.derive(stream_tag::conflict + i));
        std::vector<double> local(p), gradient, direction, g_after, pair_v, pair_r, block_read;
        const bool arapsa = config.algorithm == Algorithm::arapsa;

        while (!stop.load(std::memory_order_relaxed)) {
          const std::size_t b = block_picker.select_blocks(config.blocks)[0];
          const BlockRange& range = partition.block(b);
          const auto batch = batcher.sample_minibatch(problem.num_samples());
          const std::uint64_t version_read = block_version[b].load(std::memory_order_acquire);
          for (std::size_t j = 0; j < p; ++j) {
            local[j] = shared[j].load(std::memory_order_relaxed);
          }
          gradient.resize(range.length);
          problem.block_minibatch_gradient(local, range, batch, gradient);
          direction.resize(range.length);
          if (arapsa) {
            block_read.assign(local.begin() + range.offset,
                              local.begin() + range.offset + range.length);
            std::lock_guard<std::mutex> lock(block_mutex[b]);
            memories[b].two_loop_step(gradient, direction);
          } else {
            direction = gradient;
          }

          std::lock_guard<std::mutex> lock(block_mutex[b]);
          if (stop.load(std::memory_order_relaxed)) break;
          if (block_version[b].load(std::memory_order_relaxed) != version_read) {
            // Another commit landed on this block while we computed: treat the
            // pair of writes as colliding and survive a fair coin.
            if (coin.next_below(2) == 0) {
              conflicts_lost.fetch_add(1, std::memory_order_relaxed);
              continue;
            }
          }
          // Claiming the counter and writing happen under the block lock, so
          // per-block writes serialize; counter claims from different blocks
          // may interleave, hence the atomic fetch_add.
          const std::int64_t t = commit_count.fetch_add(1, std::memory_order_relaxed);
          if (t >= config.iterations) {
            stop.store(true);
            queue_cv.notify_one();
            break;
          }
          const double gamma = config.schedule.at(t);
          for (std::size_t k = 0; k < range.length; ++k) {
            const std::size_t j = range.offset + k;
            const double value =
                shared[j].load(std::memory_order_relaxed) - gamma * direction[k];
            if (!std::isfinite(value)) {
              throw divergence_error("divergence: non-finite coordinate in block " +
                                     std::to_string(b) + " at commit " + std::to_string(t));
            }
            shared[j].store(value, std::memory_order_relaxed);
          }
          block_version[b].fetch_add(1, std::memory_order_release);

          if (arapsa) {
            for (std::size_t j = 0; j < p; ++j) {
              local[j] = shared[j].load(std::memory_order_relaxed);
            }
            g_after.resize(range.length);
            problem.block_minibatch_gradient(local, range, batch, g_after);
            pair_v.resize(range.length);
            pair_r.resize(range.length);
            for (std::size_t k = 0; k < range.length; ++k) {
              pair_v[k] = local[range.offset + k] - block_read[k];
              pair_r[k] = g_after[k] - gradient[k];
            }
            memories[b].admit_pair(pair_v, pair_r);
          }

          const std::int64_t done = t + 1;
          if (done % config.record_every == 0 || done == config.iterations) {
            push_snapshot(done);
          }
          if (done >= config.iterations) {
            stop.store(true);
            queue_cv.notify_one();
          }
        }
      } catch (...) {
        {
          std::lock_guard<std::mutex> lock(worker_error_mutex);
          if (!worker_error) worker_error = std::current_exception();
        }
        stop.store(true);
        queue_cv.notify_one();
      }
    });
  }

  // Watchdog: declare the run wedged if the commit counter stops moving.
  std::int64_t last_seen = 0;
  auto last_progress = std::chrono::steady_clock::now();
  while (!stop.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    const std::int64_t now_count = commit_count.load();
    if (now_count != last_seen) {
      last_seen = now_count;
      last_progress = std::chrono::steady_clock::now();
    } else if (std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             last_progress)
                   .count() > watchdog_seconds) {
      stop.store(true);
      queue_cv.notify_one();
      for (auto& w : workers) w.join();
      collector.join();
      throw internal_error("async threads: watchdog fired after " +
                           std::to_string(watchdog_seconds) +
                           "s without a commit (stalled at " + std::to_string(now_count) +
                           "/" + std::to_string(config.iterations) + ")");
    }
  }
  for (auto& w : workers) w.join();
  {
    std::lock_guard<std::mutex> lock(queue_mutex);
    stop.store(true);
  }
  queue_cv.notify_one();
  collector.join();
  if (worker_error) std::rethrow_exception(worker_error);
  if (collector_error) std::rethrow_exception(collector_error);

  AsyncThreadsResult result;
  result.trace = std::move(trace);
  result.final_x = copy_shared();
  result.conflicts_lost = conflicts_lost.load();
  // Commits on different blocks can enqueue snapshots out of order; restore
  // the by-t invariant the trace format promises.
  std::sort(result.trace.rows.begin(), result.trace.rows.end(),
            [](const TraceRow& a, const TraceRow& b) { return a.t < b.t; });
  result.trace.rows.erase(std::unique(result.trace.rows.begin(), result.trace.rows.end(),
                                      [](const TraceRow& a, const TraceRow& b) {
                                        return a.t == b.t;
                                      }),
                          result.trace.rows.end());
  // The final commit may have raced past a stride boundary; make sure the
  // last row reflects the terminal state.
  if (result.trace.rows.back().t != config.iterations && config.iterations > 0) {
    const double objective = problem.full_objective(result.final_x);
    result.trace.rows.push_back(TraceRow{
        config.iterations, work_per_commit * static_cast<double>(config.iterations),
        wall_now(), objective, objective - f_star});
  }
  return result;
}

}  // namespace rapsa
