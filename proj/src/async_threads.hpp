#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "async_simulator.hpp"
#include "problem.hpp"
#include "run_trace.hpp"

namespace rapsa {

struct AsyncThreadsResult {
  RunTrace trace;
  std::vector<double> final_x;
  std::int64_t conflicts_lost = 0;  // writes discarded by commit arbitration
};

// Runs config.processors real threads hammering one shared iterate with
// per-coordinate atomic reads and writes (individually atomic, deliberately
// not globally consistent). Commits are arbitrated per block: a writer whose
// block changed under it between snapshot and commit survives a fair coin
// against the interfering write, matching the simulator's conflict rule; the
// global iteration counter advances only for surviving commits and the run
// stops after config.iterations of them. The step size is taken at the
// commit's counter value.
//
// Timing comes from real scheduling, so config.delay is ignored, traces are
// not reproducible, and no staleness bound is enforced; the event-driven
// simulator is the reference for anything quantitative. A watchdog aborts
// the run if no commit lands for watchdog_seconds.
AsyncThreadsResult run_async_threads(const Problem& problem, const AsyncConfig& config,
                                     std::span<const double> x0, double f_star,
                                     double watchdog_seconds = 60.0);

}  // namespace rapsa
