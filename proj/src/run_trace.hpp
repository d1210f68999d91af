#pragma once

#include <cstdint>
#include <vector>

namespace rapsa {

// One recorded point of an optimization run. `features_processed` is the
// coordinate-work metric p * t * I / B for synchronous runs (each of the I
// processors touches ~p/B coordinates per iteration); asynchronous runs
// commit one block per iteration, so there it is p * t / B. `wall_clock_s`
// is informational only: it is machine-dependent and never enters any
// threshold.
struct TraceRow {
  std::int64_t t = 0;
  double features_processed = 0.0;
  double wall_clock_s = 0.0;
  double objective = 0.0;
  double objective_gap = 0.0;  // objective - F*; NaN when F* is unknown
};

struct RunTrace {
  std::vector<TraceRow> rows;

  const TraceRow& front() const { return rows.front(); }
  const TraceRow& back() const { return rows.back(); }
  std::size_t size() const { return rows.size(); }
};

}  // namespace rapsa
