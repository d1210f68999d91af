#pragma once

#include <cstdint>
#include <vector>

#include "run_trace.hpp"

namespace rapsa {

// Pointwise mean of several traces recorded on the identical t grid (same T,
// same record stride). Throws Error(invalid_argument) when grids differ.
RunTrace average_traces(const std::vector<RunTrace>& traces);

// Least-squares rate estimate over the tail window t in
// [window_lo_frac * T, T] of the seed-averaged gap curve.
//
// The power-law fit regresses log(gap) on log(t + t_shift); passing the
// schedule's T0 as t_shift makes a curve gap = C/(t+T0) come out with slope
// exactly -1. The exponential fit regresses log(gap) on t. A curve decaying
// faster than any power (power-law slope below -3) is flagged
// super_polynomial, in which case semilog_slope is the meaningful number.
//
// Rows with non-positive gap cannot be log-transformed; they are dropped and
// window_shrunk is set. Fewer than two usable points is an error.
struct RateFit {
  double loglog_slope = 0.0;
  double semilog_slope = 0.0;
  bool super_polynomial = false;
  std::size_t points_used = 0;
  bool window_shrunk = false;
};

RateFit fit_rate(const std::vector<RunTrace>& traces, double window_lo_frac = 0.1,
                 double t_shift = 0.0);

// Largest gap / (c / (t + t0)) over the recorded rows: the worst-case ratio
// of a curve against a decay envelope c/(t+t0). A result <= 1 means the
// curve sits under the envelope at every recorded point. Requires c > 0 and
// t + t0 > 0 for every row.
double max_bound_ratio(const RunTrace& trace, double c, double t0);

}  // namespace rapsa
