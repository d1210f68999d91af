#include "rate_fit.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace rapsa {

RunTrace average_traces(const std::vector<RunTrace>& traces) {
  if (traces.empty()) {
    throw invalid_argument_error("average_traces: no traces given");
  }
  const RunTrace& first = traces.front();
  for (const RunTrace& trace : traces) {
    if (trace.size() != first.size()) {
      throw invalid_argument_error("average_traces: traces have different lengths");
    }
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (trace.rows[i].t != first.rows[i].t) {
        throw invalid_argument_error("average_traces: traces recorded on different t grids");
      }
    }
  }
  RunTrace mean;
  mean.rows = first.rows;
  const double inv = 1.0 / static_cast<double>(traces.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    double objective = 0.0, gap = 0.0, wall = 0.0;
    for (const RunTrace& trace : traces) {
      objective += trace.rows[i].objective;
      gap += trace.rows[i].objective_gap;
      wall += trace.rows[i].wall_clock_s;
    }
    mean.rows[i].objective = objective * inv;
    mean.rows[i].objective_gap = gap * inv;
    mean.rows[i].wall_clock_s = wall * inv;
  }
  return mean;
}

namespace {
// Ordinary least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) {
    throw invalid_argument_error("fit_rate: degenerate window (no spread in t)");
  }
  return (n * sxy - sx * sy) / denom;
}
}  // namespace

RateFit fit_rate(const std::vector<RunTrace>& traces, double window_lo_frac,
                 double t_shift) {
  if (!(window_lo_frac > 0.0 && window_lo_frac < 1.0)) {
    throw invalid_argument_error("fit_rate: window_lo_frac must lie in (0, 1)");
  }
  const RunTrace mean = average_traces(traces);
  if (mean.rows.empty()) {
    throw invalid_argument_error("fit_rate: empty trace");
  }
  const std::int64_t t_max = mean.rows.back().t;
  const std::int64_t t_lo =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(window_lo_frac *
                                                          static_cast<double>(t_max)));

  RateFit fit;
  std::vector<double> log_t, plain_t, log_gap;
  for (const TraceRow& row : mean.rows) {
    if (row.t < t_lo) continue;
    if (!(row.objective_gap > 0.0)) {
      // A gap at or below zero has converged past measurability at this
      // precision; shrink the window around it.
      fit.window_shrunk = true;
      continue;
    }
    log_t.push_back(std::log(static_cast<double>(row.t) + t_shift));
    plain_t.push_back(static_cast<double>(row.t));
    log_gap.push_back(std::log(row.objective_gap));
  }
  if (log_gap.size() < 2) {
    throw invalid_argument_error("fit_rate: fewer than 2 usable points in window (have " +
                                 std::to_string(log_gap.size()) + ")");
  }
  fit.points_used = log_gap.size();
  fit.loglog_slope = ols_slope(log_t, log_gap);
  fit.semilog_slope = ols_slope(plain_t, log_gap);
  fit.super_polynomial = fit.loglog_slope < -3.0;
  return fit;
}

double max_bound_ratio(const RunTrace& trace, double c, double t0) {
  if (!(c > 0.0)) {
    throw invalid_argument_error("max_bound_ratio: envelope constant must be positive, got " +
                                 std::to_string(c));
  }
  if (trace.rows.empty()) {
    throw invalid_argument_error("max_bound_ratio: empty trace");
  }
  double worst = 0.0;
  for (const TraceRow& row : trace.rows) {
    const double denom = static_cast<double>(row.t) + t0;
    if (!(denom > 0.0)) {
      throw invalid_argument_error("max_bound_ratio: t + t0 must be positive at every row");
    }
    worst = std::max(worst, row.objective_gap * denom / c);
  }
  return worst;
}

}  // namespace rapsa
