#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "problem.hpp"
#include "step_schedule.hpp"

namespace rapsa {

// Closed-form convergence guarantees for the engines, written as pure
// functions of the problem constants. Each checker throws
// Error(precondition) naming the violated inequality rather than returning a
// meaningless number.
//
// Conventions: m = strong convexity, M = gradient Lipschitz constant, K =
// single-sample gradient second-moment bound, r = I/B, f0_gap = F(x0) - F*.

// Diminishing-step constant C such that E[F(x^t) - F*] <= C / (t + T0).
// Requires 2 m r gamma0 T0 > 1.
double sync_rate_constant(double m, double big_m, double k, double r, double gamma0,
                          double t0, double f0_gap);

// Radius of the constant-step limit neighborhood: gamma M K / (4 m).
double neighborhood_bound(double gamma, double m, double big_m, double k);

// Smallest iteration budget guaranteeing E[F - F*] <= eps when a fraction
// phi of the target is allotted to the noise neighborhood, together with the
// constant step size that achieves it. Requires phi in (0,1), eps > 0.
struct IterationBudget {
  std::int64_t iterations = 0;
  double step_size = 0.0;
};
IterationBudget min_iterations(double m, double big_m, double k, double r, double phi,
                               double eps, double f0_gap);

// Asynchronous diminishing-step constant: E[F(x^t) - F*] <= C / (t + T0)
// under a delay bound tau. rho is the free positive parameter of the bound
// (rho M < 2 required); requires (2 m gamma0 T0 / B)(1 - rho M / 2) > 1.
double async_rate_constant(double m, double big_m, double k, double blocks, double gamma0,
                           double t0, double tau, double rho, double f0_gap);

// Everything the harness derives about one experiment configuration, bundled
// for reporting. Optional fields stay empty when the schedule or engine kind
// makes them inapplicable.
struct BoundReport {
  ProblemConstants constants;
  double ratio_r = 0.0;  // I/B
  double f0_gap = 0.0;
  StepSchedule::Kind schedule_kind = StepSchedule::Kind::constant;
  double schedule_a = 0.0;
  double schedule_b = 0.0;
  double slack = 3.0;  // multiplier applied when curves are checked against bounds
  std::optional<double> sync_constant;
  std::optional<double> neighborhood;
  std::optional<double> async_constant;
  std::optional<double> async_rho;
  std::optional<std::int64_t> async_delay_bound;
  std::optional<IterationBudget> budget;

  std::string to_text() const;
  static std::string csv_header();
  // One machine-readable line; blocks/processors identify the sweep cell.
  std::string csv_row(std::size_t blocks, std::size_t processors) const;
};

}  // namespace rapsa
