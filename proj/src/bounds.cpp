#include "bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace rapsa {

namespace {
void require_positive(double value, const char* name) {
  if (!(value > 0.0)) {
    throw precondition_error(std::string("bound: ") + name + " must be positive, got " +
                             std::to_string(value));
  }
}
}  // namespace

double sync_rate_constant(double m, double big_m, double k, double r, double gamma0,
                          double t0, double f0_gap) {
  require_positive(m, "m");
  require_positive(big_m, "M");
  require_positive(r, "r");
  require_positive(gamma0, "gamma0");
  require_positive(t0, "T0");
  if (k < 0.0 || f0_gap < 0.0) {
    throw precondition_error("bound: K and f0_gap must be non-negative");
  }
  const double product = gamma0 * t0;
  if (!(2.0 * m * r * product > 1.0)) {
    throw precondition_error("bound: requires 2*m*r*gamma0*T0 > 1, got " +
                             std::to_string(2.0 * m * r * product));
  }
  const double decay_term =
      r * big_m * k * product * product / (4.0 * m * r * product - 2.0);
  return std::max(decay_term, t0 * f0_gap);
}

double neighborhood_bound(double gamma, double m, double big_m, double k) {
  require_positive(gamma, "gamma");
  require_positive(m, "m");
  require_positive(big_m, "M");
  if (k < 0.0) {
    throw precondition_error("bound: K must be non-negative");
  }
  return gamma * big_m * k / (4.0 * m);
}

IterationBudget min_iterations(double m, double big_m, double k, double r, double phi,
                               double eps, double f0_gap) {
  require_positive(m, "m");
  require_positive(big_m, "M");
  require_positive(k, "K");
  require_positive(r, "r");
  require_positive(eps, "eps");
  if (!(phi > 0.0 && phi < 1.0)) {
    throw precondition_error("bound: phi must lie in (0, 1), got " + std::to_string(phi));
  }
  if (f0_gap < 0.0) {
    throw precondition_error("bound: f0_gap must be non-negative");
  }
  IterationBudget budget;
  budget.step_size = 4.0 * m * phi * eps / (big_m * k);
  // Already inside the shrunk target: no iterations needed.
  if (f0_gap <= (1.0 - phi) * eps) {
    budget.iterations = 0;
    return budget;
  }
  const double count = big_m * k / (8.0 * m * m * r * phi * eps) *
                       std::log(f0_gap / ((1.0 - phi) * eps));
  budget.iterations = static_cast<std::int64_t>(std::ceil(count));
  return budget;
}

double async_rate_constant(double m, double big_m, double k, double blocks, double gamma0,
                           double t0, double tau, double rho, double f0_gap) {
  require_positive(m, "m");
  require_positive(big_m, "M");
  require_positive(blocks, "B");
  require_positive(gamma0, "gamma0");
  require_positive(t0, "T0");
  require_positive(rho, "rho");
  if (k < 0.0 || f0_gap < 0.0 || tau < 0.0) {
    throw precondition_error("bound: K, f0_gap and tau must be non-negative");
  }
  if (!(rho * big_m < 2.0)) {
    throw precondition_error("bound: requires rho*M < 2, got " + std::to_string(rho * big_m));
  }
  const double product = gamma0 * t0;
  const double condition = (2.0 * m * product / blocks) * (1.0 - rho * big_m / 2.0);
  if (!(condition > 1.0)) {
    throw precondition_error("bound: requires (2*m*gamma0*T0/B)*(1 - rho*M/2) > 1, got " +
                             std::to_string(condition));
  }
  const double numerator =
      big_m * k * product * product / (2.0 * blocks) +
      tau * tau * big_m * k * product * product * product / (2.0 * rho * blocks * blocks);
  return std::max(numerator / (condition - 1.0), t0 * f0_gap);
}

std::string BoundReport::to_text() const {
  std::ostringstream out;
  out.precision(10);
  out << "problem constants\n"
      << "  m (strong convexity)      = " << constants.strong_convexity << "\n"
      << "  M (gradient Lipschitz)    = " << constants.lipschitz << "\n"
      << "  K (grad second moment)    = " << constants.grad_second_moment << "\n"
      << "  r = I/B                   = " << ratio_r << "\n"
      << "  F(x0) - F*                = " << f0_gap << "\n";
  out << "schedule\n  kind = ";
  switch (schedule_kind) {
    case StepSchedule::Kind::constant:
      out << "constant, gamma = " << schedule_a << "\n";
      break;
    case StepSchedule::Kind::diminishing:
      out << "diminishing, gamma0 = " << schedule_a << ", T0 = " << schedule_b << "\n";
      break;
    case StepSchedule::Kind::hybrid:
      out << "hybrid, epsilon = " << schedule_a << ", anneal = " << schedule_b << "\n";
      break;
  }
  out << "guarantees (checked against curves with slack x" << slack << ")\n";
  if (sync_constant) {
    out << "  gap(t) <= C / (t + T0), C = " << *sync_constant << "\n";
  }
  if (neighborhood) {
    out << "  limit neighborhood gamma*M*K/(4m) = " << *neighborhood << "\n";
  }
  if (async_constant) {
    out << "  async gap(t) <= C / (t + T0), C = " << *async_constant
        << " (rho = " << async_rho.value_or(0.0)
        << ", delay bound = " << async_delay_bound.value_or(0) << ")\n";
  }
  if (budget) {
    out << "  iteration budget: " << budget->iterations
        << " iterations at step " << budget->step_size << "\n";
  }
  return out.str();
}

std::string BoundReport::csv_header() {
  return "blocks,processors,r,m,M,K,f0_gap,schedule,schedule_a,schedule_b,"
         "C_sync,neighborhood,C_async,rho,delay_bound,budget_iterations,budget_step,slack";
}

std::string BoundReport::csv_row(std::size_t blocks, std::size_t processors) const {
  std::ostringstream out;
  out.precision(17);
  auto opt = [&](const std::optional<double>& v) {
    if (v) out << *v;
    out << ",";
  };
  out << blocks << "," << processors << "," << ratio_r << ","
      << constants.strong_convexity << "," << constants.lipschitz << ","
      << constants.grad_second_moment << "," << f0_gap << ",";
  switch (schedule_kind) {
    case StepSchedule::Kind::constant: out << "constant,"; break;
    case StepSchedule::Kind::diminishing: out << "diminishing,"; break;
    case StepSchedule::Kind::hybrid: out << "hybrid,"; break;
  }
  out << schedule_a << "," << schedule_b << ",";
  opt(sync_constant);
  opt(neighborhood);
  opt(async_constant);
  opt(async_rho);
  if (async_delay_bound) out << *async_delay_bound;
  out << ",";
  if (budget) {
    out << budget->iterations << "," << budget->step_size;
  } else {
    out << ",";
  }
  out << "," << slack;
  return out.str();
}

}  // namespace rapsa
