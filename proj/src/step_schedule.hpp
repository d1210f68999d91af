#pragma once

#include <cstdint>

namespace rapsa {

// Step-size schedule gamma^t. Three shapes are supported:
//   constant     gamma^t = gamma
//   diminishing  gamma^t = gamma0 * T0 / (t + T0)
//   hybrid       gamma^t = min(epsilon, epsilon * anneal / t), with
//                gamma^0 = epsilon (the t=0 division is defined away).
// The hybrid shape holds the step at epsilon for t <= anneal and decays
// 1/t afterwards.
class StepSchedule {
 public:
  enum class Kind { constant, diminishing, hybrid };

  static StepSchedule constant(double gamma);
  static StepSchedule diminishing(double gamma0, double t0);
  static StepSchedule hybrid(double epsilon, double anneal);

  double at(std::int64_t t) const;

  Kind kind() const noexcept { return kind_; }
  // First and second shape parameters: (gamma, -), (gamma0, T0), or
  // (epsilon, anneal).
  double param_a() const noexcept { return a_; }
  double param_b() const noexcept { return b_; }

 private:
  StepSchedule(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

}  // namespace rapsa
