#include "step_schedule.hpp"

#include <algorithm>
#include <string>

#include "errors.hpp"

namespace rapsa {

namespace {
void require_positive(double value, const char* name) {
  if (!(value > 0.0)) {
    throw invalid_argument_error(std::string("step schedule: ") + name +
                                 " must be positive, got " + std::to_string(value));
  }
}
}  // namespace

StepSchedule StepSchedule::constant(double gamma) {
  require_positive(gamma, "gamma");
  return StepSchedule(Kind::constant, gamma, 0.0);
}

StepSchedule StepSchedule::diminishing(double gamma0, double t0) {
  require_positive(gamma0, "gamma0");
  require_positive(t0, "T0");
  return StepSchedule(Kind::diminishing, gamma0, t0);
}

StepSchedule StepSchedule::hybrid(double epsilon, double anneal) {
  require_positive(epsilon, "epsilon");
  require_positive(anneal, "anneal");
  return StepSchedule(Kind::hybrid, epsilon, anneal);
}

double StepSchedule::at(std::int64_t t) const {
  if (t < 0) {
    throw invalid_argument_error("step schedule: negative iteration index " +
                                 std::to_string(t));
  }
  switch (kind_) {
    case Kind::constant:
      return a_;
    case Kind::diminishing:
      return a_ * b_ / (static_cast<double>(t) + b_);
    case Kind::hybrid:
      if (t == 0) return a_;
      return std::min(a_, a_ * b_ / static_cast<double>(t));
  }
  throw internal_error("step schedule: unknown kind");
}

}  // namespace rapsa
