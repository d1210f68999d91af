#include "curvature_memory.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace rapsa {

namespace {
constexpr double kCurvatureFloor = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
}  // namespace

CurvatureMemory::CurvatureMemory(std::size_t capacity, std::size_t dimension)
    : capacity_(capacity), dimension_(dimension) {
  if (capacity_ == 0) {
    throw invalid_argument_error("curvature memory: capacity tau must be positive");
  }
  if (dimension_ == 0) {
    throw invalid_argument_error("curvature memory: block dimension must be positive");
  }
  alpha_.resize(capacity_);
}

bool CurvatureMemory::admit_pair(std::span<const double> v, std::span<const double> r) {
  if (v.size() != dimension_ || r.size() != dimension_) {
    throw invalid_argument_error("curvature memory: pair length " + std::to_string(v.size()) +
                                 "/" + std::to_string(r.size()) + " does not match block size " +
                                 std::to_string(dimension_));
  }
  const double vr = dot(v, r);
  const double norm_v = std::sqrt(dot(v, v));
  const double norm_r = std::sqrt(dot(r, r));
  // Curvature floor: keeps rho = 1/(v.r) finite and the approximation
  // positive definite. Near-orthogonal or wrong-signed pairs are dropped.
  if (!(vr > kCurvatureFloor * norm_v * norm_r)) {
    return false;
  }
  if (pairs_.size() == capacity_) {
    pairs_.pop_front();
  }
  CurvaturePair pair;
  pair.v.assign(v.begin(), v.end());
  pair.r.assign(r.begin(), r.end());
  pair.rho = 1.0 / vr;
  pairs_.push_back(std::move(pair));
  eta_ = vr / (norm_r * norm_r);
  return true;
}

void CurvatureMemory::two_loop_step(std::span<const double> g, std::span<double> out) const {
  if (g.size() != dimension_ || out.size() != dimension_) {
    throw invalid_argument_error("curvature memory: gradient length does not match block size");
  }
  std::uint64_t ops = 0;
  const std::size_t k = pairs_.size();
  const std::size_t d = dimension_;

  for (std::size_t i = 0; i < d; ++i) out[i] = g[i];

  // First loop, newest pair to oldest: peel off projections.
  for (std::size_t idx = k; idx-- > 0;) {
    const CurvaturePair& pair = pairs_[idx];
    const double a = pair.rho * dot(pair.v, out);
    for (std::size_t i = 0; i < d; ++i) out[i] -= a * pair.r[i];
    alpha_[idx] = a;
    ops += 4 * d;
  }

  // Seed with the scalar initial approximation eta * I.
  for (std::size_t i = 0; i < d; ++i) out[i] *= eta_;
  ops += d;

  // Second loop, oldest pair to newest: reapply along the stored directions.
  for (std::size_t idx = 0; idx < k; ++idx) {
    const CurvaturePair& pair = pairs_[idx];
    const double b = pair.rho * dot(pair.r, out);
    for (std::size_t i = 0; i < d; ++i) out[i] += (alpha_[idx] - b) * pair.v[i];
    ops += 4 * d;
  }
  last_step_ops_ = ops;
}

}  // namespace rapsa
