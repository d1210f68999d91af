#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace rapsa {

// One admitted displacement/gradient-difference pair.
struct CurvaturePair {
  std::vector<double> v;     // iterate displacement
  std::vector<double> r;     // gradient difference on the same minibatch
  double rho = 0.0;          // 1 / (v . r)
};

// Bounded history of curvature pairs for one block, plus the scalar eta that
// seeds the inverse-Hessian approximation. Applying the approximation to a
// gradient uses the standard two-loop recursion, which matches the dense
// recursive composition
//   B_{u+1} = Z_u^T B_u Z_u + rho_u v_u v_u^T,  B_0 = eta I,
//   Z_u = I - rho_u r_u v_u^T   (oldest pair first)
// without ever forming a matrix: cost is O(capacity * block_size) per call.
class CurvatureMemory {
 public:
  // capacity: max pairs retained (tau). dimension: block size.
  CurvatureMemory(std::size_t capacity, std::size_t dimension);

  // Screens a candidate pair against the curvature floor
  //   v . r > 1e-12 * ||v|| * ||r||
  // and, when accepted, stores it (evicting the oldest pair at capacity) and
  // refreshes eta = (v . r) / ||r||^2 from this most recent pair. Returns
  // whether the pair was admitted; a rejected pair leaves all state
  // untouched.
  bool admit_pair(std::span<const double> v, std::span<const double> r);

  // Computes (inverse-Hessian approximation) * g into `out`. With no pairs
  // stored this is eta * g with eta = 1, i.e. the identity.
  void two_loop_step(std::span<const double> g, std::span<double> out) const;

  std::size_t size() const noexcept { return pairs_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t dimension() const noexcept { return dimension_; }
  double eta() const noexcept { return eta_; }
  const CurvaturePair& pair(std::size_t i) const { return pairs_.at(i); }  // 0 = oldest

  // Scalar multiply/add tally of the most recent two_loop_step call, for
  // cost-scaling checks.
  std::uint64_t last_step_ops() const noexcept { return last_step_ops_; }

 private:
  std::size_t capacity_;
  std::size_t dimension_;
  std::deque<CurvaturePair> pairs_;  // front = oldest
  double eta_ = 1.0;
  mutable std::vector<double> alpha_;  // scratch for the first loop
  mutable std::uint64_t last_step_ops_ = 0;
};

}  // namespace rapsa
