#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "block_partition.hpp"

namespace rapsa {

// Curvature and noise constants of a finite-sum objective:
//   strong_convexity   m: the average objective satisfies the usual
//                      m/2 * ||y - x||^2 lower-bound inequality,
//   lipschitz          M: gradient Lipschitz constant of the average,
//   grad_second_moment K: bound on E||grad of a single-sample objective||^2
//                      near the optimization trajectory (an estimate, not a
//                      certified bound).
struct ProblemConstants {
  double strong_convexity = 0.0;
  double lipschitz = 0.0;
  double grad_second_moment = 0.0;
};

struct OptimumResult {
  std::vector<double> x;
  double objective = 0.0;
  bool ridge_applied = false;  // least squares only: rank-deficiency fallback used
};

// Finite-sum objective F(x) = (1/N) sum_n f(x, n) presented to the engines
// through sample-restricted block gradients. Implementations must be
// thread-safe for concurrent const calls.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::size_t num_samples() const = 0;

  // Exact average objective F(x).
  virtual double full_objective(std::span<const double> x) const = 0;

  // Gradient of F(x) into `out` (length p).
  virtual void full_gradient(std::span<const double> x, std::span<double> out) const = 0;

  // Restriction to `range` of the gradient of the minibatch average
  // (1/|batch|) sum_{n in batch} f(x, n), written into `out`
  // (length range.length). The gradient is evaluated at the full iterate x;
  // cross-block coupling is not dropped.
  virtual void block_minibatch_gradient(std::span<const double> x, const BlockRange& range,
                                        std::span<const std::uint32_t> batch,
                                        std::span<double> out) const = 0;

  // Gradient of the single-sample objective f(x, n) into `out` (length p).
  virtual void sample_gradient(std::span<const double> x, std::uint32_t n,
                               std::span<double> out) const = 0;

  // High-accuracy minimizer of F, used for objective-gap traces.
  virtual OptimumResult exact_optimum() const = 0;

  // (m, M, K) with the gradient second moment probed at the given iterates.
  // With no probes, implementations default to the segment from the origin
  // to the optimum.
  virtual ProblemConstants constants(
      std::span<const std::vector<double>> probes = {}) const = 0;
};

}  // namespace rapsa
