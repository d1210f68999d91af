#pragma once

#include <cstdint>
#include <vector>

#include "problem.hpp"

namespace rapsa {

// L2-regularized binary logistic regression over dense features:
//   f(x, n) = (lambda/2) ||x||^2 + log(1 + exp(-y_n x . z_n)),  y_n in {-1,+1}.
// The log term is evaluated in the overflow-safe form
//   log(1 + exp(-u)) = max(0, -u) + log1p(exp(-|u|)).
class LogisticProblem : public Problem {
 public:
  // rows: N*p row-major feature matrix, labels: +1/-1 per sample.
  LogisticProblem(std::size_t num_samples, std::size_t dimension, std::vector<double> rows,
                  std::vector<std::int8_t> labels, double lambda);

  std::size_t dimension() const override { return p_; }
  std::size_t num_samples() const override { return n_; }

  double full_objective(std::span<const double> x) const override;
  void full_gradient(std::span<const double> x, std::span<double> out) const override;
  void block_minibatch_gradient(std::span<const double> x, const BlockRange& range,
                                std::span<const std::uint32_t> batch,
                                std::span<double> out) const override;
  void sample_gradient(std::span<const double> x, std::uint32_t n,
                       std::span<double> out) const override;

  // Full-gradient quasi-Newton descent with backtracking, run until the
  // gradient norm drops below 1e-10 or the objective stops improving at
  // machine resolution (the best iterate is then accepted if its gradient
  // has shrunk by at least 1e-8 relative to the start). Requires lambda > 0
  // (the objective may have no finite minimizer otherwise); throws
  // Error(precondition) if not.
  OptimumResult exact_optimum() const override;

  // m = lambda exactly; M = lambda + max_n ||z_n||^2 / 4 (a certified
  // Lipschitz bound from the 1/4 cap on the sigmoid slope); K as the exact
  // dataset second moment at the probe iterates (default: origin-to-optimum
  // segment).
  ProblemConstants constants(
      std::span<const std::vector<double>> probes = {}) const override;

  double lambda() const noexcept { return lambda_; }
  const std::vector<double>& rows() const noexcept { return rows_; }
  const std::vector<std::int8_t>& labels() const noexcept { return labels_; }

 private:
  double margin(std::span<const double> x, std::size_t n) const;  // y_n * (x . z_n)

  std::size_t n_;
  std::size_t p_;
  std::vector<double> rows_;
  std::vector<std::int8_t> labels_;
  double lambda_;
};

// Fraction of samples with sign(x . z_n) matching the +1/-1 label. A zero
// score counts as a miss.
double classification_accuracy(std::span<const double> x, const std::vector<double>& rows,
                               std::size_t dimension, const std::vector<std::int8_t>& labels);

}  // namespace rapsa
