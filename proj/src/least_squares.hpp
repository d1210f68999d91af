#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "problem.hpp"

namespace rapsa {

// Linear regression objective F(x) = (1/N) sum_n (h_n . x - z_n)^2 over a
// dense row-major observation matrix. Single-sample gradients are
// 2 (h_n . x - z_n) h_n, so the average Hessian is (2/N) H^T H and the exact
// minimizer solves the normal equations.
class LeastSquaresProblem : public Problem {
 public:
  // rows: N*p row-major observation matrix, targets: length N.
  LeastSquaresProblem(std::size_t num_samples, std::size_t dimension,
                      std::vector<double> rows, std::vector<double> targets);

  std::size_t dimension() const override { return p_; }
  std::size_t num_samples() const override { return n_; }

  double full_objective(std::span<const double> x) const override;
  void full_gradient(std::span<const double> x, std::span<double> out) const override;
  void block_minibatch_gradient(std::span<const double> x, const BlockRange& range,
                                std::span<const std::uint32_t> batch,
                                std::span<double> out) const override;
  void sample_gradient(std::span<const double> x, std::uint32_t n,
                       std::span<double> out) const override;

  // Solves H^T H x = H^T z by Cholesky. A rank-deficient system falls back to
  // a 1e-10 ridge on the diagonal (flagged in the result); if even the ridged
  // system fails to factor, throws Error(singular).
  OptimumResult exact_optimum() const override;

  // m and M are the extreme eigenvalues of (2/N) H^T H (computed once and
  // cached). K is the maximum over probe iterates of the exact dataset
  // average of ||2 (h_n . x - z_n) h_n||^2; with no probes, the segment from
  // the origin to the optimum is sampled.
  ProblemConstants constants(
      std::span<const std::vector<double>> probes = {}) const override;

  const std::vector<double>& rows() const noexcept { return rows_; }
  const std::vector<double>& targets() const noexcept { return targets_; }

 private:
  double residual(std::span<const double> x, std::size_t n) const;
  void eigen_bounds(double& m_out, double& big_m_out) const;

  std::size_t n_;
  std::size_t p_;
  std::vector<double> rows_;      // N x p, row-major
  std::vector<double> targets_;   // N
  std::vector<double> row_norms_sq_;  // ||h_n||^2, precomputed

  mutable std::optional<std::pair<double, double>> cached_eigen_bounds_;
  mutable std::optional<OptimumResult> cached_optimum_;
};

}  // namespace rapsa
