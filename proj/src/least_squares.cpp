#include "least_squares.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace rapsa {

namespace {
using ConstMatrixMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;
}  // namespace

LeastSquaresProblem::LeastSquaresProblem(std::size_t num_samples, std::size_t dimension,
                                         std::vector<double> rows,
                                         std::vector<double> targets)
    : n_(num_samples), p_(dimension), rows_(std::move(rows)), targets_(std::move(targets)) {
  if (n_ == 0 || p_ == 0) {
    throw invalid_argument_error("least squares: N and p must be positive");
  }
  if (rows_.size() != n_ * p_) {
    throw invalid_argument_error("least squares: observation matrix has " +
                                 std::to_string(rows_.size()) + " entries, expected N*p=" +
                                 std::to_string(n_ * p_));
  }
  if (targets_.size() != n_) {
    throw invalid_argument_error("least squares: target vector has " +
                                 std::to_string(targets_.size()) + " entries, expected N=" +
                                 std::to_string(n_));
  }
  row_norms_sq_.resize(n_);
  for (std::size_t n = 0; n < n_; ++n) {
    double s = 0.0;
    const double* row = rows_.data() + n * p_;
    for (std::size_t j = 0; j < p_; ++j) s += row[j] * row[j];
    row_norms_sq_[n] = s;
  }
}

double LeastSquaresProblem::residual(std::span<const double> x, std::size_t n) const {
  const double* row = rows_.data() + n * p_;
  double dot = 0.0;
  for (std::size_t j = 0; j < p_; ++j) dot += row[j] * x[j];
  return dot - targets_[n];
}

double LeastSquaresProblem::full_objective(std::span<const double> x) const {
  double sum = 0.0;
  for (std::size_t n = 0; n < n_; ++n) {
    const double r = residual(x, n);
    sum += r * r;
  }
  return sum / static_cast<double>(n_);
}

void LeastSquaresProblem::full_gradient(std::span<const double> x,
                                        std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t n = 0; n < n_; ++n) {
    const double scale = 2.0 * residual(x, n) / static_cast<double>(n_);
    const double* row = rows_.data() + n * p_;
    for (std::size_t j = 0; j < p_; ++j) out[j] += scale * row[j];
  }
}

void LeastSquaresProblem::block_minibatch_gradient(std::span<const double> x,
                                                   const BlockRange& range,
                                                   std::span<const std::uint32_t> batch,
                                                   std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const double inv_l = 1.0 / static_cast<double>(batch.size());
  for (const std::uint32_t n : batch) {
    // Residual uses the full iterate; only the output is block-restricted.
    const double scale = 2.0 * residual(x, n) * inv_l;
    const double* row = rows_.data() + n * p_ + range.offset;
    for (std::size_t j = 0; j < range.length; ++j) out[j] += scale * row[j];
  }
}

void LeastSquaresProblem::sample_gradient(std::span<const double> x, std::uint32_t n,
                                          std::span<double> out) const {
  const double scale = 2.0 * residual(x, n);
  const double* row = rows_.data() + n * p_;
  for (std::size_t j = 0; j < p_; ++j) out[j] = scale * row[j];
}

OptimumResult LeastSquaresProblem::exact_optimum() const {
  if (cached_optimum_) return *cached_optimum_;

  ConstMatrixMap h(rows_.data(), static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(p_));
  ConstVectorMap z(targets_.data(), static_cast<Eigen::Index>(n_));
  const Eigen::MatrixXd gram = h.transpose() * h;
  const Eigen::VectorXd rhs = h.transpose() * z;

  OptimumResult result;
  Eigen::LLT<Eigen::MatrixXd> chol(gram);
  if (chol.info() != Eigen::Success) {
    Eigen::MatrixXd ridged = gram;
    ridged.diagonal().array() += 1e-10;
    chol.compute(ridged);
    if (chol.info() != Eigen::Success) {
      throw singular_error(
          "least squares: normal equations are rank-deficient and the 1e-10 "
          "ridge fallback also failed to factor");
    }
    result.ridge_applied = true;
  }
  const Eigen::VectorXd solution = chol.solve(rhs);
  result.x.assign(solution.data(), solution.data() + p_);
  result.objective = full_objective(result.x);
  cached_optimum_ = result;
  return result;
}

void LeastSquaresProblem::eigen_bounds(double& m_out, double& big_m_out) const {
  if (!cached_eigen_bounds_) {
    ConstMatrixMap h(rows_.data(), static_cast<Eigen::Index>(n_),
                     static_cast<Eigen::Index>(p_));
    Eigen::MatrixXd hessian = (2.0 / static_cast<double>(n_)) * (h.transpose() * h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hessian, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw internal_error("least squares: eigenvalue computation failed");
    }
    cached_eigen_bounds_ = {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
  }
  m_out = cached_eigen_bounds_->first;
  big_m_out = cached_eigen_bounds_->second;
}

ProblemConstants LeastSquaresProblem::constants(
    std::span<const std::vector<double>> probes) const {
  ProblemConstants c;
  eigen_bounds(c.strong_convexity, c.lipschitz);

  // Exact second moment of the single-sample gradient at iterate x:
  //   (1/N) sum_n 4 (h_n . x - z_n)^2 ||h_n||^2.
  auto second_moment = [&](std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t n = 0; n < n_; ++n) {
      const double r = residual(x, n);
      sum += 4.0 * r * r * row_norms_sq_[n];
    }
    return sum / static_cast<double>(n_);
  };

  double best = 0.0;
  if (probes.empty()) {
    // Default probe set: the segment from the origin to the optimum.
    const OptimumResult opt = exact_optimum();
    std::vector<double> x(p_);
    for (int step = 0; step <= 4; ++step) {
      const double alpha = static_cast<double>(step) / 4.0;
      for (std::size_t j = 0; j < p_; ++j) x[j] = alpha * opt.x[j];
      best = std::max(best, second_moment(x));
    }
  } else {
    for (const auto& x : probes) {
      if (x.size() != p_) {
        throw invalid_argument_error("least squares: probe iterate has wrong dimension");
      }
      best = std::max(best, second_moment(x));
    }
  }
  c.grad_second_moment = best;
  return c;
}

}  // namespace rapsa
