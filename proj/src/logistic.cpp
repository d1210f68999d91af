#include "logistic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "curvature_memory.hpp"
#include "errors.hpp"

namespace rapsa {

namespace {
// log(1 + exp(-u)) without overflow for large |u|.
double log1p_exp_neg(double u) {
  return std::max(0.0, -u) + std::log1p(std::exp(-std::abs(u)));
}

// sigma(-u) = 1 / (1 + exp(u)), the magnitude of d/du log(1+exp(-u)).
double sigmoid_neg(double u) {
  if (u >= 0.0) {
    const double e = std::exp(-u);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(u));
}
}  // namespace

LogisticProblem::LogisticProblem(std::size_t num_samples, std::size_t dimension,
                                 std::vector<double> rows, std::vector<std::int8_t> labels,
                                 double lambda)
    : n_(num_samples), p_(dimension), rows_(std::move(rows)), labels_(std::move(labels)),
      lambda_(lambda) {
  if (n_ == 0 || p_ == 0) {
    throw invalid_argument_error("logistic: N and p must be positive");
  }
  if (rows_.size() != n_ * p_) {
    throw invalid_argument_error("logistic: feature matrix has " + std::to_string(rows_.size()) +
                                 " entries, expected N*p=" + std::to_string(n_ * p_));
  }
  if (labels_.size() != n_) {
    throw invalid_argument_error("logistic: label vector has " + std::to_string(labels_.size()) +
                                 " entries, expected N=" + std::to_string(n_));
  }
  for (std::size_t n = 0; n < n_; ++n) {
    if (labels_[n] != 1 && labels_[n] != -1) {
      throw invalid_argument_error("logistic: label at sample " + std::to_string(n) +
                                   " must be +1 or -1");
    }
  }
  if (lambda_ < 0.0) {
    throw invalid_argument_error("logistic: lambda must be non-negative");
  }
}

double LogisticProblem::margin(std::span<const double> x, std::size_t n) const {
  const double* row = rows_.data() + n * p_;
  double dot = 0.0;
  for (std::size_t j = 0; j < p_; ++j) dot += row[j] * x[j];
  return static_cast<double>(labels_[n]) * dot;
}

double LogisticProblem::full_objective(std::span<const double> x) const {
  double loss = 0.0;
  for (std::size_t n = 0; n < n_; ++n) loss += log1p_exp_neg(margin(x, n));
  loss /= static_cast<double>(n_);
  double ridge = 0.0;
  for (double xi : x) ridge += xi * xi;
  return loss + 0.5 * lambda_ * ridge;
}

void LogisticProblem::full_gradient(std::span<const double> x, std::span<double> out) const {
  for (std::size_t j = 0; j < p_; ++j) out[j] = lambda_ * x[j];
  const double inv_n = 1.0 / static_cast<double>(n_);
  for (std::size_t n = 0; n < n_; ++n) {
    const double coeff =
        -static_cast<double>(labels_[n]) * sigmoid_neg(margin(x, n)) * inv_n;
    const double* row = rows_.data() + n * p_;
    for (std::size_t j = 0; j < p_; ++j) out[j] += coeff * row[j];
  }
}

void LogisticProblem::block_minibatch_gradient(std::span<const double> x,
                                               const BlockRange& range,
                                               std::span<const std::uint32_t> batch,
                                               std::span<double> out) const {
  for (std::size_t j = 0; j < range.length; ++j) {
    out[j] = lambda_ * x[range.offset + j];
  }
  const double inv_l = 1.0 / static_cast<double>(batch.size());
  for (const std::uint32_t n : batch) {
    const double coeff =
        -static_cast<double>(labels_[n]) * sigmoid_neg(margin(x, n)) * inv_l;
    const double* row = rows_.data() + n * p_ + range.offset;
    for (std::size_t j = 0; j < range.length; ++j) out[j] += coeff * row[j];
  }
}

void LogisticProblem::sample_gradient(std::span<const double> x, std::uint32_t n,
                                      std::span<double> out) const {
  const double coeff = -static_cast<double>(labels_[n]) * sigmoid_neg(margin(x, n));
  const double* row = rows_.data() + n * p_;
  for (std::size_t j = 0; j < p_; ++j) out[j] = lambda_ * x[j] + coeff * row[j];
}

OptimumResult LogisticProblem::exact_optimum() const {
  if (!(lambda_ > 0.0)) {
    throw precondition_error(
        "logistic exact_optimum: requires lambda > 0 (strong convexity)");
  }
  constexpr double kGradTol = 1e-10;
  constexpr int kMaxIters = 20000;

  std::vector<double> x(p_, 0.0), g(p_), g_new(p_), direction(p_), x_new(p_), v(p_), r(p_);
  CurvatureMemory memory(20, p_);
  full_gradient(x, g);
  double f = full_objective(x);

  auto norm = [](const std::vector<double>& a) {
    double s = 0.0;
    for (double ai : a) s += ai * ai;
    return std::sqrt(s);
  };

  // Near the minimizer the attainable decrease falls under the rounding
  // granularity of the objective before the gradient reaches kGradTol, so
  // the run keeps the best iterate seen and accepts it once line searches
  // stop paying off, as long as the gradient has dropped by a wide margin.
  const double accept_tol = std::max(kGradTol, 1e-8 * std::max(1.0, norm(g)));
  std::vector<double> best_x = x;
  double best_norm = norm(g);
  double best_f = f;

  for (int iter = 0; iter < kMaxIters; ++iter) {
    if (norm(g) <= kGradTol) break;
    memory.two_loop_step(g, direction);
    double gd = 0.0;
    for (std::size_t j = 0; j < p_; ++j) gd += g[j] * direction[j];
    if (gd <= 0.0) {
      // Curvature memory produced a non-descent direction; restart from the
      // raw gradient.
      direction = g;
      gd = 0.0;
      for (double gj : g) gd += gj * gj;
    }
    // Backtracking with the usual sufficient-decrease test.
    double step = 1.0;
    double f_new = f;
    bool decreased = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (std::size_t j = 0; j < p_; ++j) x_new[j] = x[j] - step * direction[j];
      f_new = full_objective(x_new);
      if (f_new <= f - 1e-4 * step * gd) {
        decreased = f_new < f;
        break;
      }
      step *= 0.5;
    }
    if (!decreased && f_new >= f) break;  // objective at machine resolution
    full_gradient(x_new, g_new);
    for (std::size_t j = 0; j < p_; ++j) {
      v[j] = x_new[j] - x[j];
      r[j] = g_new[j] - g[j];
    }
    memory.admit_pair(v, r);
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    const double g_norm = norm(g);
    if (g_norm < best_norm) {
      best_norm = g_norm;
      best_x = x;
      best_f = f;
    }
  }
  if (best_norm > accept_tol) {
    std::ostringstream msg;
    msg << "logistic exact_optimum: solver stalled at gradient norm "
        << std::scientific << best_norm << " (accept threshold " << accept_tol << ")";
    throw internal_error(msg.str());
  }
  OptimumResult result;
  result.x = std::move(best_x);
  result.objective = best_f;
  return result;
}

ProblemConstants LogisticProblem::constants(
    std::span<const std::vector<double>> probes) const {
  ProblemConstants c;
  c.strong_convexity = lambda_;
  double max_row_sq = 0.0;
  for (std::size_t n = 0; n < n_; ++n) {
    double s = 0.0;
    const double* row = rows_.data() + n * p_;
    for (std::size_t j = 0; j < p_; ++j) s += row[j] * row[j];
    max_row_sq = std::max(max_row_sq, s);
  }
  c.lipschitz = lambda_ + 0.25 * max_row_sq;

  // Exact dataset average of ||lambda x - y_n sigma(-y_n u_n) z_n||^2.
  auto second_moment = [&](std::span<const double> x) {
    double lambda_x_sq = 0.0;
    for (double xi : x) lambda_x_sq += xi * xi;
    lambda_x_sq *= lambda_ * lambda_;
    double sum = 0.0;
    for (std::size_t n = 0; n < n_; ++n) {
      const double* row = rows_.data() + n * p_;
      double u = 0.0, row_sq = 0.0;
      for (std::size_t j = 0; j < p_; ++j) {
        u += row[j] * x[j];
        row_sq += row[j] * row[j];
      }
      const double y = static_cast<double>(labels_[n]);
      const double s = sigmoid_neg(y * u);
      // ||lambda x||^2 - 2 lambda s y (x . z_n) + s^2 ||z_n||^2
      sum += lambda_x_sq - 2.0 * lambda_ * s * y * u + s * s * row_sq;
    }
    return sum / static_cast<double>(n_);
  };

  double best = 0.0;
  if (probes.empty()) {
    std::vector<double> x0(p_, 0.0);
    best = second_moment(x0);
    if (lambda_ > 0.0) {
      const OptimumResult opt = exact_optimum();
      best = std::max(best, second_moment(opt.x));
    }
  } else {
    for (const auto& x : probes) {
      if (x.size() != p_) {
        throw invalid_argument_error("logistic: probe iterate has wrong dimension");
      }
      best = std::max(best, second_moment(x));
    }
  }
  c.grad_second_moment = best;
  return c;
}

double classification_accuracy(std::span<const double> x, const std::vector<double>& rows,
                               std::size_t dimension, const std::vector<std::int8_t>& labels) {
  if (labels.empty() || rows.size() != labels.size() * dimension) {
    throw invalid_argument_error("accuracy: feature/label shapes do not match");
  }
  std::size_t hits = 0;
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const double* row = rows.data() + n * dimension;
    double score = 0.0;
    for (std::size_t j = 0; j < dimension; ++j) score += row[j] * x[j];
    const int predicted = score > 0.0 ? 1 : -1;
    if (score != 0.0 && predicted == labels[n]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace rapsa
