#include "synthetic_data.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace rapsa {

double tridiagonal_mean_entry(std::size_t row, std::size_t col) {
  if (row == col) return 2.0;
  const std::size_t diff = row > col ? row - col : col - row;
  if (diff == 1) return -0.5;
  return 0.0;
}

LinearSynthesis generate_linear_problem(const LinearProblemSpec& spec) {
  if (spec.p == 0 || spec.n == 0) {
    throw invalid_argument_error("linear synthesis: p and N must be positive");
  }
  if (spec.noise_variance < 0.0) {
    throw invalid_argument_error("linear synthesis: noise variance must be non-negative");
  }
  const SplitMix64 root(spec.seed);
  SplitMix64 matrix_rng = root.derive(stream_tag::data_matrix);
  SplitMix64 truth_rng = root.derive(stream_tag::data_truth);
  SplitMix64 noise_rng = root.derive(stream_tag::data_noise);

  std::vector<double> rows(spec.n * spec.p);
  for (std::size_t n = 0; n < spec.n; ++n) {
    for (std::size_t j = 0; j < spec.p; ++j) {
      rows[n * spec.p + j] = tridiagonal_mean_entry(n, j) + matrix_rng.next_normal();
    }
  }

  std::vector<double> x_true(spec.p);
  for (std::size_t j = 0; j < spec.p; ++j) {
    const std::uint64_t k = 1 + truth_rng.next_below(spec.p);
    x_true[j] = static_cast<double>(k) / static_cast<double>(spec.p);
  }

  const double noise_std = std::sqrt(spec.noise_variance);
  std::vector<double> targets(spec.n);
  for (std::size_t n = 0; n < spec.n; ++n) {
    double dot = 0.0;
    const double* row = rows.data() + n * spec.p;
    for (std::size_t j = 0; j < spec.p; ++j) dot += row[j] * x_true[j];
    targets[n] = dot + noise_std * noise_rng.next_normal();
  }

  LinearSynthesis out;
  out.problem = std::make_unique<LeastSquaresProblem>(spec.n, spec.p, std::move(rows),
                                                      std::move(targets));
  out.x_true = std::move(x_true);
  return out;
}

LogisticSynthesis generate_logistic_problem(const LogisticProblemSpec& spec) {
  if (spec.p == 0 || spec.n == 0) {
    throw invalid_argument_error("logistic synthesis: p and N must be positive");
  }
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw invalid_argument_error("logistic synthesis: train_fraction must lie in (0, 1)");
  }
  if (!(spec.separation > 0.0)) {
    throw invalid_argument_error("logistic synthesis: separation must be positive");
  }
  const SplitMix64 root(spec.seed);
  SplitMix64 direction_rng = root.derive(stream_tag::data_truth);
  SplitMix64 label_rng = root.derive(stream_tag::data_labels);
  SplitMix64 feature_rng = root.derive(stream_tag::data_matrix);

  // Fixed random unit direction separating the two class means.
  std::vector<double> direction(spec.p);
  double norm = 0.0;
  for (double& d : direction) {
    d = direction_rng.next_normal();
    norm += d * d;
  }
  norm = std::sqrt(norm);
  for (double& d : direction) d /= norm;

  const double shift = spec.separation / 2.0;
  std::vector<double> rows(spec.n * spec.p);
  std::vector<std::int8_t> labels(spec.n);
  for (std::size_t n = 0; n < spec.n; ++n) {
    const std::int8_t y = label_rng.next_below(2) == 0 ? -1 : 1;
    labels[n] = y;
    double* row = rows.data() + n * spec.p;
    for (std::size_t j = 0; j < spec.p; ++j) {
      row[j] = static_cast<double>(y) * shift * direction[j] + feature_rng.next_normal();
    }
  }

  const std::size_t n_train =
      static_cast<std::size_t>(spec.train_fraction * static_cast<double>(spec.n));
  if (n_train == 0 || n_train == spec.n) {
    throw invalid_argument_error("logistic synthesis: split leaves an empty train or test set");
  }
  const double lambda =
      spec.lambda > 0.0 ? spec.lambda : 1.0 / std::sqrt(static_cast<double>(n_train));

  std::vector<double> train_rows(rows.begin(), rows.begin() + n_train * spec.p);
  std::vector<std::int8_t> train_labels(labels.begin(), labels.begin() + n_train);

  LogisticSynthesis out;
  out.train = std::make_unique<LogisticProblem>(n_train, spec.p, std::move(train_rows),
                                                std::move(train_labels), lambda);
  out.test_rows.assign(rows.begin() + n_train * spec.p, rows.end());
  out.test_labels.assign(labels.begin() + n_train, labels.end());
  return out;
}

}  // namespace rapsa
