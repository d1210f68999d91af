#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "least_squares.hpp"
#include "logistic.hpp"

namespace rapsa {

// Seeded linear-regression instance. The N x p observation matrix is drawn
// entrywise as tridiagonal_mean(n, j) + standard normal, where the mean
// pattern puts 2 on the diagonal and -1/2 on the first off-diagonals (zero
// elsewhere, including rows beyond the p-th). The ground truth has entries
// sampled uniformly from {1/p, 2/p, ..., 1}, and targets are
// z_n = h_n . x_true + normal(0, noise_variance).
struct LinearProblemSpec {
  std::size_t p = 0;
  std::size_t n = 0;
  double noise_variance = 0.0;
  std::uint64_t seed = 0;
};

struct LinearSynthesis {
  std::unique_ptr<LeastSquaresProblem> problem;
  std::vector<double> x_true;
};

double tridiagonal_mean_entry(std::size_t row, std::size_t col);

LinearSynthesis generate_linear_problem(const LinearProblemSpec& spec);

// Seeded two-component Gaussian classification instance: labels are fair
// coin flips and features are drawn as label * (separation/2) * u + standard
// normal noise, with u a fixed random unit direction. The first
// train_fraction of samples (in draw order; samples are i.i.d.) become the
// regularized training problem, the rest are held out.
struct LogisticProblemSpec {
  std::size_t p = 0;
  std::size_t n = 0;
  double separation = 4.0;    // distance between the two class means
  double lambda = 0.0;        // <= 0 means "use 1/sqrt(train size)"
  double train_fraction = 0.75;
  std::uint64_t seed = 0;
};

struct LogisticSynthesis {
  std::unique_ptr<LogisticProblem> train;
  std::vector<double> test_rows;  // row-major, test_labels.size() x p
  std::vector<std::int8_t> test_labels;
};

LogisticSynthesis generate_logistic_problem(const LogisticProblemSpec& spec);

}  // namespace rapsa
