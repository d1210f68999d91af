#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "async_simulator.hpp"
#include "bounds.hpp"
#include "problem.hpp"
#include "step_schedule.hpp"
#include "sync_engine.hpp"

namespace rapsa {

// Environment variable consulted when a config selects the image-file
// problem without giving an explicit directory.
inline constexpr const char* kMnistDirEnvVar = "RAPSA_MNIST_DIR";

enum class ProblemType { linear_synthetic, logistic_synthetic, logistic_mnist };
enum class EngineKind { sync, async_sim, async_threads };

// One declarative experiment: a problem, an algorithm, a sweep over block
// counts, and a seed list. Parsed from a versioned JSON file; every
// validation error names the offending field.
struct ExperimentConfig {
  std::string name = "experiment";

  ProblemType problem_type = ProblemType::linear_synthetic;
  std::size_t p = 0;
  std::size_t n = 0;
  double noise_variance = 0.0;
  std::uint64_t data_seed = 0;
  double separation = 4.0;      // logistic-synthetic
  double lambda = 0.0;          // logistic; <= 0 means 1/sqrt(train size)
  double train_fraction = 0.75; // logistic-synthetic
  std::string mnist_dir;        // logistic-mnist; empty -> environment variable
  int digit_neg = 0;
  int digit_pos = 8;

  Algorithm algorithm = Algorithm::rapsa;
  EngineKind engine = EngineKind::sync;
  std::vector<std::size_t> blocks;
  std::size_t processors = 1;
  std::size_t minibatch = 1;
  std::size_t memory = 10;
  StepSchedule schedule = StepSchedule::constant(1e-2);
  std::int64_t iterations = 0;
  std::int64_t record_every = 1;
  std::vector<std::uint64_t> seeds;
  DelayModel delay;
  int threads = 1;
  double x0_value = 0.0;
  double target_gap_fraction = 0.1;  // summary threshold, as a fraction of F(x0)-F*
  double bound_rho = 0.0;            // async bound parameter; <= 0 means 1/M
  std::filesystem::path output_dir = "runs/out";

  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  static ExperimentConfig from_json_text(const std::string& text,
                                         const std::string& origin = "<config>");
};

struct RunOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;  // replaces the whole seed list
  std::optional<int> threads;
};

// The problem instance a config describes, together with any held-out data.
struct BuiltProblem {
  std::unique_ptr<Problem> problem;
  std::vector<double> test_rows;
  std::vector<std::int8_t> test_labels;
};
BuiltProblem build_problem(const ExperimentConfig& config);

// Probe iterates along the segment from x0 to x_star, endpoints included.
std::vector<std::vector<double>> segment_probes(const std::vector<double>& x0,
                                                const std::vector<double>& x_star,
                                                std::size_t points = 5);

struct BlockSummary {
  std::size_t blocks = 0;
  double final_gap = 0.0;
  bool reached = false;            // seed-averaged gap hit the summary threshold
  std::int64_t t_reached = 0;
  double features_reached = 0.0;
  std::optional<double> accuracy;  // held-out, averaged over seeds (logistic)
};

struct ExperimentResult {
  std::filesystem::path out_dir;
  double f_star = 0.0;
  double f0_gap = 0.0;
  double gap_threshold = 0.0;
  std::vector<BlockSummary> summaries;
};

// Runs the full sweep, writing per-seed traces, per-B averaged traces, an
// incrementally updated manifest.json, summary.txt, bound_report.txt and
// metrics.csv into the output directory. An engine failure is recorded in
// the manifest (completed cells are kept) and then rethrown.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RunOverrides& overrides = {});

// The bound report for a config, computed without running any engine.
std::string bound_report_text(const ExperimentConfig& config);

// First-crossing comparison of two recorded traces.
struct CompareSide {
  bool reached = false;
  std::int64_t t = 0;          // first recorded t with gap <= eps
  double features = 0.0;       // features_processed at that row
  std::int64_t final_t = 0;    // last recorded t
  double final_gap = 0.0;      // gap at the last recorded row
};
struct CompareResult {
  double eps = 0.0;
  CompareSide a, b;
  std::string to_text() const;
};
CompareResult compare_runs(const std::filesystem::path& trace_a,
                           const std::filesystem::path& trace_b, double eps);

}  // namespace rapsa
