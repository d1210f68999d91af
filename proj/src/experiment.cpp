#include "experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "async_threads.hpp"
#include "errors.hpp"
#include "idx_io.hpp"
#include "logistic.hpp"
#include "rate_fit.hpp"
#include "synthetic_data.hpp"
#include "trace_csv.hpp"

namespace rapsa {

namespace {
using nlohmann::json;

[[noreturn]] void config_fail(const std::string& origin, const std::string& message) {
  throw config_error("config " + origin + ": " + message);
}

const json& require_key(const json& obj, const char* key, const std::string& origin) {
  if (!obj.contains(key)) {
    config_fail(origin, std::string("missing required field '") + key + "'");
  }
  return obj.at(key);
}

double require_number(const json& obj, const char* key, const std::string& origin) {
  const json& value = require_key(obj, key, origin);
  if (!value.is_number()) {
    config_fail(origin, std::string("field '") + key + "' must be a number");
  }
  return value.get<double>();
}

std::int64_t require_integer(const json& obj, const char* key, const std::string& origin) {
  const json& value = require_key(obj, key, origin);
  if (!value.is_number_integer()) {
    config_fail(origin, std::string("field '") + key + "' must be an integer");
  }
  return value.get<std::int64_t>();
}

std::string require_string(const json& obj, const char* key, const std::string& origin) {
  const json& value = require_key(obj, key, origin);
  if (!value.is_string()) {
    config_fail(origin, std::string("field '") + key + "' must be a string");
  }
  return value.get<std::string>();
}

StepSchedule parse_schedule(const json& obj, const std::string& origin) {
  const std::string type = require_string(obj, "type", origin);
  if (type == "constant") {
    return StepSchedule::constant(require_number(obj, "gamma", origin));
  }
  if (type == "diminishing") {
    return StepSchedule::diminishing(require_number(obj, "gamma0", origin),
                                     require_number(obj, "t0", origin));
  }
  if (type == "hybrid") {
    return StepSchedule::hybrid(require_number(obj, "epsilon", origin),
                                require_number(obj, "anneal", origin));
  }
  config_fail(origin, "schedule.type '" + type +
                          "' unknown (expected constant, diminishing or hybrid)");
}
}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw io_error("config: cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str(), path.string());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error("config " + origin + ": " + e.what());
  }
  if (!root.is_object()) {
    config_fail(origin, "top level must be an object");
  }
  const std::int64_t version = require_integer(root, "config_version", origin);
  if (version != 1) {
    config_fail(origin, "config_version " + std::to_string(version) +
                            " not supported (this build reads version 1)");
  }

  ExperimentConfig cfg;
  if (root.contains("name")) cfg.name = require_string(root, "name", origin);

  const json& problem = require_key(root, "problem", origin);
  const std::string type = require_string(problem, "type", origin);
  if (type == "linear-synthetic") {
    cfg.problem_type = ProblemType::linear_synthetic;
    cfg.p = static_cast<std::size_t>(require_integer(problem, "p", origin));
    cfg.n = static_cast<std::size_t>(require_integer(problem, "n", origin));
    cfg.noise_variance = require_number(problem, "noise_variance", origin);
    cfg.data_seed = static_cast<std::uint64_t>(require_integer(problem, "data_seed", origin));
  } else if (type == "logistic-synthetic") {
    cfg.problem_type = ProblemType::logistic_synthetic;
    cfg.p = static_cast<std::size_t>(require_integer(problem, "p", origin));
    cfg.n = static_cast<std::size_t>(require_integer(problem, "n", origin));
    cfg.data_seed = static_cast<std::uint64_t>(require_integer(problem, "data_seed", origin));
    if (problem.contains("separation")) {
      cfg.separation = require_number(problem, "separation", origin);
    }
    if (problem.contains("lambda")) cfg.lambda = require_number(problem, "lambda", origin);
    if (problem.contains("train_fraction")) {
      cfg.train_fraction = require_number(problem, "train_fraction", origin);
    }
  } else if (type == "logistic-mnist") {
    cfg.problem_type = ProblemType::logistic_mnist;
    if (problem.contains("dir")) cfg.mnist_dir = require_string(problem, "dir", origin);
    if (problem.contains("digit_neg")) {
      cfg.digit_neg = static_cast<int>(require_integer(problem, "digit_neg", origin));
    }
    if (problem.contains("digit_pos")) {
      cfg.digit_pos = static_cast<int>(require_integer(problem, "digit_pos", origin));
    }
    if (problem.contains("lambda")) cfg.lambda = require_number(problem, "lambda", origin);
  } else {
    config_fail(origin, "problem.type '" + type + "' unknown");
  }

  const std::string algorithm = require_string(root, "algorithm", origin);
  bool async = false;
  if (algorithm == "rapsa") {
    cfg.algorithm = Algorithm::rapsa;
  } else if (algorithm == "arapsa") {
    cfg.algorithm = Algorithm::arapsa;
  } else if (algorithm == "async-rapsa") {
    cfg.algorithm = Algorithm::rapsa;
    async = true;
  } else if (algorithm == "async-arapsa") {
    cfg.algorithm = Algorithm::arapsa;
    async = true;
  } else {
    config_fail(origin, "algorithm '" + algorithm + "' unknown");
  }
  cfg.engine = async ? EngineKind::async_sim : EngineKind::sync;
  if (root.contains("async_engine")) {
    const std::string kind = require_string(root, "async_engine", origin);
    if (!async) {
      config_fail(origin, "async_engine: only valid with async-rapsa / async-arapsa");
    }
    if (kind == "simulate") {
      cfg.engine = EngineKind::async_sim;
    } else if (kind == "threads") {
      cfg.engine = EngineKind::async_threads;
    } else {
      config_fail(origin, "async_engine '" + kind + "' unknown (simulate or threads)");
    }
  }

  const json& blocks = require_key(root, "blocks", origin);
  if (!blocks.is_array() || blocks.empty()) {
    config_fail(origin, "blocks must be a non-empty array of block counts");
  }
  for (const json& b : blocks) {
    if (!b.is_number_integer() || b.get<std::int64_t>() < 1) {
      config_fail(origin, "blocks entries must be integers >= 1");
    }
    cfg.blocks.push_back(static_cast<std::size_t>(b.get<std::int64_t>()));
  }

  cfg.processors = static_cast<std::size_t>(require_integer(root, "processors", origin));
  cfg.minibatch = static_cast<std::size_t>(require_integer(root, "minibatch", origin));
  if (cfg.processors < 1) config_fail(origin, "processors must be >= 1");
  if (cfg.minibatch < 1) config_fail(origin, "minibatch must be >= 1");

  if (root.contains("memory")) {
    if (cfg.algorithm != Algorithm::arapsa) {
      config_fail(origin,
                  "memory: curvature history only applies to arapsa / async-arapsa");
    }
    const std::int64_t memory = require_integer(root, "memory", origin);
    if (memory < 1) config_fail(origin, "memory must be >= 1");
    cfg.memory = static_cast<std::size_t>(memory);
  }

  cfg.schedule = parse_schedule(require_key(root, "schedule", origin), origin);
  cfg.iterations = require_integer(root, "iterations", origin);
  if (cfg.iterations < 0) config_fail(origin, "iterations must be >= 0");
  if (root.contains("record_every")) {
    cfg.record_every = require_integer(root, "record_every", origin);
    if (cfg.record_every < 1) config_fail(origin, "record_every must be >= 1");
  }

  const json& seeds = require_key(root, "seeds", origin);
  if (!seeds.is_array() || seeds.empty()) {
    config_fail(origin, "seeds must be a non-empty array");
  }
  for (const json& s : seeds) {
    if (!s.is_number_integer()) config_fail(origin, "seeds entries must be integers");
    cfg.seeds.push_back(static_cast<std::uint64_t>(s.get<std::int64_t>()));
  }

  if (async) {
    if (!root.contains("delay")) {
      config_fail(origin, "delay: required for async-rapsa / async-arapsa");
    }
    const json& delay = root.at("delay");
    cfg.delay.mean = require_number(delay, "mean", origin);
    cfg.delay.stddev = require_number(delay, "stddev", origin);
    cfg.delay.delta_max = require_integer(delay, "max", origin);
    try {
      cfg.delay.validate();
    } catch (const Error& e) {
      config_fail(origin, std::string("delay: ") + e.what());
    }
  } else if (root.contains("delay")) {
    config_fail(origin, "delay: only valid with async-rapsa / async-arapsa");
  }

  if (root.contains("threads")) {
    cfg.threads = static_cast<int>(require_integer(root, "threads", origin));
    if (cfg.threads < 1) config_fail(origin, "threads must be >= 1");
  }
  if (root.contains("x0")) {
    const json& x0 = root.at("x0");
    const std::string kind = require_string(x0, "type", origin);
    if (kind == "zeros") {
      cfg.x0_value = 0.0;
    } else if (kind == "constant") {
      cfg.x0_value = require_number(x0, "value", origin);
    } else {
      config_fail(origin, "x0.type '" + kind + "' unknown (zeros or constant)");
    }
  }
  if (root.contains("target_gap_fraction")) {
    cfg.target_gap_fraction = require_number(root, "target_gap_fraction", origin);
    if (!(cfg.target_gap_fraction > 0.0)) {
      config_fail(origin, "target_gap_fraction must be positive");
    }
  }
  if (root.contains("bound_rho")) {
    cfg.bound_rho = require_number(root, "bound_rho", origin);
  }
  cfg.output_dir = require_string(root, "output_dir", origin);
  return cfg;
}

BuiltProblem build_problem(const ExperimentConfig& config) {
  BuiltProblem built;
  switch (config.problem_type) {
    case ProblemType::linear_synthetic: {
      LinearProblemSpec spec;
      spec.p = config.p;
      spec.n = config.n;
      spec.noise_variance = config.noise_variance;
      spec.seed = config.data_seed;
      built.problem = std::move(generate_linear_problem(spec).problem);
      return built;
    }
    case ProblemType::logistic_synthetic: {
      LogisticProblemSpec spec;
      spec.p = config.p;
      spec.n = config.n;
      spec.separation = config.separation;
      spec.lambda = config.lambda;
      spec.train_fraction = config.train_fraction;
      spec.seed = config.data_seed;
      LogisticSynthesis synth = generate_logistic_problem(spec);
      built.problem = std::move(synth.train);
      built.test_rows = std::move(synth.test_rows);
      built.test_labels = std::move(synth.test_labels);
      return built;
    }
    case ProblemType::logistic_mnist: {
      std::string dir = config.mnist_dir;
      if (dir.empty()) {
        const char* env = std::getenv(kMnistDirEnvVar);
        if (env == nullptr || *env == '\0') {
          throw config_error(std::string("mnist problem: no directory given; set problem.dir "
                                         "or the ") +
                             kMnistDirEnvVar + " environment variable");
        }
        dir = env;
      }
      const std::filesystem::path base(dir);
      const IdxImages train_images = load_idx_images(base / "train-images-idx3-ubyte");
      const IdxLabels train_labels = load_idx_labels(base / "train-labels-idx1-ubyte");
      BinaryDataset train =
          binary_filter(train_images, train_labels, config.digit_neg, config.digit_pos);
      const double lambda =
          config.lambda > 0.0
              ? config.lambda
              : 1.0 / std::sqrt(static_cast<double>(train.labels.size()));
      built.problem = std::make_unique<LogisticProblem>(
          train.labels.size(), train.dimension, std::move(train.rows),
          std::move(train.labels), lambda);

      const IdxImages test_images = load_idx_images(base / "t10k-images-idx3-ubyte");
      const IdxLabels test_labels = load_idx_labels(base / "t10k-labels-idx1-ubyte");
      BinaryDataset test =
          binary_filter(test_images, test_labels, config.digit_neg, config.digit_pos);
      built.test_rows = std::move(test.rows);
      built.test_labels = std::move(test.labels);
      return built;
    }
  }
  throw internal_error("build_problem: unknown problem type");
}

std::vector<std::vector<double>> segment_probes(const std::vector<double>& x0,
                                                const std::vector<double>& x_star,
                                                std::size_t points) {
  if (points < 2 || x0.size() != x_star.size()) {
    throw invalid_argument_error("segment_probes: need >= 2 points and matching dimensions");
  }
  std::vector<std::vector<double>> probes(points, std::vector<double>(x0.size()));
  for (std::size_t s = 0; s < points; ++s) {
    const double alpha = static_cast<double>(s) / static_cast<double>(points - 1);
    for (std::size_t j = 0; j < x0.size(); ++j) {
      probes[s][j] = (1.0 - alpha) * x0[j] + alpha * x_star[j];
    }
  }
  return probes;
}

namespace {
// Guarantee lines for one sweep cell; preconditions that fail are reported
// in prose instead of aborting the sweep.
BoundReport build_report(const ExperimentConfig& cfg, const ProblemConstants& constants,
                         double f0_gap, std::size_t blocks, std::string* notes) {
  BoundReport report;
  report.constants = constants;
  report.ratio_r =
      static_cast<double>(cfg.processors) / static_cast<double>(blocks);
  report.f0_gap = f0_gap;
  report.schedule_kind = cfg.schedule.kind();
  report.schedule_a = cfg.schedule.param_a();
  report.schedule_b = cfg.schedule.param_b();

  const double m = constants.strong_convexity;
  const double big_m = constants.lipschitz;
  const double k = constants.grad_second_moment;
  auto note = [&](const std::string& message) {
    if (notes != nullptr) *notes += "  note: " + message + "\n";
  };

  const bool async = cfg.engine != EngineKind::sync;
  if (cfg.schedule.kind() == StepSchedule::Kind::diminishing) {
    if (async) {
      const double rho = cfg.bound_rho > 0.0 ? cfg.bound_rho : 1.0 / big_m;
      report.async_rho = rho;
      report.async_delay_bound = cfg.delay.delta_max;
      try {
        report.async_constant = async_rate_constant(
            m, big_m, k, static_cast<double>(blocks), cfg.schedule.param_a(),
            cfg.schedule.param_b(), static_cast<double>(cfg.delay.delta_max), rho, f0_gap);
      } catch (const Error& e) {
        note(e.what());
      }
    } else {
      try {
        report.sync_constant = sync_rate_constant(m, big_m, k, report.ratio_r,
                                                  cfg.schedule.param_a(),
                                                  cfg.schedule.param_b(), f0_gap);
      } catch (const Error& e) {
        note(e.what());
      }
    }
  }
  if (cfg.schedule.kind() == StepSchedule::Kind::constant) {
    try {
      report.neighborhood = neighborhood_bound(cfg.schedule.param_a(), m, big_m, k);
    } catch (const Error& e) {
      note(e.what());
    }
  }
  return report;
}

std::string trace_file_name(std::size_t blocks, std::uint64_t seed) {
  return "trace_B" + std::to_string(blocks) + "_seed" + std::to_string(seed) + ".csv";
}
}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& base_config,
                                const RunOverrides& overrides) {
  ExperimentConfig config = base_config;
  if (overrides.out_dir) config.output_dir = *overrides.out_dir;
  if (overrides.seed) config.seeds = {*overrides.seed};
  if (overrides.threads) config.threads = *overrides.threads;

  BuiltProblem built = build_problem(config);
  const Problem& problem = *built.problem;
  const std::size_t p = problem.dimension();
  for (const std::size_t blocks : config.blocks) {
    if (blocks > p) {
      throw config_error("blocks: B=" + std::to_string(blocks) + " exceeds dimension p=" +
                         std::to_string(p));
    }
    if (config.engine == EngineKind::sync && config.processors > blocks) {
      throw config_error("processors: I=" + std::to_string(config.processors) +
                         " exceeds B=" + std::to_string(blocks));
    }
  }

  const std::vector<double> x0(p, config.x0_value);
  const OptimumResult optimum = problem.exact_optimum();
  const double f0 = problem.full_objective(x0);
  const double f0_gap = f0 - optimum.objective;
  const ProblemConstants constants = problem.constants(segment_probes(x0, optimum.x));

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    throw io_error("run: cannot create output directory " + config.output_dir.string() +
                   ": " + ec.message());
  }

  ExperimentResult result;
  result.out_dir = config.output_dir;
  result.f_star = optimum.objective;
  result.f0_gap = f0_gap;
  result.gap_threshold = config.target_gap_fraction * f0_gap;

  // Manifest, rewritten after every cell so partial sweeps stay usable.
  json manifest;
  manifest["name"] = config.name;
  manifest["cells"] = json::array();
  auto flush_manifest = [&]() {
    std::ofstream out(config.output_dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  };
  flush_manifest();

  std::string bound_text;
  std::ostringstream metrics;
  metrics << BoundReport::csv_header() << "\n";

  for (const std::size_t blocks : config.blocks) {
    bound_text += "=== B = " + std::to_string(blocks) + " ===\n";
    BoundReport report = build_report(config, constants, f0_gap, blocks, &bound_text);
    bound_text += report.to_text() + "\n";
    metrics << report.csv_row(blocks, config.processors) << "\n";

    std::vector<RunTrace> traces;
    std::vector<std::vector<double>> finals;
    for (const std::uint64_t seed : config.seeds) {
      json cell;
      cell["blocks"] = blocks;
      cell["seed"] = seed;
      cell["trace"] = trace_file_name(blocks, seed);
      try {
        SyncRunResult run;
        if (config.engine == EngineKind::sync) {
          SyncConfig sync;
          sync.blocks = blocks;
          sync.processors = config.processors;
          sync.minibatch = config.minibatch;
          sync.schedule = config.schedule;
          sync.algorithm = config.algorithm;
          sync.memory = config.memory;
          sync.iterations = config.iterations;
          sync.seed = seed;
          sync.record_every = config.record_every;
          sync.threads = config.threads;
          run = run_sync(problem, sync, x0, optimum.objective);
        } else {
          AsyncConfig async;
          async.blocks = blocks;
          async.processors = config.processors;
          async.minibatch = config.minibatch;
          async.schedule = config.schedule;
          async.algorithm = config.algorithm;
          async.memory = config.memory;
          async.iterations = config.iterations;
          async.seed = seed;
          async.record_every = config.record_every;
          async.delay = config.delay;
          if (config.engine == EngineKind::async_sim) {
            run = run_async_sim(problem, async, x0, optimum.objective);
          } else {
            AsyncThreadsResult threads =
                run_async_threads(problem, async, x0, optimum.objective);
            run.trace = std::move(threads.trace);
            run.final_x = std::move(threads.final_x);
          }
        }
        write_trace_csv(config.output_dir / trace_file_name(blocks, seed), run.trace);
        traces.push_back(std::move(run.trace));
        finals.push_back(std::move(run.final_x));
        cell["status"] = "ok";
        manifest["cells"].push_back(cell);
        flush_manifest();
      } catch (const Error& e) {
        cell["status"] = "failed";
        cell["error"] = e.what();
        manifest["cells"].push_back(cell);
        flush_manifest();
        throw;
      }
    }

    const RunTrace averaged = average_traces(traces);
    write_trace_csv(config.output_dir / ("trace_B" + std::to_string(blocks) + "_avg.csv"),
                    averaged);

    BlockSummary summary;
    summary.blocks = blocks;
    summary.final_gap = averaged.back().objective_gap;
    for (const TraceRow& row : averaged.rows) {
      if (row.objective_gap <= result.gap_threshold) {
        summary.reached = true;
        summary.t_reached = row.t;
        summary.features_reached = row.features_processed;
        break;
      }
    }
    if (!built.test_labels.empty()) {
      double total = 0.0;
      for (const auto& x : finals) {
        total += classification_accuracy(x, built.test_rows, p, built.test_labels);
      }
      summary.accuracy = total / static_cast<double>(finals.size());
    }
    result.summaries.push_back(summary);
  }

  {
    std::ofstream out(config.output_dir / "bound_report.txt");
    out << bound_text;
  }
  {
    std::ofstream out(config.output_dir / "metrics.csv");
    out << metrics.str();
  }
  {
    std::ofstream out(config.output_dir / "summary.txt");
    out.precision(10);
    out << "experiment: " << config.name << "\n"
        << "F* = " << result.f_star << ", F(x0) - F* = " << result.f0_gap
        << ", threshold = " << result.gap_threshold << "\n";
    for (const BlockSummary& s : result.summaries) {
      out << "B=" << s.blocks << "  final_gap=" << s.final_gap;
      if (s.reached) {
        out << "  reached_at_t=" << s.t_reached
            << "  reached_at_features=" << s.features_reached;
      } else {
        out << "  threshold_not_reached";
      }
      if (s.accuracy) out << "  test_accuracy=" << *s.accuracy;
      out << "\n";
    }
  }
  return result;
}

std::string bound_report_text(const ExperimentConfig& config) {
  BuiltProblem built = build_problem(config);
  const Problem& problem = *built.problem;
  const std::vector<double> x0(problem.dimension(), config.x0_value);
  const OptimumResult optimum = problem.exact_optimum();
  const double f0_gap = problem.full_objective(x0) - optimum.objective;
  const ProblemConstants constants = problem.constants(segment_probes(x0, optimum.x));

  std::string text;
  for (const std::size_t blocks : config.blocks) {
    text += "=== B = " + std::to_string(blocks) + " ===\n";
    BoundReport report = build_report(config, constants, f0_gap, blocks, &text);
    text += report.to_text() + "\n";
  }
  return text;
}

std::string CompareResult::to_text() const {
  std::ostringstream out;
  out.precision(10);
  out << "threshold gap <= " << eps << "\n";
  auto side = [&](const char* name, const CompareSide& s) {
    out << name << ": ";
    if (s.reached) {
      out << "reached at t=" << s.t << ", features=" << s.features;
    } else {
      out << "not reached by t=" << s.final_t;
    }
    out << " (final gap " << s.final_gap << ")\n";
  };
  side("A", a);
  side("B", b);
  if (a.reached && b.reached && a.t > 0 && a.features > 0.0) {
    out << "t ratio (B/A) = " << static_cast<double>(b.t) / static_cast<double>(a.t) << "\n";
    out << "features ratio (B/A) = " << b.features / a.features << "\n";
  }
  return out.str();
}

CompareResult compare_runs(const std::filesystem::path& trace_a,
                           const std::filesystem::path& trace_b, double eps) {
  if (!(eps > 0.0)) {
    throw invalid_argument_error("compare: eps must be positive");
  }
  auto first_crossing = [&](const std::filesystem::path& path) {
    const RunTrace trace = read_trace_csv(path);
    CompareSide side;
    std::int64_t last_t = -1;
    for (const TraceRow& row : trace.rows) {
      if (row.t <= last_t) {
        throw parse_error("trace csv: " + path.string() +
                          ": rows not strictly increasing in t");
      }
      last_t = row.t;
      if (!side.reached && row.objective_gap <= eps) {
        side.reached = true;
        side.t = row.t;
        side.features = row.features_processed;
      }
    }
    if (trace.rows.empty()) {
      throw parse_error("trace csv: " + path.string() + ": no rows");
    }
    side.final_t = trace.back().t;
    side.final_gap = trace.back().objective_gap;
    return side;
  };
  CompareResult result;
  result.eps = eps;
  result.a = first_crossing(trace_a);
  result.b = first_crossing(trace_b);
  return result;
}

}  // namespace rapsa
