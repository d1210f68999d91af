// C interface of the library: exception-to-status translation plus opaque
// handle plumbing around the C++ core.
#include <rapsa/rapsa.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "least_squares.hpp"
#include "logistic.hpp"
#include "problem.hpp"
#include "run_trace.hpp"
#include "synthetic_data.hpp"
#include "sync_engine.hpp"
#include "async_simulator.hpp"
#include "async_threads.hpp"
#include "trace_csv.hpp"

struct rapsa_problem {
  std::unique_ptr<rapsa::Problem> impl;
};

struct rapsa_trace {
  rapsa::RunTrace impl;
};

namespace {

thread_local std::string g_last_error;

rapsa_status status_of(rapsa::Error::Kind kind) {
  using Kind = rapsa::Error::Kind;
  switch (kind) {
    case Kind::invalid_argument: return RAPSA_ERR_INVALID_ARGUMENT;
    case Kind::config: return RAPSA_ERR_CONFIG;
    case Kind::io: return RAPSA_ERR_IO;
    case Kind::parse: return RAPSA_ERR_PARSE;
    case Kind::diverged: return RAPSA_ERR_DIVERGED;
    case Kind::singular: return RAPSA_ERR_SINGULAR;
    case Kind::precondition: return RAPSA_ERR_PRECONDITION;
    case Kind::internal: return RAPSA_ERR_INTERNAL;
  }
  return RAPSA_ERR_INTERNAL;
}

rapsa_status fail(rapsa_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, converting any escaping exception into a status code.
template <typename Fn>
rapsa_status guarded(Fn&& fn) {
  try {
    fn();
    return RAPSA_OK;
  } catch (const rapsa::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RAPSA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RAPSA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RAPSA_ERR_INTERNAL, "unknown exception");
  }
}

rapsa_status require(bool condition, const char* message) {
  return condition ? RAPSA_OK : fail(RAPSA_ERR_INVALID_ARGUMENT, message);
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out != nullptr) {
    std::memcpy(out, text.c_str(), text.size() + 1);
  }
  return out;
}

rapsa::StepSchedule schedule_from(const rapsa_run_config& config) {
  switch (config.schedule_kind) {
    case RAPSA_SCHEDULE_CONSTANT:
      return rapsa::StepSchedule::constant(config.schedule_a);
    case RAPSA_SCHEDULE_DIMINISHING:
      return rapsa::StepSchedule::diminishing(config.schedule_a, config.schedule_b);
    case RAPSA_SCHEDULE_HYBRID:
      return rapsa::StepSchedule::hybrid(config.schedule_a, config.schedule_b);
    default:
      throw rapsa::invalid_argument_error("run config: unknown schedule_kind " +
                                          std::to_string(config.schedule_kind));
  }
}

rapsa::Algorithm algorithm_from(const rapsa_run_config& config) {
  switch (config.algorithm) {
    case RAPSA_ALG_RAPSA: return rapsa::Algorithm::rapsa;
    case RAPSA_ALG_ARAPSA: return rapsa::Algorithm::arapsa;
    default:
      throw rapsa::invalid_argument_error("run config: unknown algorithm " +
                                          std::to_string(config.algorithm));
  }
}

enum class EngineSelect { sync, async_sim, async_threads };

rapsa_status run_engine(const rapsa_problem* problem, const rapsa_run_config* config,
                        const double* x0, rapsa_trace** trace_out, double* final_x,
                        EngineSelect engine) {
  if (auto s = require(problem != nullptr && config != nullptr && trace_out != nullptr,
                       "run: problem, config and trace_out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  *trace_out = nullptr;
  return guarded([&] {
    const std::size_t p = problem->impl->dimension();
    std::vector<double> start(p, 0.0);
    if (x0 != nullptr) start.assign(x0, x0 + p);

    rapsa::SyncRunResult result;
    if (engine == EngineSelect::sync) {
      rapsa::SyncConfig sync;
      sync.blocks = config->blocks;
      sync.processors = config->processors;
      sync.minibatch = config->minibatch;
      sync.schedule = schedule_from(*config);
      sync.algorithm = algorithm_from(*config);
      sync.memory = config->memory;
      sync.iterations = config->iterations;
      sync.seed = config->seed;
      sync.record_every = config->record_every;
      sync.threads = config->threads;
      sync.divergence_factor = config->divergence_factor;
      result = rapsa::run_sync(*problem->impl, sync, start, config->f_star);
    } else {
      rapsa::AsyncConfig async;
      async.blocks = config->blocks;
      async.processors = config->processors;
      async.minibatch = config->minibatch;
      async.schedule = schedule_from(*config);
      async.algorithm = algorithm_from(*config);
      async.memory = config->memory;
      async.iterations = config->iterations;
      async.seed = config->seed;
      async.record_every = config->record_every;
      async.delay.mean = config->delay_mean;
      async.delay.stddev = config->delay_stddev;
      async.delay.delta_max = config->delay_max;
      async.divergence_factor = config->divergence_factor;
      if (engine == EngineSelect::async_sim) {
        result = rapsa::run_async_sim(*problem->impl, async, start, config->f_star);
      } else {
        rapsa::AsyncThreadsResult threads =
            rapsa::run_async_threads(*problem->impl, async, start, config->f_star);
        result.trace = std::move(threads.trace);
        result.final_x = std::move(threads.final_x);
      }
    }
    if (final_x != nullptr) {
      std::memcpy(final_x, result.final_x.data(), p * sizeof(double));
    }
    *trace_out = new rapsa_trace{std::move(result.trace)};
  });
}

}  // namespace

extern "C" {

const char* rapsa_version(void) { return "1.0.0"; }

const char* rapsa_last_error_message(void) { return g_last_error.c_str(); }

void rapsa_string_free(char* text) { std::free(text); }

rapsa_status rapsa_problem_create_least_squares(size_t num_samples, size_t dimension,
                                                const double* rows, const double* targets,
                                                rapsa_problem** out) {
  if (auto s = require(rows != nullptr && targets != nullptr && out != nullptr,
                       "create_least_squares: rows, targets and out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  *out = nullptr;
  return guarded([&] {
    std::vector<double> row_copy(rows, rows + num_samples * dimension);
    std::vector<double> target_copy(targets, targets + num_samples);
    *out = new rapsa_problem{std::make_unique<rapsa::LeastSquaresProblem>(
        num_samples, dimension, std::move(row_copy), std::move(target_copy))};
  });
}

rapsa_status rapsa_problem_create_logistic(size_t num_samples, size_t dimension,
                                           const double* rows, const int8_t* labels,
                                           double lambda, rapsa_problem** out) {
  if (auto s = require(rows != nullptr && labels != nullptr && out != nullptr,
                       "create_logistic: rows, labels and out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  *out = nullptr;
  return guarded([&] {
    std::vector<double> row_copy(rows, rows + num_samples * dimension);
    std::vector<std::int8_t> label_copy(labels, labels + num_samples);
    *out = new rapsa_problem{std::make_unique<rapsa::LogisticProblem>(
        num_samples, dimension, std::move(row_copy), std::move(label_copy), lambda)};
  });
}

rapsa_status rapsa_problem_create_linear_synthetic(size_t dimension, size_t num_samples,
                                                   double noise_variance, uint64_t seed,
                                                   rapsa_problem** out) {
  if (auto s = require(out != nullptr, "create_linear_synthetic: out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  *out = nullptr;
  return guarded([&] {
    rapsa::LinearProblemSpec spec;
    spec.p = dimension;
    spec.n = num_samples;
    spec.noise_variance = noise_variance;
    spec.seed = seed;
    rapsa::LinearSynthesis synthesis = rapsa::generate_linear_problem(spec);
    *out = new rapsa_problem{std::move(synthesis.problem)};
  });
}

void rapsa_problem_destroy(rapsa_problem* problem) { delete problem; }

rapsa_status rapsa_problem_dimension(const rapsa_problem* problem, size_t* out) {
  if (auto s = require(problem != nullptr && out != nullptr,
                       "dimension: problem and out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  *out = problem->impl->dimension();
  return RAPSA_OK;
}

rapsa_status rapsa_problem_num_samples(const rapsa_problem* problem, size_t* out) {
  if (auto s = require(problem != nullptr && out != nullptr,
                       "num_samples: problem and out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  *out = problem->impl->num_samples();
  return RAPSA_OK;
}

rapsa_status rapsa_problem_objective(const rapsa_problem* problem, const double* x,
                                     double* out) {
  if (auto s = require(problem != nullptr && x != nullptr && out != nullptr,
                       "objective: problem, x and out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  return guarded([&] {
    *out = problem->impl->full_objective(
        std::span<const double>(x, problem->impl->dimension()));
  });
}

rapsa_status rapsa_problem_gradient(const rapsa_problem* problem, const double* x,
                                    double* out) {
  if (auto s = require(problem != nullptr && x != nullptr && out != nullptr,
                       "gradient: problem, x and out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  return guarded([&] {
    const std::size_t p = problem->impl->dimension();
    problem->impl->full_gradient(std::span<const double>(x, p), std::span<double>(out, p));
  });
}

rapsa_status rapsa_problem_optimum(const rapsa_problem* problem, double* x_out,
                                   double* objective_out) {
  if (auto s = require(problem != nullptr, "optimum: problem must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  return guarded([&] {
    const rapsa::OptimumResult result = problem->impl->exact_optimum();
    if (x_out != nullptr) {
      std::memcpy(x_out, result.x.data(), result.x.size() * sizeof(double));
    }
    if (objective_out != nullptr) *objective_out = result.objective;
  });
}

rapsa_status rapsa_problem_constants(const rapsa_problem* problem, double* strong_convexity,
                                     double* lipschitz, double* grad_second_moment) {
  if (auto s = require(problem != nullptr, "constants: problem must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  return guarded([&] {
    const rapsa::ProblemConstants constants = problem->impl->constants();
    if (strong_convexity != nullptr) *strong_convexity = constants.strong_convexity;
    if (lipschitz != nullptr) *lipschitz = constants.lipschitz;
    if (grad_second_moment != nullptr) *grad_second_moment = constants.grad_second_moment;
  });
}

void rapsa_run_config_init(rapsa_run_config* config) {
  if (config == nullptr) return;
  config->blocks = 1;
  config->processors = 1;
  config->minibatch = 1;
  config->algorithm = RAPSA_ALG_RAPSA;
  config->memory = 10;
  config->schedule_kind = RAPSA_SCHEDULE_CONSTANT;
  config->schedule_a = 1e-2;
  config->schedule_b = 0.0;
  config->iterations = 0;
  config->seed = 0;
  config->record_every = 1;
  config->threads = 1;
  config->divergence_factor = 1e6;
  config->delay_mean = 1.0;
  config->delay_stddev = 0.0;
  config->delay_max = 1;
  config->f_star = std::nan("");
}

rapsa_status rapsa_run_sync(const rapsa_problem* problem, const rapsa_run_config* config,
                            const double* x0, rapsa_trace** trace_out, double* final_x) {
  return run_engine(problem, config, x0, trace_out, final_x, EngineSelect::sync);
}

rapsa_status rapsa_run_async_sim(const rapsa_problem* problem, const rapsa_run_config* config,
                                 const double* x0, rapsa_trace** trace_out, double* final_x) {
  return run_engine(problem, config, x0, trace_out, final_x, EngineSelect::async_sim);
}

rapsa_status rapsa_run_async_threads(const rapsa_problem* problem,
                                     const rapsa_run_config* config, const double* x0,
                                     rapsa_trace** trace_out, double* final_x) {
  return run_engine(problem, config, x0, trace_out, final_x, EngineSelect::async_threads);
}

size_t rapsa_trace_size(const rapsa_trace* trace) {
  return trace == nullptr ? 0 : trace->impl.size();
}

rapsa_status rapsa_trace_row(const rapsa_trace* trace, size_t index, int64_t* t,
                             double* features_processed, double* wall_clock_s,
                             double* objective, double* objective_gap) {
  if (auto s = require(trace != nullptr, "trace_row: trace must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  if (index >= trace->impl.size()) {
    return fail(RAPSA_ERR_INVALID_ARGUMENT,
                "trace_row: index " + std::to_string(index) + " out of range (size " +
                    std::to_string(trace->impl.size()) + ")");
  }
  const rapsa::TraceRow& row = trace->impl.rows[index];
  if (t != nullptr) *t = row.t;
  if (features_processed != nullptr) *features_processed = row.features_processed;
  if (wall_clock_s != nullptr) *wall_clock_s = row.wall_clock_s;
  if (objective != nullptr) *objective = row.objective;
  if (objective_gap != nullptr) *objective_gap = row.objective_gap;
  return RAPSA_OK;
}

rapsa_status rapsa_trace_write_csv(const rapsa_trace* trace, const char* path) {
  if (auto s = require(trace != nullptr && path != nullptr,
                       "trace_write_csv: trace and path must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  return guarded([&] { rapsa::write_trace_csv(path, trace->impl); });
}

rapsa_status rapsa_trace_read_csv(const char* path, rapsa_trace** out) {
  if (auto s = require(path != nullptr && out != nullptr,
                       "trace_read_csv: path and out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  *out = nullptr;
  return guarded([&] { *out = new rapsa_trace{rapsa::read_trace_csv(path)}; });
}

void rapsa_trace_destroy(rapsa_trace* trace) { delete trace; }

rapsa_status rapsa_sync_rate_constant(double m, double big_m, double k, double r,
                                      double gamma0, double t0, double f0_gap, double* out) {
  if (auto s = require(out != nullptr, "sync_rate_constant: out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  return guarded([&] { *out = rapsa::sync_rate_constant(m, big_m, k, r, gamma0, t0, f0_gap); });
}

rapsa_status rapsa_neighborhood_bound(double gamma, double m, double big_m, double k,
                                      double* out) {
  if (auto s = require(out != nullptr, "neighborhood_bound: out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  return guarded([&] { *out = rapsa::neighborhood_bound(gamma, m, big_m, k); });
}

rapsa_status rapsa_min_iterations(double m, double big_m, double k, double r, double phi,
                                  double eps, double f0_gap, int64_t* iterations_out,
                                  double* step_out) {
  return guarded([&] {
    const rapsa::IterationBudget budget =
        rapsa::min_iterations(m, big_m, k, r, phi, eps, f0_gap);
    if (iterations_out != nullptr) *iterations_out = budget.iterations;
    if (step_out != nullptr) *step_out = budget.step_size;
  });
}

rapsa_status rapsa_async_rate_constant(double m, double big_m, double k, double blocks,
                                       double gamma0, double t0, double tau, double rho,
                                       double f0_gap, double* out) {
  if (auto s = require(out != nullptr, "async_rate_constant: out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  return guarded([&] {
    *out = rapsa::async_rate_constant(m, big_m, k, blocks, gamma0, t0, tau, rho, f0_gap);
  });
}

rapsa_status rapsa_run_experiment_file(const char* config_path, const char* out_dir,
                                       int64_t seed_override, int threads,
                                       char** report_out) {
  if (auto s = require(config_path != nullptr, "run_experiment: config_path must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  if (report_out != nullptr) *report_out = nullptr;
  return guarded([&] {
    rapsa::ExperimentConfig config = rapsa::ExperimentConfig::from_json_file(config_path);
    rapsa::RunOverrides overrides;
    if (out_dir != nullptr) overrides.out_dir = std::filesystem::path(out_dir);
    if (seed_override >= 0) overrides.seed = static_cast<std::uint64_t>(seed_override);
    if (threads >= 1) overrides.threads = threads;
    const rapsa::ExperimentResult result = rapsa::run_experiment(config, overrides);
    if (report_out != nullptr) {
      std::string text = "wrote " + result.out_dir.string() + "\n";
      std::ifstream summary(result.out_dir / "summary.txt");
      if (summary) {
        std::stringstream buffer;
        buffer << summary.rdbuf();
        text += buffer.str();
      }
      *report_out = copy_string(text);
      if (*report_out == nullptr) throw std::bad_alloc();
    }
  });
}

rapsa_status rapsa_bound_report_file(const char* config_path, char** report_out) {
  if (auto s = require(config_path != nullptr && report_out != nullptr,
                       "bound_report: config_path and report_out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  *report_out = nullptr;
  return guarded([&] {
    const rapsa::ExperimentConfig config =
        rapsa::ExperimentConfig::from_json_file(config_path);
    *report_out = copy_string(rapsa::bound_report_text(config));
    if (*report_out == nullptr) throw std::bad_alloc();
  });
}

rapsa_status rapsa_compare_traces(const char* trace_a_path, const char* trace_b_path,
                                  double eps, char** report_out) {
  if (auto s = require(trace_a_path != nullptr && trace_b_path != nullptr &&
                           report_out != nullptr,
                       "compare: both trace paths and report_out must be non-null");
      s != RAPSA_OK) {
    return s;
  }
  *report_out = nullptr;
  return guarded([&] {
    const rapsa::CompareResult result =
        rapsa::compare_runs(trace_a_path, trace_b_path, eps);
    *report_out = copy_string(result.to_text());
    if (*report_out == nullptr) throw std::bad_alloc();
  });
}

}  // extern "C"
