// Benchmark and experiment driver. Talks to the solver library exclusively
// through its C interface.
#include <rapsa/rapsa.h>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>

namespace {

int report_failure(rapsa_status status, const char* verb) {
  std::fprintf(stderr, "error (%s, status %d): %s\n", verb, static_cast<int>(status),
               rapsa_last_error_message());
  return 1;
}

int print_and_free(char* text) {
  if (text != nullptr) {
    std::fputs(text, stdout);
    rapsa_string_free(text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rapsa-bench: parallel block-stochastic optimization runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rapsa_version()));

  std::string config_path;
  std::string out_dir;
  std::int64_t seed_override = -1;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Path to the experiment config")->required();
  run->add_option("--seed-override", seed_override,
                  "Replace the config's seed list with this single seed");
  run->add_option("--threads", threads, "Override the config's worker thread count");
  run->add_option("--out-dir", out_dir, "Write artifacts here instead of the config's path");

  std::string trace_a, trace_b;
  double eps = 0.0;
  auto* compare = app.add_subcommand("compare",
                                     "First iteration at which each trace reaches a gap");
  compare->add_option("trace-a", trace_a, "First trace CSV")->required();
  compare->add_option("trace-b", trace_b, "Second trace CSV")->required();
  compare->add_option("--eps", eps, "Objective-gap threshold")->required();

  std::string bounds_config;
  auto* bounds = app.add_subcommand("bounds",
                                    "Print the convergence guarantees for a config");
  bounds->add_option("config", bounds_config, "Path to the experiment config")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    char* report = nullptr;
    const rapsa_status status = rapsa_run_experiment_file(
        config_path.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), seed_override,
        threads, &report);
    if (status != RAPSA_OK) return report_failure(status, "run");
    return print_and_free(report);
  }
  if (compare->parsed()) {
    char* report = nullptr;
    const rapsa_status status =
        rapsa_compare_traces(trace_a.c_str(), trace_b.c_str(), eps, &report);
    if (status != RAPSA_OK) return report_failure(status, "compare");
    return print_and_free(report);
  }
  char* report = nullptr;
  const rapsa_status status = rapsa_bound_report_file(bounds_config.c_str(), &report);
  if (status != RAPSA_OK) return report_failure(status, "bounds");
  return print_and_free(report);
}
