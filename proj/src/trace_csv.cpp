#include "trace_csv.hpp"

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace rapsa {

namespace {
constexpr const char* kHeader = "t,features_processed,wall_clock_s,objective,objective_gap";

double parse_double(const std::string& field, const std::filesystem::path& path,
                    std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0' || errno == ERANGE) {
    throw parse_error("trace csv: " + path.string() + " line " + std::to_string(line) +
                      ": cannot parse number '" + field + "'");
  }
  return value;
}
}  // namespace

void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace) {
  std::FILE* out = std::fopen(path.string().c_str(), "w");
  if (out == nullptr) {
    throw io_error("trace csv: cannot open " + path.string() + " for writing");
  }
  std::fprintf(out, "%s\n", kHeader);
  for (const TraceRow& row : trace.rows) {
    std::fprintf(out, "%" PRId64 ",%.17g,%.17g,%.17g,%.17g\n", row.t,
                 row.features_processed, row.wall_clock_s, row.objective,
                 row.objective_gap);
  }
  if (std::fclose(out) != 0) {
    throw io_error("trace csv: write failed for " + path.string());
  }
}

RunTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw io_error("trace csv: cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw parse_error("trace csv: " + path.string() + " line 1: missing header");
  }
  if (line != kHeader) {
    throw parse_error("trace csv: " + path.string() + " line 1: header is '" + line +
                      "', expected '" + kHeader + "'");
  }
  RunTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    std::vector<std::string> parts;
    while (std::getline(fields, field, ',')) parts.push_back(field);
    if (parts.size() != 5) {
      throw parse_error("trace csv: " + path.string() + " line " + std::to_string(line_no) +
                        ": expected 5 fields, got " + std::to_string(parts.size()));
    }
    TraceRow row;
    errno = 0;
    char* end = nullptr;
    const long long t = std::strtoll(parts[0].c_str(), &end, 10);
    if (end == parts[0].c_str() || *end != '\0' || errno == ERANGE) {
      throw parse_error("trace csv: " + path.string() + " line " + std::to_string(line_no) +
                        ": cannot parse iteration index '" + parts[0] + "'");
    }
    row.t = t;
    row.features_processed = parse_double(parts[1], path, line_no);
    row.wall_clock_s = parse_double(parts[2], path, line_no);
    row.objective = parse_double(parts[3], path, line_no);
    row.objective_gap = parse_double(parts[4], path, line_no);
    trace.rows.push_back(row);
  }
  return trace;
}

}  // namespace rapsa
