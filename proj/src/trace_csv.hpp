#pragma once

#include <filesystem>

#include "run_trace.hpp"

namespace rapsa {

// Trace file format: the literal header
//   t,features_processed,wall_clock_s,objective,objective_gap
// followed by one row per recorded point. Doubles are written with 17
// significant digits, so write/read round-trips are bit-exact. Read errors
// (missing header, bad field count, unparsable number) name the line.
void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace);
RunTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace rapsa
