#pragma once

// Trace CSV: comment header with per-trial metadata, then one row per slot.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cnc/engine.hpp"

namespace cnc {

// Shortest representation that parses back to the same double.
std::string format_double(double v);

void write_trace_csv(std::ostream& os, const TrialTrace& trace, std::uint64_t seed);
TrialTrace read_trace_csv(std::istream& is);
void save_trace_csv(const std::filesystem::path& path, const TrialTrace& trace, std::uint64_t seed);
TrialTrace load_trace_csv(const std::filesystem::path& path);

}  // namespace cnc
