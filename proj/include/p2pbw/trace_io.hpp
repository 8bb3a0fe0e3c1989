#pragma once

#include <string>
#include <vector>

#include "p2pbw/trace.hpp"

namespace p2pbw {

inline constexpr const char* kVersion = "0.1.0";

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

// Trace files: header `time,value`, time in seconds starting at 0 on a
// uniform grid. Sample files: header `value`, one sample per row. All writes
// go through a temp file renamed into place.

void write_trace_csv(const Trace& trace, const std::string& path);
Trace read_trace_csv(const std::string& path);

void write_samples_csv(const std::vector<double>& samples, const std::string& path);
std::vector<double> read_samples_csv(const std::string& path);

void write_text_atomic(const std::string& content, const std::string& path);

} // namespace p2pbw
