#pragma once

#include <iosfwd>
#include <string>

#include "cmbo/run.hpp"

namespace cmbo {

/// One row per observation:
///   run_id,method,tau,x_index,y,best_y,nsr,w_1..w_C
/// Weight columns match the trace's weight vector length (none for methods
/// without prototype weights). UTF-8, LF line endings, round-trip doubles.
void write_trace_csv(std::ostream& out, const RunTrace& trace, const std::string& run_id);
std::string trace_to_csv(const RunTrace& trace, const std::string& run_id);

/// Full trace including distance snapshots, plus an echo of the run
/// configuration.
std::string trace_to_json(const RunTrace& trace, const std::string& run_id,
                          const RunConfig& config);

std::string run_config_to_json(const RunConfig& config);

}  // namespace cmbo
