#pragma once

#include <string>
#include <vector>

#include "hopsi/harness.hpp"
#include "hopsi/semantics.hpp"

namespace hopsi {

// Line-oriented trace: one step per line with index, rule, ambient, process.
std::string trace_to_text(const std::vector<TraceStep>& trace);

// Structured trace: a JSON array of {step, rule, ambient, process}.
std::string trace_to_json(const std::vector<TraceStep>& trace);

// Exploration tree in indented text, states printed canonically.
std::string tree_to_text(const ExploreResult& result);

// Machine-readable check result: {result, errors[], assumptionReport[]}.
std::string check_report_json(bool ok, const std::vector<std::string>& errors,
                              const HarnessReport* harness = nullptr);

std::string harness_report_json(const HarnessReport& report);

}  // namespace hopsi
