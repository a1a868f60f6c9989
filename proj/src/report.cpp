#include "hopsi/report.hpp"

#include <sstream>

#include <json.hpp>

namespace hopsi {

using nlohmann::json;

std::string trace_to_text(const std::vector<TraceStep>& trace) {
  std::ostringstream os;
  for (const TraceStep& step : trace) {
    os << step.index << " " << step.rule << " [" << step.ambient.to_string()
       << "] " << step.after.to_string() << "\n";
  }
  return os.str();
}

std::string trace_to_json(const std::vector<TraceStep>& trace) {
  json out = json::array();
  for (const TraceStep& step : trace) {
    out.push_back({{"step", step.index},
                   {"rule", step.rule},
                   {"ambient", step.ambient.to_string()},
                   {"process", step.after.to_string()}});
  }
  return out.dump(2) + "\n";
}

std::string tree_to_text(const ExploreResult& result) {
  std::ostringstream os;
  for (size_t i = 0; i < result.nodes.size(); ++i) {
    const ExploreNode& node = result.nodes[i];
    os << i << " depth=" << node.depth << (node.truncated ? " truncated" : "")
       << " " << node.state.to_string() << "\n";
    if (!node.children.empty()) {
      os << "  ->";
      for (size_t child : node.children) os << " " << child;
      os << "\n";
    }
  }
  return os.str();
}

std::string check_report_json(bool ok, const std::vector<std::string>& errors,
                              const HarnessReport* harness) {
  json out;
  out["result"] = ok ? "ok" : "error";
  out["errors"] = errors;
  json assumptions = json::array();
  if (harness) {
    for (const auto& a : harness->assumptions) {
      assumptions.push_back({{"name", a.name},
                             {"checked", a.checked},
                             {"counterexamples", a.counterexamples}});
    }
  }
  out["assumptionReport"] = assumptions;
  return out.dump(2) + "\n";
}

std::string harness_report_json(const HarnessReport& report) {
  json out;
  out["instance"] = report.instance;
  out["seed"] = report.seed;
  out["result"] = report.ok() ? "ok" : "counterexample";
  json assumptions = json::array();
  for (const auto& a : report.assumptions) {
    assumptions.push_back({{"name", a.name},
                           {"checked", a.checked},
                           {"attempts", a.attempts},
                           {"counterexamples", a.counterexamples}});
  }
  out["assumptionReport"] = assumptions;
  out["compat"] = {{"checked", report.compat_contract.checked},
                   {"counterexamples", report.compat_contract.counterexamples}};
  json laws;
  laws["samples"] = report.subst_laws.samples_run;
  json failures = json::array();
  for (const auto& f : report.subst_laws.failures)
    failures.push_back({{"law", f.law}, {"value", f.value}, {"detail", f.detail}});
  laws["failures"] = failures;
  out["substitutionLaws"] = laws;
  return out.dump(2) + "\n";
}

}  // namespace hopsi
