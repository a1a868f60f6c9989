// Command-line workbench: type checking, bounded execution, encoding and
// equivalence queries for the shipped calculus instances.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hopsi/harness.hpp"
#include "hopsi/parser.hpp"
#include "hopsi/report.hpp"
#include "hopsi/semantics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTypeError = 1;
constexpr int kExitParseError = 2;
constexpr int kExitWrong = 3;
constexpr int kExitCounterexample = 4;

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path);
  if (!in) {
    ok = false;
    return {};
  }
  std::ostringstream os;
  os << in.rdbuf();
  ok = true;
  return os.str();
}

int parse_error(const hopsi::ParseError& e) {
  std::cerr << "parse error at " << e.line << ":" << e.column << ": "
            << e.message << "\n";
  return kExitParseError;
}

uint64_t effective_seed(uint64_t seed) {
  if (const char* env = std::getenv("HOPSI_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return seed;
}

struct Loaded {
  hopsi::Process process;
  hopsi::Assertion ambient;
  hopsi::TypeEnv env;
  const hopsi::Instance* instance = nullptr;
};

// Parses a file for the given instance tag and produces the generic form
// the engines run on.
std::variant<Loaded, hopsi::ParseError> load(const std::string& tag,
                                             const std::string& text) {
  using namespace hopsi;
  if (tag == "hopi") {
    auto parsed = parse_hopi(text);
    if (auto* e = std::get_if<ParseError>(&parsed)) return *e;
    auto& src = std::get<GenericSource>(parsed);
    Loaded out;
    out.process = src.process;
    out.ambient = src.ambient;
    out.env = src.env;
    static const Instance hopi_inst = hopi::instance();
    out.instance = &hopi_inst;
    return out;
  }
  if (tag == "hopi2") {
    auto parsed = parse_hopi2(text);
    if (auto* e = std::get_if<ParseError>(&parsed)) return *e;
    auto& src = std::get<Hopi2Source>(parsed);
    auto embedded = hopi2::embed(src.env, src.process);
    Loaded out;
    out.process = embedded.process;
    out.ambient = hopi2::level_assertion(src.has_level ? src.level : 8);
    out.env = embedded.env;
    static const Instance hopi2_inst = hopi2::instance();
    out.instance = &hopi2_inst;
    return out;
  }
  if (tag == "rho" || tag == "rho-typed") {
    auto parsed = parse_rho(text, tag == "rho-typed");
    if (auto* e = std::get_if<ParseError>(&parsed)) return *e;
    auto& src = std::get<RhoSource>(parsed);
    Loaded out;
    if (tag == "rho-typed") {
      auto enc = rho::encode_typed(src.typed, src.table);
      if (!enc.missing.empty()) {
        ParseError e;
        e.message = "missing type annotation for subject " + enc.missing[0];
        return e;
      }
      out.process = enc.process;
      out.ambient = enc.bindings;
      static const Instance typed_inst = rho::typed_instance();
      out.instance = &typed_inst;
    } else {
      out.process = rho::encode(src.process);
      out.ambient = rho::unit();
      static const Instance rho_inst = rho::instance();
      out.instance = &rho_inst;
    }
    return out;
  }
  hopsi::ParseError e;
  e.message = "unknown instance tag '" + tag +
              "' (expected hopi, hopi2, rho or rho-typed)";
  return e;
}

const hopsi::Instance& instance_by_tag(const std::string& tag) {
  using namespace hopsi;
  if (tag == "hopi2") {
    static const Instance inst = hopi2::instance();
    return inst;
  }
  if (tag == "rho") {
    static const Instance inst = rho::instance();
    return inst;
  }
  if (tag == "rho-typed") {
    static const Instance inst = rho::typed_instance();
    return inst;
  }
  static const Instance inst = hopi::instance();
  return inst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for higher-order process calculi"};
  app.require_subcommand(1);

  // check
  std::string check_file, check_instance = "hopi";
  bool check_json = false;
  auto* check = app.add_subcommand("check", "type-check a source file");
  check->add_option("file", check_file)->required();
  check->add_option("--instance", check_instance);
  check->add_flag("--json", check_json);

  // run
  std::string run_file, run_instance = "hopi", run_strategy = "all",
              run_trace = "text";
  size_t run_max_steps = 5;
  uint64_t run_seed = 0;
  bool run_detect_wrong = false;
  auto* run = app.add_subcommand("run", "explore the reduction behaviour");
  run->add_option("file", run_file)->required();
  run->add_option("--instance", run_instance);
  run->add_option("--max-steps", run_max_steps);
  run->add_option("--strategy", run_strategy)
      ->check(CLI::IsMember({"all", "random", "first"}));
  run->add_option("--seed", run_seed);
  run->add_option("--trace", run_trace)->check(CLI::IsMember({"text", "json"}));
  run->add_flag("--detect-wrong", run_detect_wrong);

  // encode
  std::string encode_file;
  bool encode_typed = false;
  auto* encode = app.add_subcommand("encode", "translate a reflective source");
  encode->add_option("file", encode_file)->required();
  encode->add_flag("--typed", encode_typed);

  // assumptions
  std::string assume_instance = "hopi";
  size_t assume_trials = 1000, assume_max_size = 6;
  uint64_t assume_seed = 0;
  bool assume_json = false;
  auto* assume =
      app.add_subcommand("assumptions", "falsification harness for an instance");
  assume->add_option("--instance", assume_instance);
  assume->add_option("--trials", assume_trials);
  assume->add_option("--max-size", assume_max_size);
  assume->add_option("--seed", assume_seed);
  assume->add_flag("--json", assume_json);

  // eq
  std::string eq_left, eq_right, eq_relation = "structcong",
              eq_instance = "hopi";
  auto* eq = app.add_subcommand("eq", "decide an equivalence between two files");
  eq->add_option("left", eq_left)->required();
  eq->add_option("right", eq_right)->required();
  eq->add_option("--relation", eq_relation)
      ->check(CLI::IsMember({"nameeq", "structcong"}));
  eq->add_option("--instance", eq_instance);

  CLI11_PARSE(app, argc, argv);

  using namespace hopsi;

  if (*check) {
    bool ok = false;
    std::string text = read_file(check_file, ok);
    if (!ok) {
      std::cerr << "cannot read " << check_file << "\n";
      return kExitParseError;
    }
    auto loaded = load(check_instance, text);
    if (auto* e = std::get_if<ParseError>(&loaded)) return parse_error(*e);
    Loaded& l = std::get<Loaded>(loaded);
    std::vector<std::string> errors;
    if (auto wf = well_formed_violation(l.process))
      errors.push_back("ill-formed: " + wf->message);
    if (errors.empty() && check_instance != "rho") {
      if (auto err = check_process(l.env, l.ambient, l.process, *l.instance))
        errors.push_back(describe(*err));
    }
    if (check_json) {
      std::cout << check_report_json(errors.empty(), errors);
    } else if (errors.empty()) {
      std::cout << "well-typed\n";
    } else {
      std::cout << errors[0] << "\n";
    }
    return errors.empty() ? kExitOk : kExitTypeError;
  }

  if (*run) {
    bool ok = false;
    std::string text = read_file(run_file, ok);
    if (!ok) {
      std::cerr << "cannot read " << run_file << "\n";
      return kExitParseError;
    }
    auto loaded = load(run_instance, text);
    if (auto* e = std::get_if<ParseError>(&loaded)) return parse_error(*e);
    Loaded& l = std::get<Loaded>(loaded);
    ExploreConfig cfg;
    cfg.max_depth = run_max_steps;
    cfg.seed = effective_seed(run_seed);
    cfg.detect_wrong = run_detect_wrong;
    cfg.strategy = run_strategy == "all"
                       ? Strategy::All
                       : (run_strategy == "random" ? Strategy::Random
                                                   : Strategy::First);
    auto result = explore(l.ambient, l.process, l.instance->sig, cfg);
    if (cfg.strategy == Strategy::All) {
      std::cout << tree_to_text(result);
    } else if (run_trace == "json") {
      std::cout << trace_to_json(result.trace);
    } else {
      std::cout << trace_to_text(result.trace);
    }
    if (run_detect_wrong && result.wrong_reachable) {
      std::cerr << "runtime error state reachable\n";
      return kExitWrong;
    }
    return kExitOk;
  }

  if (*encode) {
    bool ok = false;
    std::string text = read_file(encode_file, ok);
    if (!ok) {
      std::cerr << "cannot read " << encode_file << "\n";
      return kExitParseError;
    }
    auto parsed = parse_rho(text, encode_typed);
    if (auto* e = std::get_if<ParseError>(&parsed)) return parse_error(*e);
    auto& src = std::get<RhoSource>(parsed);
    if (encode_typed) {
      auto enc = rho::encode_typed(src.typed, src.table);
      if (!enc.missing.empty()) {
        std::cerr << "missing type annotation for subject " << enc.missing[0]
                  << "\n";
        return kExitTypeError;
      }
      std::cout << enc.process.to_string() << "\n";
      std::cout << "assertion: " << enc.bindings.to_string() << "\n";
    } else {
      std::cout << rho::encode(src.process).to_string() << "\n";
    }
    return kExitOk;
  }

  if (*assume) {
    HarnessConfig cfg;
    cfg.trials = assume_trials;
    cfg.max_size = assume_max_size;
    cfg.seed = effective_seed(assume_seed);
    HarnessReport report =
        run_assumption_harness(instance_by_tag(assume_instance), cfg);
    if (assume_json) {
      std::cout << harness_report_json(report);
    } else {
      std::cout << report.summary();
    }
    return report.ok() ? kExitOk : kExitCounterexample;
  }

  if (*eq) {
    bool okl = false, okr = false;
    std::string left = read_file(eq_left, okl);
    std::string right = read_file(eq_right, okr);
    if (!okl || !okr) {
      std::cerr << "cannot read input files\n";
      return kExitParseError;
    }
    bool equal = false;
    if (eq_relation == "nameeq") {
      auto pl = parse_rho(left, false);
      auto pr = parse_rho(right, false);
      if (auto* e = std::get_if<ParseError>(&pl)) return parse_error(*e);
      if (auto* e = std::get_if<ParseError>(&pr)) return parse_error(*e);
      equal = rho::name_eq(rho::quote(std::get<RhoSource>(pl).process),
                           rho::quote(std::get<RhoSource>(pr).process));
    } else if (eq_instance == "rho" || eq_instance == "rho-typed") {
      auto pl = parse_rho(left, false);
      auto pr = parse_rho(right, false);
      if (auto* e = std::get_if<ParseError>(&pl)) return parse_error(*e);
      if (auto* e = std::get_if<ParseError>(&pr)) return parse_error(*e);
      equal = rho::rho_struct_eq(std::get<RhoSource>(pl).process,
                                 std::get<RhoSource>(pr).process);
    } else {
      auto ll = load(eq_instance, left);
      auto lr = load(eq_instance, right);
      if (auto* e = std::get_if<ParseError>(&ll)) return parse_error(*e);
      if (auto* e = std::get_if<ParseError>(&lr)) return parse_error(*e);
      equal = struct_eq(std::get<Loaded>(ll).process,
                        std::get<Loaded>(lr).process);
    }
    std::cout << (equal ? "equivalent" : "distinct") << "\n";
    return kExitOk;
  }

  return kExitOk;
}
