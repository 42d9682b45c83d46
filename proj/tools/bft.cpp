// bft-sim: command-line front end over the bft C API.
#include "bft/bft.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum Exit {
  kExitOk = 0,
  kExitNotConverged = 1,
  kExitInvalid = 2,
  kExitDiverged = 3,
  kExitError = 4,
};

struct Options {
  std::string target;    // positional: bundled name or file path
  std::string scenario;  // --scenario
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string law;
  bool assert_convergence = false;
  std::optional<double> boundary_layer;
  std::vector<std::string> law_flags;
  std::optional<int> decimation;
  bool override_rigidity = false;
  std::optional<double> duration;
  std::string seeds = "1-5";
  unsigned threads = 0;
};

class ApiError : public std::runtime_error {
 public:
  explicit ApiError(int status)
      : std::runtime_error(std::string(bft_status_name(status)) + ": " + bft_last_error()),
        status(status) {}
  int status;
};

void check(int status) {
  if (status != BFT_OK) throw ApiError(status);
}

// Size query followed by the real call.
std::string fetch(const std::function<int(char*, size_t*)>& call) {
  size_t len = 0;
  int status = call(nullptr, &len);
  if (status == BFT_OK) return {};
  if (status != BFT_ERR_BUFFER_TOO_SMALL) throw ApiError(status);
  std::string buf(len, '\0');
  check(call(buf.data(), &len));
  buf.resize(len ? len - 1 : 0);
  return buf;
}

struct Scenario {
  bft_scenario* handle = nullptr;
  ~Scenario() { bft_scenario_destroy(handle); }
};

struct Result {
  bft_result* handle = nullptr;
  ~Result() { bft_result_destroy(handle); }
};

bool is_builtin(const std::string& name) {
  const std::string names = fetch([](char* b, size_t* l) { return bft_builtin_names(b, l); });
  std::istringstream in(names);
  for (std::string line; std::getline(in, line);) {
    if (line == name) return true;
  }
  return false;
}

void load(const Options& opt, Scenario& s) {
  const std::string source = !opt.scenario.empty() ? opt.scenario : opt.target;
  if (source.empty()) throw std::runtime_error("no scenario given (name a bundled scenario or use --scenario)");
  if (opt.scenario.empty() && is_builtin(source)) {
    check(bft_scenario_builtin(source.c_str(), &s.handle));
  } else {
    check(bft_scenario_from_file(source.c_str(), &s.handle));
  }
  if (opt.seed) check(bft_scenario_set_seed(s.handle, *opt.seed));
  if (!opt.law.empty()) check(bft_scenario_set_law(s.handle, opt.law[0]));
  if (opt.boundary_layer) check(bft_scenario_set_boundary_layer(s.handle, *opt.boundary_layer));
  if (opt.decimation) check(bft_scenario_set_decimation(s.handle, *opt.decimation));
  if (opt.duration) check(bft_scenario_set_duration(s.handle, *opt.duration));
  if (opt.override_rigidity) check(bft_scenario_set_override_rigidity(s.handle, 1));
  for (const auto& flag : opt.law_flags) {
    if (flag == "paper-literal-estimator") {
      check(bft_scenario_set_sign_flipped_estimator(s.handle, 1));
    } else {
      throw std::runtime_error("unknown --law-flag '" + flag + "'");
    }
  }
}

// Prints violations and returns false if there are any.
bool report_validation(const Scenario& s) {
  size_t count = 0;
  const std::string text = fetch([&](char* b, size_t* l) {
    return bft_scenario_validate(s.handle, &count, b, l);
  });
  if (count > 0) {
    std::cerr << "invalid scenario (" << count << " violation" << (count == 1 ? "" : "s") << "):\n";
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) std::cerr << "  - " << line << '\n';
    return false;
  }
  return true;
}

void print_warnings(const Scenario& s) {
  size_t count = 0;
  const std::string text = fetch([&](char* b, size_t* l) {
    return bft_scenario_warnings(s.handle, &count, b, l);
  });
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) std::cerr << "warning: " << line << '\n';
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  std::istringstream in(spec);
  for (std::string item; std::getline(in, item, ',');) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(std::stoull(item));
      continue;
    }
    const std::uint64_t lo = std::stoull(item.substr(0, dash));
    const std::uint64_t hi = std::stoull(item.substr(dash + 1));
    if (hi < lo) throw std::runtime_error("bad seed range '" + item + "'");
    for (std::uint64_t k = lo; k <= hi; ++k) seeds.push_back(k);
  }
  if (seeds.empty()) throw std::runtime_error("no seeds given");
  return seeds;
}

int cmd_check(const Options& opt) {
  Scenario s;
  load(opt, s);
  if (!report_validation(s)) return kExitInvalid;
  print_warnings(s);
  std::cout << "ok: " << fetch([&](char* b, size_t* l) { return bft_scenario_name(s.handle, b, l); })
            << '\n';
  return kExitOk;
}

int cmd_rigidity(const Options& opt) {
  Scenario s;
  load(opt, s);
  std::cout << fetch([&](char* b, size_t* l) { return bft_scenario_rigidity_report(s.handle, b, l); });
  return kExitOk;
}

int cmd_run(const Options& opt) {
  Scenario s;
  load(opt, s);
  if (!report_validation(s)) return kExitInvalid;
  print_warnings(s);
  Result r;
  check(bft_run(s.handle, &r.handle));
  check(bft_result_write(r.handle, opt.out.c_str()));
  const std::string files = fetch([&](char* b, size_t* l) { return bft_result_files(r.handle, b, l); });
  std::cout << fetch([&](char* b, size_t* l) { return bft_result_report_text(r.handle, b, l); });
  std::cout << "files:\n" << files;

  int verdict = BFT_VERDICT_INCONCLUSIVE;
  int termination = BFT_TERMINATION_COMPLETED;
  check(bft_result_verdict(r.handle, &verdict));
  check(bft_result_termination(r.handle, &termination, nullptr, nullptr));
  const std::string summary =
      fetch([&](char* b, size_t* l) { return bft_result_summary_json(r.handle, b, l); });
  const bool diverged = termination != BFT_TERMINATION_COMPLETED ||
                        summary.find("\"divergence\": true") != std::string::npos;
  if (diverged) return kExitDiverged;
  if (opt.assert_convergence && verdict != BFT_VERDICT_PASS) return kExitNotConverged;
  return kExitOk;
}

int cmd_sweep(const Options& opt) {
  Scenario s;
  load(opt, s);
  if (!report_validation(s)) return kExitInvalid;
  print_warnings(s);
  const auto seeds = parse_seeds(opt.seeds);
  int all_pass = 0;
  check(bft_sweep(s.handle, seeds.data(), seeds.size(), opt.out.c_str(), opt.threads, &all_pass));
  std::ifstream summary(opt.out + "/sweep.json");
  std::cout << summary.rdbuf();
  if (opt.assert_convergence && !all_pass) return kExitNotConverged;
  return kExitOk;
}

void add_scenario_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("name", opt.target, "Bundled scenario name (sim1, sim2) or scenario file");
  cmd->add_option("--scenario", opt.scenario, "Scenario file (JSON)");
  cmd->add_option("--seed", opt.seed, "Override the initialization seed");
  cmd->add_option("--law", opt.law, "Override the control law")->check(CLI::IsMember({"A", "B"}));
  cmd->add_option("--boundary-layer", opt.boundary_layer,
                  "Replace sign(x) by clamp(x/eps, -1, 1)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--law-flag", opt.law_flags, "Law variant flag (paper-literal-estimator)")
      ->check(CLI::IsMember({"paper-literal-estimator"}));
  cmd->add_option("--decimation", opt.decimation, "Record every k-th step")->check(CLI::PositiveNumber);
  cmd->add_option("--duration", opt.duration, "Override the simulated time span [s]")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--override-rigidity", opt.override_rigidity,
                "Run even if the followers are not localizable");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bearing-based leader-follower formation tracking simulator"};
  app.set_version_flag("--version", bft_version());
  app.require_subcommand(1);
  Options opt;

  auto* check_cmd = app.add_subcommand("check", "Validate a scenario without simulating");
  add_scenario_options(check_cmd, opt);

  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write trace, summary, report and plots");
  add_scenario_options(run_cmd, opt);
  run_cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
  run_cmd->add_flag("--assert-convergence", opt.assert_convergence,
                    "Exit nonzero unless the convergence verdict is PASS");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario over several seeds concurrently");
  add_scenario_options(sweep_cmd, opt);
  sweep_cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
  sweep_cmd->add_option("--seeds", opt.seeds, "Seeds, e.g. 1-5 or 1,4,9")->capture_default_str();
  sweep_cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
  sweep_cmd->add_flag("--assert-convergence", opt.assert_convergence,
                      "Exit nonzero unless every run passes");

  auto* rigidity_cmd = app.add_subcommand("rigidity", "Print the formation analysis as JSON");
  add_scenario_options(rigidity_cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (check_cmd->parsed()) return cmd_check(opt);
    if (run_cmd->parsed()) return cmd_run(opt);
    if (sweep_cmd->parsed()) return cmd_sweep(opt);
    if (rigidity_cmd->parsed()) return cmd_rigidity(opt);
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.status == BFT_ERR_PARSE || e.status == BFT_ERR_VALIDATION ? kExitInvalid : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
