#include "bft/bft.h"

#include "bft/output.hpp"

#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

struct bft_scenario {
  bft::ScenarioConfig config;
};

struct bft_result {
  bft::ScenarioConfig config;
  bft::RunResult run;
  std::vector<std::string> files;
};

namespace {

thread_local std::string g_last_error;

int status_of(bft::ErrorCode code) {
  switch (code) {
    case bft::ErrorCode::kInvalidArgument: return BFT_ERR_INVALID_ARGUMENT;
    case bft::ErrorCode::kInvalidBearing: return BFT_ERR_INVALID_BEARING;
    case bft::ErrorCode::kCollision: return BFT_ERR_COLLISION;
    case bft::ErrorCode::kHypothesisViolated: return BFT_ERR_HYPOTHESIS;
    case bft::ErrorCode::kNotLocalizable: return BFT_ERR_NOT_LOCALIZABLE;
    case bft::ErrorCode::kAmbiguousRigidity: return BFT_ERR_AMBIGUOUS_RIGIDITY;
    case bft::ErrorCode::kGainCondition: return BFT_ERR_GAIN_CONDITION;
    case bft::ErrorCode::kNumericalBlowup: return BFT_ERR_NUMERICAL_BLOWUP;
    case bft::ErrorCode::kConfig: return BFT_ERR_CONFIG;
    case bft::ErrorCode::kParse: return BFT_ERR_PARSE;
    case bft::ErrorCode::kValidation: return BFT_ERR_VALIDATION;
    case bft::ErrorCode::kIo: return BFT_ERR_IO;
  }
  return BFT_ERR_INTERNAL;
}

int fail(int status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
int guard(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const bft::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BFT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BFT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BFT_ERR_INTERNAL, "unknown error");
  }
}

int copy_out(const std::string& text, char* buf, size_t* len) {
  if (!len) return fail(BFT_ERR_NULL_POINTER, "length pointer is NULL");
  const size_t need = text.size() + 1;
  const size_t cap = *len;
  *len = need;
  if (!buf || cap < need) {
    return fail(BFT_ERR_BUFFER_TOO_SMALL, "buffer needs " + std::to_string(need) + " bytes");
  }
  std::memcpy(buf, text.c_str(), need);
  return BFT_OK;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

int make_scenario(bft::ScenarioConfig cfg, bft_scenario** out) {
  *out = new bft_scenario{std::move(cfg)};
  return BFT_OK;
}

#define BFT_REQUIRE(ptr) \
  if (!(ptr)) return fail(BFT_ERR_NULL_POINTER, #ptr " is NULL")

}  // namespace

extern "C" {

const char* bft_version(void) { return "0.1.0"; }

const char* bft_status_name(int status) {
  switch (status) {
    case BFT_OK: return "ok";
    case BFT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BFT_ERR_INVALID_BEARING: return "invalid bearing";
    case BFT_ERR_COLLISION: return "collision";
    case BFT_ERR_HYPOTHESIS: return "hypothesis violated";
    case BFT_ERR_NOT_LOCALIZABLE: return "not localizable";
    case BFT_ERR_AMBIGUOUS_RIGIDITY: return "ambiguous rigidity";
    case BFT_ERR_GAIN_CONDITION: return "gain condition";
    case BFT_ERR_NUMERICAL_BLOWUP: return "numerical blow-up";
    case BFT_ERR_CONFIG: return "configuration error";
    case BFT_ERR_PARSE: return "parse error";
    case BFT_ERR_VALIDATION: return "validation error";
    case BFT_ERR_IO: return "i/o error";
    case BFT_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case BFT_ERR_NULL_POINTER: return "null pointer";
    case BFT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bft_last_error(void) { return g_last_error.c_str(); }

int bft_builtin_names(char* buf, size_t* len) {
  return guard([&]() -> int { return copy_out(join_lines(bft::builtin_scenario_names()), buf, len); });
}

int bft_scenario_from_file(const char* path, bft_scenario** out) {
  return guard([&]() -> int {
    BFT_REQUIRE(path);
    BFT_REQUIRE(out);
    *out = nullptr;
    std::ifstream in(path, std::ios::binary);
    if (!in) return fail(BFT_ERR_IO, std::string("cannot open scenario file '") + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return make_scenario(bft::parse_scenario(text.str()), out);
  });
}

int bft_scenario_from_json(const char* text, size_t text_len, bft_scenario** out) {
  return guard([&]() -> int {
    BFT_REQUIRE(text);
    BFT_REQUIRE(out);
    *out = nullptr;
    return make_scenario(bft::parse_scenario(std::string_view(text, text_len)), out);
  });
}

int bft_scenario_builtin(const char* name, bft_scenario** out) {
  return guard([&]() -> int {
    BFT_REQUIRE(name);
    BFT_REQUIRE(out);
    *out = nullptr;
    const auto text = bft::builtin_scenario(name);
    if (!text) {
      return fail(BFT_ERR_INVALID_ARGUMENT, std::string("no bundled scenario named '") + name + "'");
    }
    return make_scenario(bft::parse_scenario(*text), out);
  });
}

int bft_scenario_clone(const bft_scenario* scenario, bft_scenario** out) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    BFT_REQUIRE(out);
    return make_scenario(scenario->config, out);
  });
}

void bft_scenario_destroy(bft_scenario* scenario) { delete scenario; }

int bft_scenario_set_seed(bft_scenario* scenario, uint64_t seed) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    scenario->config.initial.seed = seed;
    return BFT_OK;
  });
}

int bft_scenario_set_law(bft_scenario* scenario, char law) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    if (law == 'A' || law == 'a') {
      scenario->config.law = bft::Law::kDirect;
    } else if (law == 'B' || law == 'b') {
      scenario->config.law = bft::Law::kEstimator;
    } else {
      return fail(BFT_ERR_INVALID_ARGUMENT, "law must be 'A' or 'B'");
    }
    return BFT_OK;
  });
}

int bft_scenario_set_boundary_layer(bft_scenario* scenario, double epsilon) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    if (!(epsilon >= 0.0)) return fail(BFT_ERR_INVALID_ARGUMENT, "boundary layer must be >= 0");
    scenario->config.controller.boundary_layer = epsilon;
    return BFT_OK;
  });
}

int bft_scenario_set_sign_flipped_estimator(bft_scenario* scenario, int enabled) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    scenario->config.controller.estimator_form =
        enabled ? bft::EstimatorForm::kSignFlipped : bft::EstimatorForm::kCorrected;
    return BFT_OK;
  });
}

int bft_scenario_set_decimation(bft_scenario* scenario, int decimation) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    if (decimation < 1) return fail(BFT_ERR_INVALID_ARGUMENT, "decimation must be >= 1");
    scenario->config.output.decimation = decimation;
    return BFT_OK;
  });
}

int bft_scenario_set_override_rigidity(bft_scenario* scenario, int enabled) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    scenario->config.override_rigidity = enabled != 0;
    return BFT_OK;
  });
}

int bft_scenario_set_duration(bft_scenario* scenario, double seconds) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    if (!(seconds > 0.0)) return fail(BFT_ERR_INVALID_ARGUMENT, "duration must be > 0");
    scenario->config.integrator.duration = seconds;
    return BFT_OK;
  });
}

int bft_scenario_name(const bft_scenario* scenario, char* buf, size_t* len) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    return copy_out(scenario->config.name, buf, len);
  });
}

int bft_scenario_seed(const bft_scenario* scenario, uint64_t* seed) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    BFT_REQUIRE(seed);
    *seed = scenario->config.initial.seed;
    return BFT_OK;
  });
}

int bft_scenario_validate(const bft_scenario* scenario, size_t* count, char* buf, size_t* len) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    const auto v = bft::validate_scenario(scenario->config);
    if (count) *count = v.size();
    return len ? copy_out(join_lines(v), buf, len) : BFT_OK;
  });
}

int bft_scenario_warnings(const bft_scenario* scenario, size_t* count, char* buf, size_t* len) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    const auto w = bft::scenario_warnings(scenario->config);
    if (count) *count = w.size();
    return len ? copy_out(join_lines(w), buf, len) : BFT_OK;
  });
}

int bft_scenario_to_json(const bft_scenario* scenario, char* buf, size_t* len) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    return copy_out(bft::serialize_scenario(scenario->config), buf, len);
  });
}

int bft_scenario_rigidity_report(const bft_scenario* scenario, char* buf, size_t* len) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    return copy_out(bft::rigidity_report_json(scenario->config), buf, len);
  });
}

int bft_run(const bft_scenario* scenario, bft_result** out) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    BFT_REQUIRE(out);
    *out = nullptr;
    auto result = std::make_unique<bft_result>();
    result->config = scenario->config;
    result->run = bft::run_scenario(result->config);
    *out = result.release();
    return BFT_OK;
  });
}

void bft_result_destroy(bft_result* result) { delete result; }

int bft_result_verdict(const bft_result* result, int* verdict) {
  return guard([&]() -> int {
    BFT_REQUIRE(result);
    BFT_REQUIRE(verdict);
    switch (result->run.report.verdict) {
      case bft::Verdict::kPass: *verdict = BFT_VERDICT_PASS; break;
      case bft::Verdict::kFail: *verdict = BFT_VERDICT_FAIL; break;
      case bft::Verdict::kInconclusive: *verdict = BFT_VERDICT_INCONCLUSIVE; break;
    }
    return BFT_OK;
  });
}

int bft_result_termination(const bft_result* result, int* termination, double* time, int* agent) {
  return guard([&]() -> int {
    BFT_REQUIRE(result);
    const bft::Trace& t = result->run.trace;
    if (termination) {
      *termination = t.termination == bft::Termination::kCompleted   ? BFT_TERMINATION_COMPLETED
                     : t.termination == bft::Termination::kCollision ? BFT_TERMINATION_COLLISION
                                                                     : BFT_TERMINATION_BLOWUP;
    }
    if (time) *time = t.termination_time;
    if (agent) *agent = t.termination_agent >= 0 ? t.termination_agent + 1 : 0;
    return BFT_OK;
  });
}

int bft_result_sample_count(const bft_result* result, size_t* count) {
  return guard([&]() -> int {
    BFT_REQUIRE(result);
    BFT_REQUIRE(count);
    *count = result->run.trace.samples.size();
    return BFT_OK;
  });
}

int bft_result_summary_json(const bft_result* result, char* buf, size_t* len) {
  return guard([&]() -> int {
    BFT_REQUIRE(result);
    return copy_out(bft::summary_json(result->config, result->run), buf, len);
  });
}

int bft_result_report_text(const bft_result* result, char* buf, size_t* len) {
  return guard([&]() -> int {
    BFT_REQUIRE(result);
    return copy_out(bft::report_text(result->config, result->run), buf, len);
  });
}

int bft_result_write(bft_result* result, const char* dir) {
  return guard([&]() -> int {
    BFT_REQUIRE(result);
    BFT_REQUIRE(dir);
    result->files.clear();
    for (const auto& f : bft::write_run(result->config, result->run, dir)) {
      result->files.push_back(f.string());
    }
    return BFT_OK;
  });
}

int bft_result_files(const bft_result* result, char* buf, size_t* len) {
  return guard([&]() -> int {
    BFT_REQUIRE(result);
    return copy_out(join_lines(result->files), buf, len);
  });
}

int bft_sweep(const bft_scenario* scenario, const uint64_t* seeds, size_t seed_count,
              const char* dir, unsigned threads, int* all_pass) {
  return guard([&]() -> int {
    BFT_REQUIRE(scenario);
    BFT_REQUIRE(seeds);
    BFT_REQUIRE(dir);
    const std::vector<std::uint64_t> list(seeds, seeds + seed_count);
    const auto sweep = bft::run_sweep(scenario->config, list, dir, threads);
    if (all_pass) *all_pass = sweep.all_pass() ? 1 : 0;
    return BFT_OK;
  });
}

}  // extern "C"
