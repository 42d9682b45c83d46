#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bft/scenario.hpp"
#include "fixtures.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace bft;
using nlohmann::json;

namespace {

json builtin_json(const char* name) { return json::parse(*builtin_scenario(name)); }

std::string parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("bundled scenarios parse and validate") {
  const auto names = builtin_scenario_names();
  CHECK(names == std::vector<std::string>{"sim1", "sim2"});
  for (const auto& n : names) {
    const ScenarioConfig cfg = parse_scenario(*builtin_scenario(n));
    CHECK(validate_scenario(cfg).empty());
    CHECK(cfg.name == n);
  }
  CHECK_FALSE(builtin_scenario("nope").has_value());
}

TEST_CASE("bundled scenario contents") {
  const ScenarioConfig a = parse_scenario(*builtin_scenario("sim1"));
  CHECK(a.law == Law::kDirect);
  CHECK(a.gains.k1 == 0.5);
  CHECK(a.gains.k2 == 2.0);
  CHECK(a.gains.delta1 == doctest::Approx(std::sqrt(2.0)));
  CHECK(a.gains.delta2 == doctest::Approx(1.0));
  CHECK(a.integrator.step == 1e-3);
  CHECK(a.integrator.duration == 30.0);
  CHECK(a.integrator.scheme == Scheme::kRk4);
  CHECK(a.formation.edges.size() == 9);
  const auto ref = fixtures::five_agent();
  for (std::size_t k = 0; k < ref.edges.size(); ++k) {
    CHECK(a.formation.edges[k].from == ref.edges[k].from);
    CHECK(a.formation.edges[k].to == ref.edges[k].to);
    CHECK((a.formation.edges[k].bearing - ref.edges[k].bearing).norm() < 1e-15);
  }

  const ScenarioConfig b = parse_scenario(*builtin_scenario("sim2"));
  CHECK(b.law == Law::kEstimator);
  CHECK(b.gains.k1 == 1.0);
  CHECK(b.gains.k2 == 1.0);
  CHECK(b.gains.k3 == 1.0);
  CHECK(b.gains.k4 == 0.5);
  CHECK(b.gains.k5 == 2.0);
  CHECK(b.gains.k6 == 1.0);
  CHECK(b.reconstructed_gains == std::vector<std::string>{"k6"});
}

TEST_CASE("serialize and parse round-trip") {
  for (const char* n : {"sim1", "sim2"}) {
    ScenarioConfig cfg = parse_scenario(*builtin_scenario(n));
    cfg.initial.seed = 12345678901ULL;
    cfg.controller.boundary_layer = 0.0123;
    cfg.output.formats = {"csv"};
    const ScenarioConfig back = parse_scenario(serialize_scenario(cfg));
    CHECK(equivalent(cfg, back));
    CHECK(serialize_scenario(back) == serialize_scenario(cfg));
  }
  ScenarioConfig a = parse_scenario(*builtin_scenario("sim1"));
  ScenarioConfig b = a;
  b.gains.k2 = std::nextafter(b.gains.k2, 3.0);
  CHECK_FALSE(equivalent(a, b));
}

TEST_CASE("round-trip keeps explicit initial states and other profiles") {
  ScenarioConfig cfg = parse_scenario(*builtin_scenario("sim1"));
  cfg.initial.follower_positions = fixtures::expected_followers();
  cfg.initial.follower_velocities = Matrix::Ones(2, 3);
  cfg.profile = VelocityProfile::piecewise_constant({0.0, 3.0}, {fixtures::vec({1, 0}), fixtures::vec({0, 1})});
  CHECK(equivalent(cfg, parse_scenario(serialize_scenario(cfg))));
}

TEST_CASE("syntax errors report line and column") {
  const std::string msg = parse_error("{\n  \"name\": \"x\",\n  \"law\": A\n}");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
  CHECK(parse_error("[1, 2]").find("object") != std::string::npos);
}

TEST_CASE("field errors are collected together") {
  json j = builtin_json("sim1");
  j["gains"]["k1"] = "fast";
  j["integrator"]["step"] = json::array();
  j["law"] = "C";
  j["formation"]["edges"][0].erase("bearing");
  const std::string msg = parse_error(j.dump());
  CHECK(msg.find("gains.k1") != std::string::npos);
  CHECK(msg.find("integrator.step") != std::string::npos);
  CHECK(msg.find("law") != std::string::npos);
  CHECK(msg.find("bearing") != std::string::npos);
}

TEST_CASE("law B requires its extra gains") {
  json j = builtin_json("sim2");
  j["gains"].erase("k6");
  CHECK(parse_error(j.dump()).find("k6") != std::string::npos);
}

TEST_CASE("a single leader is rejected with a hypothesis message") {
  json j = builtin_json("sim1");
  j["formation"]["leaders"] = 1;
  j["formation"]["leader_positions"] = json::array({json::array({0, 0})});
  bool threw = false;
  try {
    load_scenario_text(j.dump());
  } catch (const Error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("two leaders") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("gain violations name the inequality") {
  json j = builtin_json("sim1");
  j["gains"]["k2"] = 1.5;
  const ScenarioConfig cfg = parse_scenario(j.dump());
  const auto v = validate_scenario(cfg);
  CHECK(any_contains(v, "k2=1.5"));
  CHECK_THROWS_AS(load_scenario_text(j.dump()), Error);
}

TEST_CASE("disturbance bounds below the profile suprema are rejected") {
  json j = builtin_json("sim1");
  j["gains"]["delta1"] = 1.0;
  CHECK(any_contains(validate_scenario(parse_scenario(j.dump())), "delta1"));
}

TEST_CASE("other validation rules") {
  ScenarioConfig cfg = parse_scenario(*builtin_scenario("sim1"));
  cfg.output.decimation = 0;
  cfg.output.formats = {"csv", "xlsx"};
  cfg.integrator.step = -1.0;
  cfg.controller.boundary_layer = -0.5;
  const auto v = validate_scenario(cfg);
  CHECK(v.size() >= 4);
  CHECK(any_contains(v, "xlsx"));
  CHECK(any_contains(v, "decimation"));
}

TEST_CASE("warnings: rigidity, literal estimator") {
  ScenarioConfig cfg = parse_scenario(*builtin_scenario("sim2"));
  CHECK(any_contains(scenario_warnings(cfg), "rigid"));
  cfg.controller.estimator_form = EstimatorForm::kSignFlipped;
  CHECK(scenario_warnings(cfg).size() >= 2);
}

TEST_CASE("renormalization flag fixes non-unit bearings") {
  json j = builtin_json("sim1");
  j["formation"]["edges"][0]["bearing"] = json::array({2.0, 0.0});
  CHECK_FALSE(validate_scenario(parse_scenario(j.dump())).empty());
  j["formation"]["renormalize_bearings"] = true;
  const ScenarioConfig cfg = parse_scenario(j.dump());
  CHECK(validate_scenario(cfg).empty());
}

TEST_CASE("scenario files load from disk") {
  const auto dir = std::filesystem::temp_directory_path() / "bft_test_scenario";
  std::filesystem::create_directories(dir);
  const auto path = dir / "s.json";
  std::ofstream(path) << *builtin_scenario("sim2");
  CHECK(equivalent(load_scenario(path.string()), parse_scenario(*builtin_scenario("sim2"))));
  try {
    load_scenario((dir / "missing.json").string());
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("rigidity report") {
  const json r = json::parse(rigidity_report_json(parse_scenario(*builtin_scenario("sim2"))));
  CHECK(r["follower_block"]["holds"] == true);
  CHECK(r["bearing_rigidity"]["rank"] == 6);
  CHECK(r["bearing_rigidity"]["rigid"] == false);
  CHECK(r["estimator_max_real_eigenvalue"].get<double>() < 0.0);
}
