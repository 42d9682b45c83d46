#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bft/analysis.hpp"
#include "bft/scenario.hpp"
#include "fixtures.hpp"

#include <cmath>
#include <random>

using namespace bft;
using fixtures::vec;

namespace {

ScenarioConfig builtin(const char* name) { return parse_scenario(*builtin_scenario(name)); }

Matrix one(double x) { return Matrix::Constant(1, 1, x); }

}  // namespace

TEST_CASE("settling time bound examples") {
  CHECK(settling_time_bound(0.0, 1.0, 0.5) == 0.0);
  CHECK(settling_time_bound(4.0, 1.0, 0.5) == doctest::Approx(4.0));
  CHECK(settling_time_bound(8.0, 2.0, 2.0 / 3.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(settling_time_bound(1.0, 0.0, 0.5), Error);
  CHECK_THROWS_AS(settling_time_bound(1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(settling_time_bound(-1.0, 1.0, 0.5), Error);
}

TEST_CASE("scalar finite-time example reaches zero at t = 1") {
  const auto r = finite_time_oracle(one(1.0), 1.0, VelocityProfile::constant(vec({0})), vec({1.0}));
  CHECK(r.v0 == doctest::Approx(0.5));
  CHECK(r.kappa == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.bound == doctest::Approx(1.0));
  CHECK(r.settled);
  CHECK(r.settle_time == doctest::Approx(1.0).epsilon(0.02));
  CHECK(r.within);
}

TEST_CASE("finite-time oracle from the origin") {
  const auto r = finite_time_oracle(one(2.0), 1.0, VelocityProfile::constant(vec({0.5})), vec({0.0}));
  CHECK(r.bound == 0.0);
  CHECK(r.settle_time == 0.0);
  CHECK(r.within);
}

TEST_CASE("finite-time oracle hypotheses") {
  try {
    finite_time_oracle(one(1.0), 1.0, VelocityProfile::constant(vec({1.0})), vec({1.0}));
    FAIL("expected hypothesis error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kHypothesisViolated);
  }
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(finite_time_oracle(indefinite, 1.0, VelocityProfile::constant(vec({0})), vec({1, 1})),
                  Error);
  CHECK_THROWS_AS(finite_time_oracle(one(1.0), 1.0, VelocityProfile::constant(vec({0, 0})), vec({1.0})),
                  Error);
}

TEST_CASE("property: finite-time bound holds on random instances") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const int m = 2 + trial % 3;
    const Matrix r = fixtures::random_matrix(rng, 2 * m, 2 * m);
    const Matrix a = r * r.transpose() + 0.5 * Matrix::Identity(2 * m, 2 * m);
    const double k = 1.0 + 2.0 * u(rng);
    const VelocityProfile d = VelocityProfile::sinusoidal(Vector::Zero(2), vec({0.5 * k, 0.0}), 1.0, u(rng));
    const Vector x0 = fixtures::random_matrix(rng, 2 * m, 1, 2.0);
    FiniteTimeOptions opts;
    opts.max_time = 20.0;
    const auto res = finite_time_oracle(a, k, d, x0, opts);
    CHECK(res.settled);
    CHECK(res.within);
    CHECK(res.xi == doctest::Approx(0.5 * k));
  }
}

TEST_CASE("decay rate fit") {
  std::vector<double> t, v;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.1 * k);
    v.push_back(3.0 * std::exp(-0.7 * t.back()));
  }
  CHECK(fit_decay_rate(t, v, 0.0, 10.0) == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(fit_decay_rate(t, v, 2.0, 5.0) == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(std::isnan(fit_decay_rate(t, v, 20.0, 30.0)));
  v[50] = 0.0;
  CHECK(fit_decay_rate(t, v, 0.0, 10.0) == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("sliding variable settles within the bound on a short law A run") {
  ScenarioConfig cfg = builtin("sim1");
  cfg.integrator.duration = 5.0;
  cfg.output.decimation = 1;
  const SimulationSetup setup = make_setup(cfg);
  const Trace trace = simulate(setup);
  const SettlingCheck c = sliding_settling_check(trace, setup.spec, setup.gains);
  CHECK(c.settled);
  CHECK(c.within);
  CHECK(c.threshold == doctest::Approx(10 * cfg.gains.k2 * cfg.integrator.step));
  CHECK(c.settle_time < c.bound);
}

TEST_CASE("short runs are inconclusive") {
  ScenarioConfig cfg = builtin("sim1");
  cfg.integrator.duration = 5.0;
  const RunResult r = run_scenario(cfg);
  CHECK(r.report.verdict == Verdict::kInconclusive);
  CHECK_FALSE(r.report.reasons.empty());
}

TEST_CASE("literal estimator is reported as a failure") {
  ScenarioConfig cfg = builtin("sim2");
  cfg.controller.estimator_form = EstimatorForm::kSignFlipped;
  cfg.integrator.duration = 12.0;
  const RunResult r = run_scenario(cfg);
  CHECK(r.report.verdict == Verdict::kFail);
  CHECK(r.report.estimator_divergence);
  CHECK(r.report.estimator_growth > 10.0);
}

TEST_CASE("verdict names") {
  CHECK(verdict_name(Verdict::kPass) == "PASS");
  CHECK(verdict_name(Verdict::kFail) == "FAIL");
  CHECK(verdict_name(Verdict::kInconclusive) == "INCONCLUSIVE");
}
