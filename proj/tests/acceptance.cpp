// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "bft/output.hpp"
#include "fixtures.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace bft;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

ScenarioConfig builtin(const char* name) { return parse_scenario(*builtin_scenario(name)); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vector stack(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Outcome follower_block_and_rank() {
  const auto t0 = Clock::now();
  const ScenarioConfig cfg = builtin("sim1");
  const auto block = check_follower_block(cfg.formation);
  const Matrix p = solve_desired_positions(cfg.formation).positions;
  const auto rig = check_infinitesimal_bearing_rigidity(cfg.formation, p);
  const double dt = seconds_since(t0);
  const bool pass = block.min_eigenvalue > 0.0 && rig.rank == 7 && rig.expected_rank == 7 && dt < 1.0;
  return {pass, fmt("lambda_min(B_ff)=%.4g rank(B)=%d (required 7) runtime=%.3fs", block.min_eigenvalue,
                    rig.rank, dt)};
}

Outcome localization() {
  const ScenarioConfig cfg = builtin("sim1");
  const Matrix p = solve_desired_positions(cfg.formation).positions;
  const double err = (p.rightCols(3) - fixtures::expected_followers()).cwiseAbs().maxCoeff();
  // Dense oracle on an independently assembled bearing Laplacian.
  const Matrix b = fixtures::reference_bearing_laplacian(cfg.formation);
  const Vector pf =
      b.bottomRightCorner(6, 6).fullPivLu().solve(-b.bottomLeftCorner(6, 4) * stack(cfg.formation.leader_positions));
  const double oracle = (stack(p.rightCols(3)) - pf).cwiseAbs().maxCoeff();
  return {err <= 1e-8 && oracle <= 1e-8, fmt("max|p*-expected|=%.2e max|p*-dense|=%.2e", err, oracle)};
}

Outcome golden(const char* name, bool estimator) {
  double worst_pos = 0, worst_bear = 0, worst_vel = 0, worst_est = 0, worst_time = 0;
  bool pass = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioConfig cfg = builtin(name);
    cfg.initial.seed = seed;
    const auto t0 = Clock::now();
    const RunResult r = run_scenario(cfg);
    const double dt = seconds_since(t0);
    const auto& rep = r.report;
    worst_pos = std::max(worst_pos, rep.max_position_error);
    worst_bear = std::max(worst_bear, rep.max_bearing_error);
    worst_vel = std::max(worst_vel, rep.max_velocity_error);
    worst_est = std::max({worst_est, rep.max_gamma, rep.max_delta});
    worst_time = std::max(worst_time, dt);
    pass = pass && rep.termination == Termination::kCompleted && rep.max_position_error <= 1e-3 &&
           rep.max_bearing_error <= 1e-4 && rep.max_velocity_error <= 1e-2 && dt < 30.0;
    if (estimator) pass = pass && rep.max_gamma <= 1e-4 && rep.max_delta <= 1e-4;
  }
  std::string d = fmt("5 seeds: pos=%.2e bearing=%.2e vel=%.2e", worst_pos, worst_bear, worst_vel);
  if (estimator) d += fmt(" gamma/delta=%.2e", worst_est);
  d += fmt(" slowest=%.2fs", worst_time);
  return {pass, d};
}

Outcome sliding_bound() {
  ScenarioConfig cfg = builtin("sim1");
  cfg.output.decimation = 1;
  cfg.integrator.duration = 10.0;
  const SimulationSetup setup = make_setup(cfg);
  const Trace trace = simulate(setup);
  const SettlingCheck c = sliding_settling_check(trace, setup.spec, setup.gains);
  return {c.settled && c.within,
          fmt("settle=%.3fs bound=%.2fs slack=%.3fs threshold=%.3g kappa=%.4g", c.settle_time, c.bound,
              c.slack, c.threshold, c.kappa)};
}

Outcome finite_time_suite() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int ok = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 4;
    const int n = 2 * m;
    const Matrix r = fixtures::random_matrix(rng, n, n);
    const Matrix a = r * r.transpose() + (0.2 + u(rng)) * Matrix::Identity(n, n);
    const double k = 0.5 + 2.0 * u(rng);
    const Vector amp = fixtures::random_unit(rng, 2) * (0.9 * k * u(rng));
    const VelocityProfile d = VelocityProfile::sinusoidal(Vector::Zero(2), amp, 0.5 + 2 * u(rng), 6 * u(rng));
    const Vector x0 = fixtures::random_matrix(rng, n, 1, 3.0);
    FiniteTimeOptions opts;
    opts.max_time = 100.0;
    const auto res = finite_time_oracle(a, k, d, x0, opts);
    if (res.within) ++ok;
    if (res.bound > 0) worst_ratio = std::max(worst_ratio, res.settle_time / (res.bound + res.slack));
  }
  return {ok == 20, fmt("%d/20 settled within bound+band, max settle/(bound+band)=%.3f", ok, worst_ratio)};
}

Outcome stacked_equivalence() {
  const ScenarioConfig cfg = builtin("sim1");
  const FormationSpec& spec = cfg.formation;
  const TargetTrajectory traj(solve_desired_positions(spec), cfg.profile);
  const FormationSystem sys(spec, traj, cfg.gains, Law::kDirect, {}, 1e-9);
  const auto b = build_bearing_laplacian(spec);
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double t = 30.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    SwarmState s;
    s.position = target_at(traj, t);
    s.position.rightCols(3) += fixtures::random_matrix(rng, 2, 3, 3.0);
    s.velocity.resize(2, 5);
    for (int i = 0; i < 5; ++i) s.velocity.col(i) = cfg.profile.velocity(t);
    s.velocity.rightCols(3) += fixtures::random_matrix(rng, 2, 3, 3.0);
    const Matrix pstar = target_at(traj, t);
    const Vector phi_stacked = b.ff * stack(s.position.rightCols(3) - pstar.rightCols(3));
    const Vector dv = stack(s.velocity.rightCols(3)) - stack(s.velocity.leftCols(1).replicate(1, 3));
    const Vector s_stacked = b.ff * dv + cfg.gains.k1 * phi_stacked;
    for (int i = 2; i < 5; ++i) {
      const DirectLawView view = sys.direct_view(i, s);
      std::vector<RelativeTerm> pos_only = view.neighbors;
      for (auto& term : pos_only) term.rel_velocity.setZero();
      const Vector phi_i = sliding_variable(pos_only, 1.0);
      const Vector s_i = sliding_variable_a(view, cfg.gains);
      worst = std::max(worst, (phi_i - phi_stacked.segment(2 * (i - 2), 2)).cwiseAbs().maxCoeff());
      worst = std::max(worst, (s_i - s_stacked.segment(2 * (i - 2), 2)).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-10, fmt("100 states: max |local - stacked| = %.2e", worst)};
}

Outcome estimator_eigenvalues() {
  const ScenarioConfig cfg = builtin("sim2");
  const auto ev = estimator_error_eigenvalues(cfg.formation, cfg.gains);
  const auto evl = estimator_error_eigenvalues(cfg.formation, cfg.gains, EstimatorForm::kSignFlipped);
  const double max_re = ev.real().maxCoeff();
  const double max_re_literal = evl.real().maxCoeff();
  ScenarioConfig lit = cfg;
  lit.controller.estimator_form = EstimatorForm::kSignFlipped;
  lit.integrator.duration = 5.0;
  const Trace trace = simulate(make_setup(lit));
  auto err = [](const TraceSample& s) { return std::hypot(s.metrics.gamma_norm, s.metrics.delta_norm); };
  const double growth = err(trace.samples.back()) / err(trace.samples.front());
  const bool pass = max_re < 0 && max_re_literal > 0 && trace.samples.back().time >= 5.0 - 1e-9 &&
                    growth >= 10.0;
  return {pass, fmt("max Re(corrected)=%.4f max Re(literal)=%.4f literal growth over 5s=%.1fx", max_re,
                    max_re_literal, growth)};
}

Outcome invariance() {
  // Fine step keeps the chattering band (which scales with h) below the threshold.
  std::string d;
  bool pass = true;
  for (const char* name : {"sim1", "sim2"}) {
    ScenarioConfig cfg = builtin(name);
    cfg.initial.on_target = true;
    cfg.integrator.step = 5e-5;
    cfg.output.decimation = 100;
    const auto t0 = Clock::now();
    const Trace trace = simulate(make_setup(cfg));
    const double dt = seconds_since(t0);
    double pos = 0, bear = 0, vel = 0, est = 0;
    for (const auto& s : trace.samples) {
      pos = std::max(pos, s.metrics.max_position_error());
      bear = std::max(bear, s.metrics.max_bearing_error());
      vel = std::max(vel, s.metrics.max_velocity_error());
      est = std::max({est, s.metrics.gamma_norm, s.metrics.delta_norm});
    }
    pass = pass && trace.termination == Termination::kCompleted && trace.samples.back().time >= 30.0 - 1e-9 &&
           pos <= 1e-6 && bear <= 1e-6 && est <= 1e-6;
    d += fmt("%s: pos=%.2e bearing=%.2e gamma/delta=%.2e (velocity %.2e, not asserted) %.1fs; ", name, pos,
             bear, est, vel, dt);
  }
  d += "h=5e-5";
  return {pass, d};
}

Outcome determinism() {
  bool pass = true;
  for (const char* name : {"sim1", "sim2"}) {
    ScenarioConfig cfg = builtin(name);
    cfg.initial.seed = 7;
    const std::string a = summary_json(cfg, run_scenario(cfg));
    const std::string b = summary_json(cfg, run_scenario(cfg));
    pass = pass && a == b && !a.empty();
  }
  return {pass, "two runs per law with seed 7: summary JSON byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"follower block positive definite, rank(B)=7, <1s", follower_block_and_rank},
      {"desired follower positions to 1e-8", localization},
      {"law A golden scenario, 5 seeds", [] { return golden("sim1", false); }},
      {"law B golden scenario, 5 seeds", [] { return golden("sim2", true); }},
      {"sliding variable settles within the finite-time bound", sliding_bound},
      {"finite-time oracle, 20 random instances", finite_time_suite},
      {"stacked and per-agent sliding/phi agree to 1e-10", stacked_equivalence},
      {"estimator error eigenvalues and sign-flipped divergence", estimator_eigenvalues},
      {"on-target invariance for 30 s, both laws", invariance},
      {"bit-identical summaries", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
