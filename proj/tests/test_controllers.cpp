#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bft/analysis.hpp"
#include "bft/controllers.hpp"
#include "bft/simulation.hpp"
#include "fixtures.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <random>

using namespace bft;
using fixtures::vec;

namespace {

GainSet gains_a() {
  GainSet g;
  g.k1 = 0.5;
  g.k2 = 2.0;
  g.delta1 = std::sqrt(2.0);
  g.delta2 = 1.0;
  return g;
}

GainSet gains_b() {
  GainSet g;
  g.k1 = g.k2 = g.k3 = 1.0;
  g.k4 = 0.5;
  g.k5 = 2.0;
  g.k6 = 1.0;
  g.delta1 = std::sqrt(2.0);
  g.delta2 = 1.0;
  return g;
}

TargetTrajectory target() {
  return TargetTrajectory(solve_desired_positions(fixtures::five_agent()), fixtures::sinusoid_profile());
}

// Random state near the target, leaders exactly on it, law B leader columns
// following the broadcast convention.
SwarmState random_state(std::mt19937_64& rng, double t, bool estimator) {
  const TargetTrajectory traj = target();
  SwarmState s;
  s.position = target_at(traj, t);
  s.position.rightCols(3) += fixtures::random_matrix(rng, 2, 3, 0.4);
  s.velocity.resize(2, 5);
  for (int i = 0; i < 5; ++i) s.velocity.col(i) = traj.profile().velocity(t);
  s.velocity.rightCols(3) += fixtures::random_matrix(rng, 2, 3, 2.0);
  if (estimator) {
    s.est_position = s.position;
    s.est_velocity = s.velocity;
    s.ref_position = s.position;
    s.ref_velocity = s.velocity;
    s.est_position.rightCols(3) += fixtures::random_matrix(rng, 2, 3, 1.0);
    s.est_velocity.rightCols(3) += fixtures::random_matrix(rng, 2, 3, 1.0);
    s.ref_position.rightCols(3) += fixtures::random_matrix(rng, 2, 3, 1.0);
    s.ref_velocity.rightCols(3) += fixtures::random_matrix(rng, 2, 3, 1.0);
  }
  return s;
}

Vector stack(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

double max_real(const Eigen::VectorXcd& ev) {
  double m = -1e300;
  for (Eigen::Index k = 0; k < ev.size(); ++k) m = std::max(m, ev(k).real());
  return m;
}

}  // namespace

TEST_CASE("switching function") {
  CHECK(switching(0.0, 0.0) == 0.0);
  CHECK(switching(1e-300, 0.0) == 1.0);
  CHECK(switching(-3.0, 0.0) == -1.0);
  CHECK(switching(0.05, 0.1) == doctest::Approx(0.5));
  CHECK(switching(-0.3, 0.1) == -1.0);
  CHECK(switching(0.0, 0.1) == 0.0);
  CHECK((switching(vec({2, 0, -1}), 0.0) - vec({1, 0, -1})).norm() == 0.0);
}

TEST_CASE("law A on a hand-computed configuration") {
  // Follower at the origin, one neighbor along +x.
  DirectLawView view;
  view.velocity = vec({-3, -4});
  const Vector v_j = vec({2, -5});
  view.neighbors.push_back({vec({1, 0}), vec({1, 0}), v_j - view.velocity});
  const GainSet g = gains_a();
  CHECK((sliding_variable_a(view, g) - vec({0, 1})).norm() < 1e-15);
  CHECK((control_a(view, g) - vec({1.5, 0})).norm() < 1e-15);
}

TEST_CASE("law A sliding variable is zero on target") {
  // Round-off leaves |s| ~ 1e-16, so the input is checked under a boundary layer.
  ControllerOptions opts;
  opts.boundary_layer = 1e-3;
  const FormationSystem sys(fixtures::five_agent(), target(), gains_a(), Law::kDirect, opts, 1e-6);
  SwarmState s;
  s.position = target_at(sys.target(), 2.0);
  s.velocity.resize(2, 5);
  for (int i = 0; i < 5; ++i) s.velocity.col(i) = sys.target().profile().velocity(2.0);
  const auto c = sys.controls(2.0, s);
  CHECK(c.sliding.norm() < 1e-12);
  const Vector vc = sys.target().profile().velocity(2.0);
  for (int i = 0; i < 3; ++i) CHECK((c.input.segment(2 * i, 2) + 0.5 * vc).norm() < 1e-9);
}

TEST_CASE("gain conditions: law A boundary") {
  GainSet g = gains_a();
  g.k2 = g.delta2 + g.k1 * g.delta1;
  auto check = validate_gains(g, Law::kDirect);
  CHECK_FALSE(check.ok);
  REQUIRE(check.violations.size() == 1);
  CHECK(check.violations[0].rule.find("k2=") != std::string::npos);
  CHECK(check.margin == doctest::Approx(0.0));
  g.k2 = std::nextafter(g.k2, 10.0);
  CHECK(validate_gains(g, Law::kDirect).ok);
  CHECK_NOTHROW(require_valid_gains(gains_a(), Law::kDirect));
}

TEST_CASE("gain conditions: positivity and law B") {
  GainSet g = gains_a();
  g.k1 = 0.0;
  CHECK_FALSE(validate_gains(g, Law::kDirect).ok);
  CHECK_FALSE(validate_gains(gains_a(), Law::kEstimator).ok);
  CHECK(validate_gains(gains_b(), Law::kEstimator).ok);
  CHECK(validate_gains(gains_b(), Law::kEstimator).margin ==
        doctest::Approx(2.0 - 1.0 - 0.5 * std::sqrt(2.0)));
  GainSet b = gains_b();
  b.k5 = 1.5;
  b.k3 = -1.0;
  const auto check = validate_gains(b, Law::kEstimator);
  CHECK(check.violations.size() == 2);
  try {
    require_valid_gains(b, Law::kEstimator);
    FAIL("expected gain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGainCondition);
    CHECK(std::string(e.what()).find("k5=1.5") != std::string::npos);
    CHECK(std::string(e.what()).find("k3") != std::string::npos);
  }
  GainSet neg = gains_a();
  neg.delta1 = -1.0;
  CHECK_FALSE(validate_gains(neg, Law::kDirect).ok);
}

TEST_CASE("property: stacked sliding variable equals the bearing Laplacian form") {
  const FormationSpec spec = fixtures::five_agent();
  const FormationSystem sys(spec, target(), gains_a(), Law::kDirect, {}, 1e-6);
  const auto b = build_bearing_laplacian(spec);
  const Matrix bf = b.full.bottomRows(6);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = std::uniform_real_distribution<double>(0, 30)(rng);
    const SwarmState s = random_state(rng, t, false);
    const auto c = sys.controls(t, s);
    const Vector expected = bf * (stack(s.velocity) + 0.5 * stack(s.position));
    CHECK((c.sliding - expected).norm() < 1e-10);
    // phi_F = B_ff (p_F - p*_F) equals the follower rows of B applied to p.
    const Matrix pstar = target_at(sys.target(), t);
    const Vector phi = b.ff * stack(s.position.rightCols(3) - pstar.rightCols(3));
    CHECK((phi - bf * stack(s.position)).norm() < 1e-10);
    // Per-agent law agrees with the stacked controls.
    for (int i = 2; i < 5; ++i) {
      const Vector u = control_a(sys.direct_view(i, s), gains_a());
      CHECK((u - c.input.segment(2 * (i - 2), 2)).norm() < 1e-12);
    }
  }
}

TEST_CASE("property: estimator errors follow the linear error dynamics") {
  const FormationSpec spec = fixtures::five_agent();
  const GainSet g = gains_b();
  const FormationSystem sys(spec, target(), g, Law::kEstimator, {}, 1e-6);
  const Matrix lff = build_laplacian(spec).follower_follower;
  Matrix a = Matrix::Zero(6, 6);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a.block(2 * r, 2 * c, 2, 2) = lff(r, c) * Matrix::Identity(2, 2);
  }
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = std::uniform_real_distribution<double>(0, 30)(rng);
    const SwarmState s = random_state(rng, t, true);
    Vector gamma(6), delta(6), d_delta(6), d_gamma(6);
    for (int i = 2; i < 5; ++i) {
      const EstimatorLawView view = sys.estimator_view(i, s);
      const Vector u = control_b(view, g);
      const EstimatorStep est = estimator_step_b(view, u, g);
      const int k = 2 * (i - 2);
      gamma.segment(k, 2) = s.position.col(i) - s.est_position.col(i);
      delta.segment(k, 2) = s.velocity.col(i) - s.est_velocity.col(i);
      d_gamma.segment(k, 2) = s.velocity.col(i) - est.d_est_position;
      d_delta.segment(k, 2) = u - est.d_est_velocity;
    }
    CHECK((d_gamma - delta).norm() < 1e-12);
    CHECK((d_delta - (-g.k3 * a * gamma - g.k6 * a * delta)).norm() < 1e-10);
  }
}

TEST_CASE("estimator error eigenvalues match the per-mode quadratics") {
  const FormationSpec spec = fixtures::five_agent();
  const GainSet g = gains_b();
  const Eigen::VectorXcd ev = estimator_error_eigenvalues(spec, g);
  CHECK(ev.size() == 12);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(build_laplacian(spec).follower_follower);
  // Each eigenvalue mu of L_ff yields roots of x^2 + k6 mu x + k3 mu.
  double oracle = -1e300;
  for (Eigen::Index k = 0; k < 3; ++k) {
    const double mu = eig.eigenvalues()(k);
    const std::complex<double> disc = std::sqrt(std::complex<double>(g.k6 * g.k6 * mu * mu - 4 * g.k3 * mu));
    for (const auto root : {(-g.k6 * mu + disc) / 2.0, (-g.k6 * mu - disc) / 2.0}) {
      oracle = std::max(oracle, root.real());
      double best = 1e300;
      for (Eigen::Index m = 0; m < ev.size(); ++m) best = std::min(best, std::abs(ev(m) - root));
      CHECK(best < 1e-8);
    }
  }
  CHECK(max_real(ev) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(max_real(ev) == doctest::Approx(-0.393).epsilon(2e-3));
  CHECK(max_real(estimator_error_eigenvalues(spec, g, EstimatorForm::kSignFlipped)) > 0.0);
}

TEST_CASE("property: law B on matched estimates reduces to law A") {
  const FormationSpec spec = fixtures::five_agent();
  GainSet g = gains_b();
  g.k4 = 0.5;
  g.k5 = 2.0;
  const FormationSystem sys(spec, target(), g, Law::kEstimator, {}, 1e-6);
  const FormationSystem sys_a(spec, target(), gains_a(), Law::kDirect, {}, 1e-6);
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = std::uniform_real_distribution<double>(0, 30)(rng);
    SwarmState s = random_state(rng, t, true);
    s.est_position = s.ref_position = s.position;
    s.est_velocity = s.ref_velocity = s.velocity;
    for (int i = 2; i < 5; ++i) {
      const Vector ub = control_b(sys.estimator_view(i, s), g);
      const Vector ua = control_a(sys_a.direct_view(i, s), gains_a());
      CHECK((ub - ua).norm() < 1e-12);
    }
  }
}

TEST_CASE("views report neighbor offsets from the agent's own frame") {
  const FormationSpec spec = fixtures::five_agent();
  const FormationSystem sys(spec, target(), gains_a(), Law::kDirect, {}, 1e-6);
  std::mt19937_64 rng(2);
  const SwarmState s = random_state(rng, 1.0, false);
  const DirectLawView view = sys.direct_view(2, s);
  REQUIRE(view.neighbors.size() == 4);
  for (std::size_t k = 0; k < view.neighbors.size(); ++k) {
    const Edge& e = spec.edges[spec.outgoing(2)[k]];
    CHECK((view.neighbors[k].rel_position - (s.position.col(e.to) - s.position.col(2))).norm() == 0.0);
    CHECK((view.neighbors[k].rel_velocity - (s.velocity.col(e.to) - s.velocity.col(2))).norm() == 0.0);
  }
}
