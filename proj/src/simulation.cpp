#include "bft/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace bft {
namespace {

constexpr int kLawABlocks = 2;
constexpr int kLawBBlocks = 6;

// Portable uniform draw in [-1, 1): mt19937_64 is fully specified, the
// standard distributions are not.
double symmetric_unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

Matrix random_box(std::mt19937_64& rng, const Matrix& centers, double half_width) {
  Matrix out = centers;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, j) += half_width * symmetric_unit(rng);
  }
  return out;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

double MetricsSample::max_position_error() const { return max_of(position_error); }
double MetricsSample::max_bearing_error() const { return max_of(bearing_error); }
double MetricsSample::max_velocity_error() const { return max_of(velocity_error); }

MetricsSample compute_metrics(const SwarmState& state, double t, const FormationSpec& spec,
                              const TargetTrajectory& target, const Vector& sliding,
                              double collision_epsilon) {
  const int n = spec.agents;
  const int l = spec.leaders;
  const Matrix desired = target.positions_at(t);
  const Vector vc = target.profile().velocity(t);

  MetricsSample m;
  m.position_error.resize(n);
  for (int i = 0; i < n; ++i) {
    m.position_error[i] = (state.position.col(i) - desired.col(i)).squaredNorm();
  }
  m.bearing_error.reserve(spec.edges.size());
  for (const Edge& e : spec.edges) {
    const Vector diff = state.position.col(e.to) - state.position.col(e.from);
    const double dist = diff.norm();
    if (!(dist > collision_epsilon)) {
      m.collision = true;
      m.bearing_error.push_back(4.0);
      continue;
    }
    m.bearing_error.push_back((diff / dist - e.bearing).squaredNorm());
  }
  m.velocity_error.resize(n - l);
  double phi_sq = 0.0;
  for (int i = l; i < n; ++i) {
    m.velocity_error[i - l] = (state.velocity.col(i) - vc).norm();
    Vector phi = Vector::Zero(spec.dimension);
    for (const Edge& e : spec.edges) {
      if (e.from != i) continue;
      phi += project(e.bearing, state.position.col(i) - state.position.col(e.to));
    }
    phi_sq += phi.squaredNorm();
  }
  m.phi_norm = std::sqrt(phi_sq);
  if (sliding.size() > 0) {
    m.sliding_norm = sliding.norm();
    m.sliding_inf_norm = sliding.lpNorm<Eigen::Infinity>();
  }

  if (state.has_estimator() && n > l) {
    const auto f = n - l;
    m.gamma_norm = (state.position.rightCols(f) - state.est_position.rightCols(f)).norm();
    m.delta_norm = (state.velocity.rightCols(f) - state.est_velocity.rightCols(f)).norm();
    m.ref_position_error = (state.ref_position.rightCols(f) - desired.rightCols(f)).norm();
    m.ref_velocity_error = (state.ref_velocity.rightCols(f).colwise() - vc).norm();
  }
  return m;
}

FormationSystem::FormationSystem(FormationSpec spec, TargetTrajectory target, GainSet gains,
                                 Law law, ControllerOptions controller, double collision_epsilon)
    : spec_(std::move(spec)),
      target_(std::move(target)),
      gains_(gains),
      law_(law),
      controller_(controller),
      collision_epsilon_(collision_epsilon) {
  out_edges_.resize(spec_.agents);
  for (int i = 0; i < spec_.agents; ++i) out_edges_[i] = spec_.outgoing(i);
}

int FormationSystem::block_size() const {
  return spec_.dimension * (law_ == Law::kDirect ? kLawABlocks : kLawBBlocks);
}

int FormationSystem::state_size() const { return block_size() * spec_.followers(); }

int FormationSystem::agent_of(int index) const { return spec_.leaders + index / block_size(); }

Vector FormationSystem::pack(const SwarmState& s) const {
  const int d = spec_.dimension;
  const int l = spec_.leaders;
  Vector x(state_size());
  for (int k = 0; k < spec_.followers(); ++k) {
    const int i = l + k;
    auto block = x.segment(k * block_size(), block_size());
    block.segment(0, d) = s.position.col(i);
    block.segment(d, d) = s.velocity.col(i);
    if (law_ == Law::kEstimator) {
      block.segment(2 * d, d) = s.est_position.col(i);
      block.segment(3 * d, d) = s.est_velocity.col(i);
      block.segment(4 * d, d) = s.ref_position.col(i);
      block.segment(5 * d, d) = s.ref_velocity.col(i);
    }
  }
  return x;
}

SwarmState FormationSystem::unpack(double t, const Vector& x) const {
  const int d = spec_.dimension;
  const int n = spec_.agents;
  const int l = spec_.leaders;
  const Vector vc = target_.profile().velocity(t);
  const Matrix leaders = target_.positions_at(t).leftCols(l);

  SwarmState s;
  s.position.resize(d, n);
  s.velocity.resize(d, n);
  s.position.leftCols(l) = leaders;
  s.velocity.leftCols(l) = vc.replicate(1, l);
  const bool est = law_ == Law::kEstimator;
  if (est) {
    s.est_position = s.position;
    s.est_velocity = s.velocity;
    s.ref_position = s.position;
    s.ref_velocity = s.velocity;
  }
  for (int k = 0; k < spec_.followers(); ++k) {
    const int i = l + k;
    auto block = x.segment(k * block_size(), block_size());
    s.position.col(i) = block.segment(0, d);
    s.velocity.col(i) = block.segment(d, d);
    if (est) {
      s.est_position.col(i) = block.segment(2 * d, d);
      s.est_velocity.col(i) = block.segment(3 * d, d);
      s.ref_position.col(i) = block.segment(4 * d, d);
      s.ref_velocity.col(i) = block.segment(5 * d, d);
    }
  }
  return s;
}

DirectLawView FormationSystem::direct_view(int agent, const SwarmState& s) const {
  DirectLawView view;
  view.velocity = s.velocity.col(agent);
  for (int k : out_edges_[agent]) {
    const Edge& e = spec_.edges[k];
    view.neighbors.push_back({e.bearing, s.position.col(e.to) - s.position.col(agent),
                              s.velocity.col(e.to) - s.velocity.col(agent)});
  }
  return view;
}

EstimatorLawView FormationSystem::estimator_view(int agent, const SwarmState& s) const {
  auto states_of = [&s](int j) {
    return EstimatorStates{s.est_position.col(j), s.est_velocity.col(j), s.ref_position.col(j),
                           s.ref_velocity.col(j)};
  };
  EstimatorLawView view;
  view.velocity = s.velocity.col(agent);
  view.own = states_of(agent);
  for (int k : out_edges_[agent]) {
    const Edge& e = spec_.edges[k];
    view.neighbors.push_back({e.bearing, s.position.col(e.to) - s.position.col(agent),
                              s.velocity.col(e.to) - s.velocity.col(agent), states_of(e.to)});
  }
  return view;
}

void FormationSystem::check_collisions(double t, const Matrix& positions) const {
  if (collision_epsilon_ <= 0.0) return;
  for (const Edge& e : spec_.edges) {
    const double dist = (positions.col(e.to) - positions.col(e.from)).norm();
    if (dist < collision_epsilon_) {
      std::ostringstream os;
      os << "collision between agents " << e.from + 1 << " and " << e.to + 1 << " (distance "
         << dist << " < " << collision_epsilon_ << ") at t=" << t;
      throw SimulationError(ErrorCode::kCollision, os.str(), t, e.from);
    }
  }
}

Vector FormationSystem::derivative(double t, const Vector& x) const {
  const int d = spec_.dimension;
  const int l = spec_.leaders;
  const SwarmState s = unpack(t, x);
  check_collisions(t, s.position);

  Vector dx(state_size());
  for (int k = 0; k < spec_.followers(); ++k) {
    const int i = l + k;
    auto block = dx.segment(k * block_size(), block_size());
    block.segment(0, d) = s.velocity.col(i);
    if (law_ == Law::kDirect) {
      block.segment(d, d) = control_a(direct_view(i, s), gains_, controller_);
      continue;
    }
    const EstimatorLawView view = estimator_view(i, s);
    const ReferenceStep ref = reference_generator_step_b(view, gains_, controller_);
    const Vector u = ref.u_bar + gains_.k1 * (view.own.ref_position - view.own.est_position) +
                     gains_.k2 * (view.own.ref_velocity - view.own.est_velocity);
    const EstimatorStep est = estimator_step_b(view, u, gains_, controller_);
    block.segment(d, d) = u;
    block.segment(2 * d, d) = est.d_est_position;
    block.segment(3 * d, d) = est.d_est_velocity;
    block.segment(4 * d, d) = ref.d_ref_position;
    block.segment(5 * d, d) = ref.d_ref_velocity;
  }
  return dx;
}

Vector FormationSystem::advance(double t, const Vector& x, const IntegratorConfig& cfg) const {
  const Rhs rhs = [this](double time, const Vector& y) { return derivative(time, y); };
  Vector next = step(x, t, cfg.step, cfg.scheme, rhs);
  for (Eigen::Index idx = 0; idx < next.size(); ++idx) {
    if (!std::isfinite(next(idx)) || std::abs(next(idx)) > cfg.max_abs_state) {
      const int agent = agent_of(static_cast<int>(idx));
      std::ostringstream os;
      os << "numerical blow-up: state of agent " << agent + 1 << " reached " << next(idx)
         << " at t=" << t + cfg.step;
      throw SimulationError(ErrorCode::kNumericalBlowup, os.str(), t + cfg.step, agent);
    }
  }
  return next;
}

FormationSystem::Controls FormationSystem::controls(double, const SwarmState& s) const {
  const int d = spec_.dimension;
  const int l = spec_.leaders;
  const int f = spec_.followers();
  Controls out{Vector(d * f), Vector(d * f)};
  for (int k = 0; k < f; ++k) {
    const int i = l + k;
    if (law_ == Law::kDirect) {
      const DirectLawView view = direct_view(i, s);
      out.sliding.segment(k * d, d) = sliding_variable_a(view, gains_);
      out.input.segment(k * d, d) = control_a(view, gains_, controller_);
    } else {
      const EstimatorLawView view = estimator_view(i, s);
      out.sliding.segment(k * d, d) = reference_generator_step_b(view, gains_, controller_).s;
      out.input.segment(k * d, d) = control_b(view, gains_, controller_);
    }
  }
  return out;
}

SwarmState initial_state(const SimulationSetup& setup, const TargetTrajectory& target) {
  const FormationSpec& spec = setup.spec;
  const int d = spec.dimension;
  const int n = spec.agents;
  const int l = spec.leaders;
  const int f = n - l;
  const InitialCondition& ic = setup.initial;
  const Matrix desired = target.positions_at(0.0);
  const Vector vc = target.profile().velocity(0.0);
  std::mt19937_64 rng(ic.seed);

  SwarmState s;
  s.position = desired;
  s.velocity = vc.replicate(1, n);
  if (!ic.on_target) {
    if (ic.follower_positions) {
      if (ic.follower_positions->rows() != d || ic.follower_positions->cols() != f) {
        throw Error(ErrorCode::kConfig, "explicit follower positions must be d x f");
      }
      s.position.rightCols(f) = *ic.follower_positions;
    } else {
      s.position.rightCols(f) = random_box(rng, desired.rightCols(f), ic.box_half_width);
    }
    s.velocity.rightCols(f).setZero();
    if (ic.follower_velocities) {
      if (ic.follower_velocities->rows() != d || ic.follower_velocities->cols() != f) {
        throw Error(ErrorCode::kConfig, "explicit follower velocities must be d x f");
      }
      s.velocity.rightCols(f) = *ic.follower_velocities;
    }
  }

  if (setup.law == Law::kEstimator) {
    s.est_position = s.position;
    s.est_velocity = s.velocity;
    s.ref_position = s.position;
    s.ref_velocity = s.velocity;
    if (ic.on_target) {
      s.ref_position = desired;
    } else {
      // Estimates start from an independent draw; the reference generator
      // starts from the estimate at rest.
      s.est_position.rightCols(f) = random_box(rng, desired.rightCols(f), ic.box_half_width);
      s.est_velocity.rightCols(f).setZero();
      s.ref_position.rightCols(f) = s.est_position.rightCols(f);
      s.ref_velocity.rightCols(f).setZero();
    }
  }
  return s;
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::kCompleted: return "completed";
    case Termination::kCollision: return "collision";
    case Termination::kBlowup: return "numerical-blowup";
  }
  return "unknown";
}

Trace simulate(const SimulationSetup& setup) {
  require_valid(setup.spec);
  require_valid_gains(setup.gains, setup.law);
  {
    auto v = validate_integrator(setup.integrator);
    if (!v.empty()) throw Error(ErrorCode::kConfig, "invalid integrator: " + v.front());
  }
  if (setup.decimation < 1) throw Error(ErrorCode::kConfig, "decimation must be >= 1");

  TargetTrajectory target(solve_desired_positions(setup.spec), setup.profile);
  FormationSystem system(setup.spec, target, setup.gains, setup.law, setup.controller,
                         setup.integrator.collision_epsilon);
  const IntegratorConfig& cfg = setup.integrator;

  Trace trace;
  trace.law = setup.law;
  trace.dimension = setup.spec.dimension;
  trace.agents = setup.spec.agents;
  trace.leaders = setup.spec.leaders;
  trace.edges = setup.spec.edges;
  trace.step = cfg.step;
  trace.duration = cfg.duration;
  trace.decimation = setup.decimation;
  const std::int64_t steps = cfg.step_count();
  trace.samples.reserve(static_cast<std::size_t>(steps / setup.decimation + 1));

  auto record = [&](double t, const Vector& x) {
    TraceSample sample;
    sample.time = t;
    sample.state = system.unpack(t, x);
    auto c = system.controls(t, sample.state);
    sample.sliding = std::move(c.sliding);
    sample.input = std::move(c.input);
    sample.metrics = compute_metrics(sample.state, t, setup.spec, target, sample.sliding,
                                     cfg.collision_epsilon);
    trace.samples.push_back(std::move(sample));
  };

  Vector x = system.pack(initial_state(setup, target));
  record(0.0, x);
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double t0 = static_cast<double>(k - 1) * cfg.step;
    const double t1 = static_cast<double>(k) * cfg.step;
    try {
      x = system.advance(t0, x, cfg);
    } catch (const SimulationError& e) {
      trace.termination = e.code() == ErrorCode::kCollision ? Termination::kCollision
                                                             : Termination::kBlowup;
      trace.message = e.what();
      trace.termination_time = e.time();
      trace.termination_agent = e.agent();
      return trace;
    }
    if (k % setup.decimation == 0) record(t1, x);
  }
  trace.termination_time = static_cast<double>(steps) * cfg.step;
  return trace;
}

}  // namespace bft
