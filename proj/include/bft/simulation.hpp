#ifndef BFT_SIMULATION_HPP
#define BFT_SIMULATION_HPP

#include "bft/controllers.hpp"
#include "bft/formation.hpp"
#include "bft/integrator.hpp"
#include "bft/localization.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bft {

/// Snapshot of the whole swarm. All matrices are d x n with leader columns
/// included; the estimator/reference matrices are empty for law A. For law B
/// the leader columns follow the broadcast convention (p-hat = p-bar = p,
/// v-hat = v-bar = v_c).
struct SwarmState {
  Matrix position;
  Matrix velocity;
  Matrix est_position;
  Matrix est_velocity;
  Matrix ref_position;
  Matrix ref_velocity;

  bool has_estimator() const { return est_position.size() > 0; }
};

struct MetricsSample {
  std::vector<double> position_error;  // per agent, ||p_i - p*_i(t)||^2
  std::vector<double> bearing_error;   // per edge, ||g_ij - g*_ij||^2
  std::vector<double> velocity_error;  // per follower, ||v_i - v_c(t)||
  double sliding_norm = 0.0;           // ||s_F||
  double sliding_inf_norm = 0.0;       // ||s_F||_inf
  double phi_norm = 0.0;               // ||phi_F|| = ||B_ff (p_F - p*_F)||
  // Law B only (zero otherwise).
  double gamma_norm = 0.0;             // ||p_F - p-hat_F||
  double delta_norm = 0.0;             // ||v_F - v-hat_F||
  double ref_position_error = 0.0;     // ||p-bar_F - p*_F(t)||
  double ref_velocity_error = 0.0;     // ||v-bar_F - 1 (x) v_c||
  bool collision = false;              // some bearing was undefined

  double max_position_error() const;
  double max_bearing_error() const;
  double max_velocity_error() const;
};

/// Metrics of `state` against the moving target at time t. `sliding` is the
/// stacked follower sliding variable. Coincident neighbors flag the sample
/// and score that edge at the maximal bearing error 4.
MetricsSample compute_metrics(const SwarmState& state, double t, const FormationSpec& spec,
                              const TargetTrajectory& target, const Vector& sliding,
                              double collision_epsilon = 1e-12);

struct InitialCondition {
  std::uint64_t seed = 1;
  double box_half_width = 3.0;
  std::optional<Matrix> follower_positions;   // d x f
  std::optional<Matrix> follower_velocities;  // d x f
  bool on_target = false;  // start exactly on the moving target set
};

struct SimulationSetup {
  FormationSpec spec;
  VelocityProfile profile;
  GainSet gains;
  Law law = Law::kDirect;
  ControllerOptions controller;
  IntegratorConfig integrator;
  InitialCondition initial;
  int decimation = 1;
};

/// Closed-loop dynamics of followers (and their estimators) with leaders
/// driven by the closed-form target. The integration vector holds, per
/// follower, [p, v] for law A and [p, v, p-hat, v-hat, p-bar, v-bar] for B.
class FormationSystem {
 public:
  FormationSystem(FormationSpec spec, TargetTrajectory target, GainSet gains, Law law,
                  ControllerOptions controller, double collision_epsilon);

  const FormationSpec& spec() const { return spec_; }
  const TargetTrajectory& target() const { return target_; }
  Law law() const { return law_; }
  int block_size() const;  // per-follower entries in the integration vector
  int state_size() const;

  Vector pack(const SwarmState& state) const;
  SwarmState unpack(double t, const Vector& x) const;
  /// Follower owning entry `index` of the integration vector (0-based agent id).
  int agent_of(int index) const;

  /// Throws SimulationError(kCollision) if neighbors are closer than epsilon.
  Vector derivative(double t, const Vector& x) const;

  /// One integrator step from (t, x) with collision checks at every stage
  /// and a NaN/overflow guard naming the first offending agent.
  Vector advance(double t, const Vector& x, const IntegratorConfig& config) const;

  struct Controls {
    Vector sliding;  // stacked s_F (law B: the reference-generator s)
    Vector input;    // stacked u_F
  };
  Controls controls(double t, const SwarmState& state) const;

  /// Local information available to follower i; all the control laws see.
  DirectLawView direct_view(int agent, const SwarmState& state) const;
  EstimatorLawView estimator_view(int agent, const SwarmState& state) const;

 private:
  void check_collisions(double t, const Matrix& positions) const;

  FormationSpec spec_;
  TargetTrajectory target_;
  GainSet gains_;
  Law law_;
  ControllerOptions controller_;
  double collision_epsilon_;
  std::vector<std::vector<int>> out_edges_;
};

SwarmState initial_state(const SimulationSetup& setup, const TargetTrajectory& target);

enum class Termination { kCompleted, kCollision, kBlowup };

std::string termination_name(Termination t);

struct TraceSample {
  double time = 0.0;
  SwarmState state;
  Vector sliding;
  Vector input;
  MetricsSample metrics;
};

struct Trace {
  Law law = Law::kDirect;
  int dimension = 0;
  int agents = 0;
  int leaders = 0;
  std::vector<Edge> edges;
  double step = 0.0;
  double duration = 0.0;
  int decimation = 1;
  std::vector<TraceSample> samples;
  Termination termination = Termination::kCompleted;
  std::string message;
  double termination_time = 0.0;
  int termination_agent = -1;
};

/// Runs the closed loop. A step error (collision, blow-up) ends the run
/// early: the trace keeps every sample taken so far and records the error,
/// its time and the offending agent. Throws Error for invalid setups.
Trace simulate(const SimulationSetup& setup);

}  // namespace bft

#endif  // BFT_SIMULATION_HPP
