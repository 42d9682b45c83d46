#ifndef BFT_CONTROLLERS_HPP
#define BFT_CONTROLLERS_HPP

#include "bft/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace bft {

/// Direct sliding-mode law (A) or estimator-based law (B).
enum class Law { kDirect, kEstimator };

std::string law_name(Law law);  // "A" / "B"

struct GainSet {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double k5 = 0.0;
  double k6 = 0.0;
  double delta1 = 0.0;  // sup ||v_c||
  double delta2 = 0.0;  // sup ||dv_c/dt||
};

struct GainViolation {
  std::string rule;  // human-readable inequality with numbers filled in
  double margin = 0.0;  // lhs - rhs; <= 0 means violated
};

struct GainCheck {
  bool ok = true;
  double margin = 0.0;  // margin of the law's switching-gain inequality
  std::vector<GainViolation> violations;
};

GainCheck validate_gains(const GainSet& gains, Law law);

/// Throws Error(kGainCondition) naming every violated inequality.
void require_valid_gains(const GainSet& gains, Law law);

enum class EstimatorForm {
  kCorrected,     // relative measurements enter with the sign that makes the error dynamics stable
  kSignFlipped,  // relative measurements enter as "+ p_j - p_i" and "+ v_j - v_i"; diverges
};

struct ControllerOptions {
  double boundary_layer = 0.0;  // 0 selects the pure signum
  EstimatorForm estimator_form = EstimatorForm::kCorrected;
};

/// sign(x) with sign(0) = 0, or clamp(x / eps, -1, 1) when eps > 0.
double switching(double x, double boundary_layer);
Vector switching(const Vector& s, double boundary_layer);

/// What agent i knows about one neighbor j: the desired bearing plus the
/// measured offsets p_j - p_i and v_j - v_i.
struct RelativeTerm {
  Vector bearing;
  Vector rel_position;
  Vector rel_velocity;
};

/// sum_j P_{g*_ij} (v_i - v_j + gain (p_i - p_j)), written in terms of the
/// neighbor-relative quantities.
Vector sliding_variable(std::span<const RelativeTerm> terms, double gain);

/// -damping * velocity - switching_gain * sgn(s).
Vector sliding_mode_input(const Vector& velocity, const Vector& s, double damping,
                          double switching_gain, double boundary_layer);

// ---- Law A ----------------------------------------------------------------

struct DirectLawView {
  Vector velocity;  // own velocity v_i
  std::vector<RelativeTerm> neighbors;
};

Vector sliding_variable_a(const DirectLawView& view, const GainSet& gains);
Vector control_a(const DirectLawView& view, const GainSet& gains,
                 const ControllerOptions& options = {});

// ---- Law B ----------------------------------------------------------------

/// Internal estimates held (and broadcast) by one agent. Leaders publish
/// est = ref = their position and est_velocity = ref_velocity = v_c.
struct EstimatorStates {
  Vector est_position;   // p-hat
  Vector est_velocity;   // v-hat
  Vector ref_position;   // p-bar
  Vector ref_velocity;   // v-bar
};

struct EstimatorNeighbor {
  Vector bearing;
  Vector rel_position;  // measured p_j - p_i
  Vector rel_velocity;  // measured v_j - v_i
  EstimatorStates communicated;
};

struct EstimatorLawView {
  Vector velocity;
  EstimatorStates own;
  std::vector<EstimatorNeighbor> neighbors;
};

struct ReferenceStep {
  Vector d_ref_position;
  Vector d_ref_velocity;  // equals u_bar
  Vector u_bar;
  Vector s;
};

/// Law A applied to the reference states (p-bar, v-bar) with gains (k4, k5).
ReferenceStep reference_generator_step_b(const EstimatorLawView& view, const GainSet& gains,
                                         const ControllerOptions& options = {});

Vector control_b(const EstimatorLawView& view, const GainSet& gains,
                 const ControllerOptions& options = {});

struct EstimatorStep {
  Vector d_est_position;
  Vector d_est_velocity;
};

/// Consensus estimator driven by the agent's own input u_i.
EstimatorStep estimator_step_b(const EstimatorLawView& view, const Vector& u,
                               const GainSet& gains, const ControllerOptions& options = {});

}  // namespace bft

#endif  // BFT_CONTROLLERS_HPP
