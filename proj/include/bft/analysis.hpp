#ifndef BFT_ANALYSIS_HPP
#define BFT_ANALYSIS_HPP

#include "bft/simulation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bft {

/// Settling-time bound T <= V0^(1-alpha) / (kappa (1-alpha)) for
/// dV/dt + kappa V^alpha <= 0. Requires kappa > 0, alpha in (0,1), V0 >= 0.
double settling_time_bound(double v0, double kappa, double alpha);

struct FiniteTimeOptions {
  double step = 1e-3;
  double max_time = 50.0;
  /// Settled once ||x||_inf drops below this. Non-positive selects
  /// 10 h ||A||_inf (k + sup||d||), which exceeds any single-step change.
  double threshold = 0.0;
  double slack_steps = 10.0;  // time slack for the discrete crossing
  Scheme scheme = Scheme::kRk4;
};

struct FiniteTimeResult {
  bool settled = false;
  double settle_time = 0.0;  // first time ||x||_inf < threshold
  double bound = 0.0;        // 2 sqrt(V0) / kappa
  double v0 = 0.0;           // 0.5 x0' A^-1 x0
  double xi = 0.0;           // k - sup||d||
  double kappa = 0.0;        // xi sqrt(2 / lambda_max(A^-1))
  double threshold = 0.0;
  double slack = 0.0;
  bool within = false;       // settled && settle_time <= bound + slack
};

/// Simulates dx/dt = -A (k sgn(x) + 1 (x) d(t)) from x0 and compares the
/// first settling time with the finite-time bound. `disturbance` supplies
/// d(t) and its exact sup-norm. Throws Error(kHypothesisViolated) when
/// sup||d|| >= k, and Error(kInvalidArgument) when A is not symmetric PD or
/// x0 does not stack copies of d.
FiniteTimeResult finite_time_oracle(const Matrix& a, double k, const VelocityProfile& disturbance,
                           const Vector& x0, const FiniteTimeOptions& options = {});

struct SettlingCheck {
  double v0 = 0.0;
  double kappa = 0.0;
  double bound = 0.0;
  double threshold = 0.0;  // 10 k_switch h
  double slack = 0.0;
  bool settled = false;
  double settle_time = 0.0;
  bool within = false;
};

/// Finite-time check of the stacked sliding variable recorded in `trace`
/// against the bound with A = B_ff, k = k2 (law A) or k5 (law B's reference
/// generator) and disturbance bound delta2 + k_damp delta1.
SettlingCheck sliding_settling_check(const Trace& trace, const FormationSpec& spec,
                                     const GainSet& gains, double threshold_factor = 10.0);

/// Eigenvalues of the estimator error matrix [0 I; -k3 A -k6 A] (or the
/// sign-flipped matrix produced by the literal estimator form), A = L_ff (x) I_d.
Eigen::VectorXcd estimator_error_eigenvalues(const FormationSpec& spec, const GainSet& gains,
                                             EstimatorForm form = EstimatorForm::kCorrected);

/// Least-squares decay rate r of values ~ C exp(-r t) over [t_begin, t_end].
/// Non-positive samples are skipped; returns NaN with fewer than two points.
double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                      double t_begin, double t_end);

enum class Verdict { kPass, kFail, kInconclusive };

std::string verdict_name(Verdict v);

struct ReportPolicy {
  double position_threshold = 1e-3;   // m^2
  double bearing_threshold = 1e-4;
  double velocity_threshold = 1e-2;   // m/s
  double estimator_threshold = 1e-4;  // ||gamma||, ||delta||
  double final_window_fraction = 0.1;
  double min_duration = 10.0;  // shorter completed runs are inconclusive
  double divergence_factor = 10.0;
};

struct ConvergenceReport {
  Verdict verdict = Verdict::kInconclusive;
  std::vector<std::string> reasons;
  Law law = Law::kDirect;
  Termination termination = Termination::kCompleted;
  std::string termination_message;
  double final_time = 0.0;
  double window_start = 0.0;

  // Final-window maxima.
  double max_position_error = 0.0;
  double max_bearing_error = 0.0;
  double max_velocity_error = 0.0;
  double max_sliding_norm = 0.0;
  double max_gamma = 0.0;
  double max_delta = 0.0;
  double max_ref_position_error = 0.0;
  double max_ref_velocity_error = 0.0;

  // First time each metric dropped under its threshold.
  std::optional<double> position_crossing;
  std::optional<double> bearing_crossing;
  std::optional<double> velocity_crossing;
  std::optional<double> estimator_crossing;

  /// Share of decreasing steps of ||s_F|| before the sliding variable settles.
  double sliding_monotone_fraction = 0.0;
  std::optional<SettlingCheck> settling;

  // Tail-window exponential rates, with the rate the analysis predicts.
  double phi_rate = 0.0;
  double phi_rate_expected = 0.0;
  double gamma_rate = 0.0;
  double delta_rate = 0.0;
  double estimator_rate_expected = 0.0;  // |max Re lambda(M)|

  double estimator_growth = 0.0;  // final / initial estimator error
  bool estimator_divergence = false;
};

ConvergenceReport convergence_report(const Trace& trace, const FormationSpec& spec,
                                     const GainSet& gains, const ReportPolicy& policy = {});

}  // namespace bft

#endif  // BFT_ANALYSIS_HPP
