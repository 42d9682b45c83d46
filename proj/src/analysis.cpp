#include "bft/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bft {
namespace {

Matrix follower_laplacian_kron(const FormationSpec& spec) {
  const Matrix lff = build_laplacian(spec).follower_follower;
  const int d = spec.dimension;
  Matrix a = Matrix::Zero(lff.rows() * d, lff.cols() * d);
  for (Eigen::Index r = 0; r < lff.rows(); ++r) {
    for (Eigen::Index c = 0; c < lff.cols(); ++c) {
      a.block(r * d, c * d, d, d) = lff(r, c) * Matrix::Identity(d, d);
    }
  }
  return a;
}

std::optional<double> first_crossing(const Trace& trace, double threshold, auto metric) {
  for (const TraceSample& s : trace.samples) {
    if (metric(s.metrics) <= threshold) return s.time;
  }
  return std::nullopt;
}

// End of the exponential phase: first time after t_begin that the series
// comes within 10x of its final-window floor.
double decay_window_end(const std::vector<double>& times, const std::vector<double>& values,
                        double t_begin, double window_start) {
  double floor = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= window_start) floor = std::max(floor, values[k]);
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] > t_begin && values[k] <= 10.0 * floor) return times[k];
  }
  return window_start;
}

}  // namespace

double settling_time_bound(double v0, double kappa, double alpha) {
  if (!(kappa > 0.0) || !(alpha > 0.0 && alpha < 1.0) || !(v0 >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "settling_time_bound needs kappa > 0, alpha in (0,1), V0 >= 0");
  }
  return std::pow(v0, 1.0 - alpha) / (kappa * (1.0 - alpha));
}

FiniteTimeResult finite_time_oracle(const Matrix& a, double k, const VelocityProfile& disturbance,
                           const Vector& x0, const FiniteTimeOptions& options) {
  const int size = static_cast<int>(a.rows());
  const int m = disturbance.dimension();
  if (a.cols() != size || x0.size() != size || m == 0 || size % m != 0) {
    throw Error(ErrorCode::kInvalidArgument, "finite_time_oracle: size mismatch between A, x0, d");
  }
  if ((a - a.transpose()).norm() > 1e-12 * std::max(1.0, a.norm())) {
    throw Error(ErrorCode::kInvalidArgument, "finite_time_oracle: A must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  if (!(lmin > 0.0)) throw Error(ErrorCode::kInvalidArgument, "finite_time_oracle: A must be PD");
  const double sup_d = disturbance.speed_bound();
  if (!(sup_d < k)) {
    std::ostringstream os;
    os << "finite-time hypothesis violated: sup||d|| = " << sup_d << " >= k = " << k;
    throw Error(ErrorCode::kHypothesisViolated, os.str());
  }

  FiniteTimeResult r;
  r.xi = k - sup_d;
  // lambda_max(A^-1) = 1 / lambda_min(A)
  r.kappa = r.xi * std::sqrt(2.0 * lmin);
  r.v0 = 0.5 * x0.dot(a.llt().solve(x0));
  r.bound = settling_time_bound(r.v0, r.kappa, 0.5);
  const double a_inf = a.cwiseAbs().rowwise().sum().maxCoeff();
  r.threshold = options.threshold > 0.0 ? options.threshold
                                        : 10.0 * options.step * a_inf * (k + sup_d);
  r.slack = options.slack_steps * options.step;

  const int copies = size / m;
  const Rhs rhs = [&](double t, const Vector& x) -> Vector {
    const Vector d = disturbance.velocity(t);
    Vector drive = k * switching(x, 0.0);
    for (int c = 0; c < copies; ++c) drive.segment(c * m, m) += d;
    return -a * drive;
  };

  Vector x = x0;
  double t = 0.0;
  const auto steps = static_cast<std::int64_t>(std::floor(options.max_time / options.step));
  for (std::int64_t n = 0;; ++n) {
    if (x.lpNorm<Eigen::Infinity>() < r.threshold) {
      r.settled = true;
      r.settle_time = t;
      break;
    }
    if (n >= steps) break;
    x = step(x, t, options.step, options.scheme, rhs);
    t = static_cast<double>(n + 1) * options.step;
  }
  r.within = r.settled && r.settle_time <= r.bound + r.slack;
  return r;
}

SettlingCheck sliding_settling_check(const Trace& trace, const FormationSpec& spec,
                                     const GainSet& gains, double threshold_factor) {
  if (trace.samples.empty()) throw Error(ErrorCode::kInvalidArgument, "empty trace");
  const bool law_a = trace.law == Law::kDirect;
  const double damping = law_a ? gains.k1 : gains.k4;
  const double kswitch = law_a ? gains.k2 : gains.k5;
  const Matrix bff = build_bearing_laplacian(spec).ff;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(bff, Eigen::EigenvaluesOnly);

  SettlingCheck c;
  const double xi = kswitch - gains.delta2 - damping * gains.delta1;
  if (!(xi > 0.0)) throw Error(ErrorCode::kGainCondition, "settling check needs a valid gain");
  c.kappa = xi * std::sqrt(2.0 * eig.eigenvalues()(0));
  const Vector& s0 = trace.samples.front().sliding;
  c.v0 = 0.5 * s0.dot(bff.llt().solve(s0));
  c.bound = settling_time_bound(c.v0, c.kappa, 0.5);
  c.threshold = threshold_factor * kswitch * trace.step;
  c.slack = (10.0 + trace.decimation) * trace.step;
  for (const TraceSample& s : trace.samples) {
    if (s.metrics.sliding_inf_norm < c.threshold) {
      c.settled = true;
      c.settle_time = s.time;
      break;
    }
  }
  c.within = c.settled && c.settle_time <= c.bound + c.slack;
  return c;
}

Eigen::VectorXcd estimator_error_eigenvalues(const FormationSpec& spec, const GainSet& gains,
                                             EstimatorForm form) {
  const Matrix a = follower_laplacian_kron(spec);
  const Eigen::Index n = a.rows();
  const double sign = form == EstimatorForm::kCorrected ? -1.0 : 1.0;
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n) = Matrix::Identity(n, n);
  m.bottomLeftCorner(n, n) = sign * gains.k3 * a;
  m.bottomRightCorner(n, n) = sign * gains.k6 * a;
  Eigen::EigenSolver<Matrix> eig(m, false);
  return eig.eigenvalues();
}

double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                      double t_begin, double t_end) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = 0; k < times.size() && k < values.size(); ++k) {
    if (times[k] < t_begin || times[k] > t_end || !(values[k] > 0.0)) continue;
    const double y = std::log(values[k]);
    sx += times[k];
    sy += y;
    sxx += times[k] * times[k];
    sxy += times[k] * y;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -(count * sxy - sx * sy) / denom;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kInconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

ConvergenceReport convergence_report(const Trace& trace, const FormationSpec& spec,
                                     const GainSet& gains, const ReportPolicy& policy) {
  ConvergenceReport r;
  r.law = trace.law;
  r.termination = trace.termination;
  r.termination_message = trace.message;
  if (trace.samples.empty()) {
    r.verdict = Verdict::kInconclusive;
    r.reasons.push_back("trace has no samples");
    return r;
  }
  const bool law_b = trace.law == Law::kEstimator;
  r.final_time = trace.samples.back().time;
  r.window_start = r.final_time * (1.0 - policy.final_window_fraction);

  for (const TraceSample& s : trace.samples) {
    if (s.time < r.window_start) continue;
    const MetricsSample& m = s.metrics;
    r.max_position_error = std::max(r.max_position_error, m.max_position_error());
    r.max_bearing_error = std::max(r.max_bearing_error, m.max_bearing_error());
    r.max_velocity_error = std::max(r.max_velocity_error, m.max_velocity_error());
    r.max_sliding_norm = std::max(r.max_sliding_norm, m.sliding_norm);
    r.max_gamma = std::max(r.max_gamma, m.gamma_norm);
    r.max_delta = std::max(r.max_delta, m.delta_norm);
    r.max_ref_position_error = std::max(r.max_ref_position_error, m.ref_position_error);
    r.max_ref_velocity_error = std::max(r.max_ref_velocity_error, m.ref_velocity_error);
  }

  r.position_crossing = first_crossing(trace, policy.position_threshold,
                                       [](const MetricsSample& m) { return m.max_position_error(); });
  r.bearing_crossing = first_crossing(trace, policy.bearing_threshold,
                                      [](const MetricsSample& m) { return m.max_bearing_error(); });
  r.velocity_crossing = first_crossing(trace, policy.velocity_threshold,
                                       [](const MetricsSample& m) { return m.max_velocity_error(); });
  if (law_b) {
    r.estimator_crossing = first_crossing(trace, policy.estimator_threshold, [](const MetricsSample& m) {
      return std::max(m.gamma_norm, m.delta_norm);
    });
  }

  try {
    r.settling = sliding_settling_check(trace, spec, gains);
  } catch (const Error& e) {
    r.reasons.push_back(std::string("settling check skipped: ") + e.what());
  }
  {
    const double settle = r.settling && r.settling->settled ? r.settling->settle_time : r.final_time;
    int decreasing = 0;
    int total = 0;
    for (std::size_t k = 1; k < trace.samples.size() && trace.samples[k].time <= settle; ++k) {
      ++total;
      if (trace.samples[k].metrics.sliding_norm <= trace.samples[k - 1].metrics.sliding_norm) {
        ++decreasing;
      }
    }
    r.sliding_monotone_fraction = total > 0 ? static_cast<double>(decreasing) / total : 1.0;
  }

  std::vector<double> times, phi, gamma, delta;
  for (const TraceSample& s : trace.samples) {
    times.push_back(s.time);
    phi.push_back(s.metrics.phi_norm);
    gamma.push_back(s.metrics.gamma_norm);
    delta.push_back(s.metrics.delta_norm);
  }
  const double settled_at = r.settling && r.settling->settled ? r.settling->settle_time : 0.0;
  r.phi_rate = fit_decay_rate(times, phi, settled_at, decay_window_end(times, phi, settled_at, r.window_start));
  if (!law_b) r.phi_rate_expected = gains.k1;
  if (law_b) {
    const double t0 = 0.2 * r.final_time;
    r.gamma_rate = fit_decay_rate(times, gamma, t0, r.final_time);
    r.delta_rate = fit_decay_rate(times, delta, t0, r.final_time);
    const auto eig = estimator_error_eigenvalues(spec, gains);
    double max_re = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < eig.size(); ++k) max_re = std::max(max_re, eig(k).real());
    r.estimator_rate_expected = std::abs(max_re);

    const MetricsSample& first = trace.samples.front().metrics;
    const MetricsSample& last = trace.samples.back().metrics;
    const double initial = std::max({first.gamma_norm, first.delta_norm, 1e-12});
    const double final = std::max(last.gamma_norm, last.delta_norm);
    r.estimator_growth = final / initial;
    r.estimator_divergence = !(r.estimator_growth < policy.divergence_factor);
  }

  auto fail = [&](const std::string& why) {
    r.verdict = Verdict::kFail;
    r.reasons.push_back(why);
  };
  r.verdict = Verdict::kPass;
  if (trace.termination != Termination::kCompleted) {
    fail("run terminated early (" + termination_name(trace.termination) + "): " + trace.message);
  }
  if (r.estimator_divergence) {
    std::ostringstream os;
    os << "estimator error grew by a factor " << r.estimator_growth;
    fail(os.str());
  }
  if (r.verdict == Verdict::kFail) return r;
  if (r.final_time < policy.min_duration) {
    r.verdict = Verdict::kInconclusive;
    std::ostringstream os;
    os << "trace ends at t=" << r.final_time << " < minimum duration " << policy.min_duration;
    r.reasons.push_back(os.str());
    return r;
  }
  auto check = [&](const char* name, double value, double threshold) {
    if (!(value <= threshold)) {
      std::ostringstream os;
      os << name << " " << value << " exceeds " << threshold << " in the final window";
      fail(os.str());
    }
  };
  check("position error", r.max_position_error, policy.position_threshold);
  check("bearing error", r.max_bearing_error, policy.bearing_threshold);
  check("velocity error", r.max_velocity_error, policy.velocity_threshold);
  if (law_b) {
    check("estimator gamma", r.max_gamma, policy.estimator_threshold);
    check("estimator delta", r.max_delta, policy.estimator_threshold);
  }
  return r;
}

}  // namespace bft
