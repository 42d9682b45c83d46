#include "bft/controllers.hpp"

#include "bft/formation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bft {

std::string law_name(Law law) { return law == Law::kDirect ? "A" : "B"; }

GainCheck validate_gains(const GainSet& g, Law law) {
  GainCheck out;
  auto positive = [&](const char* name, double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      std::ostringstream os;
      os << "gain positivity: " << name << "=" << value << " must be > 0";
      out.violations.push_back({os.str(), value});
    }
  };
  auto nonnegative = [&](const char* name, double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      std::ostringstream os;
      os << "disturbance bound: " << name << "=" << value << " must be >= 0";
      out.violations.push_back({os.str(), value});
    }
  };
  nonnegative("delta1", g.delta1);
  nonnegative("delta2", g.delta2);

  auto switching_rule = [&](const char* law_label, const char* ks, double kswitch,
                            const char* kd, double kdamp) {
    const double rhs = g.delta2 + kdamp * g.delta1;
    out.margin = kswitch - rhs;
    if (!(kswitch > rhs)) {
      std::ostringstream os;
      os << "law " << law_label << " gain inequality: " << ks << "=" << kswitch << " <= delta2+"
         << kd << "*delta1=" << rhs;
      out.violations.push_back({os.str(), out.margin});
    }
  };

  if (law == Law::kDirect) {
    positive("k1", g.k1);
    positive("k2", g.k2);
    switching_rule("A", "k2", g.k2, "k1", g.k1);
  } else {
    positive("k1", g.k1);
    positive("k2", g.k2);
    positive("k3", g.k3);
    positive("k4", g.k4);
    positive("k5", g.k5);
    positive("k6", g.k6);
    switching_rule("B", "k5", g.k5, "k4", g.k4);
  }
  out.ok = out.violations.empty();
  return out;
}

void require_valid_gains(const GainSet& gains, Law law) {
  const auto check = validate_gains(gains, law);
  if (check.ok) return;
  std::string msg = "invalid gains:";
  for (const auto& v : check.violations) msg += "\n  - " + v.rule;
  throw Error(ErrorCode::kGainCondition, msg);
}

double switching(double x, double boundary_layer) {
  if (boundary_layer > 0.0) return std::clamp(x / boundary_layer, -1.0, 1.0);
  return static_cast<double>((x > 0.0) - (x < 0.0));
}

Vector switching(const Vector& s, double boundary_layer) {
  return s.unaryExpr([boundary_layer](double x) { return switching(x, boundary_layer); });
}

Vector sliding_variable(std::span<const RelativeTerm> terms, double gain) {
  if (terms.empty()) return {};
  Vector s = Vector::Zero(terms.front().bearing.size());
  for (const RelativeTerm& t : terms) {
    // v_i - v_j = -rel_velocity, p_i - p_j = -rel_position
    s -= project(t.bearing, t.rel_velocity + gain * t.rel_position);
  }
  return s;
}

Vector sliding_mode_input(const Vector& velocity, const Vector& s, double damping,
                          double switching_gain, double boundary_layer) {
  return -damping * velocity - switching_gain * switching(s, boundary_layer);
}

Vector sliding_variable_a(const DirectLawView& view, const GainSet& gains) {
  if (view.neighbors.empty()) return Vector::Zero(view.velocity.size());
  return sliding_variable(view.neighbors, gains.k1);
}

Vector control_a(const DirectLawView& view, const GainSet& gains,
                 const ControllerOptions& options) {
  const Vector s = sliding_variable_a(view, gains);
  return sliding_mode_input(view.velocity, s, gains.k1, gains.k2, options.boundary_layer);
}

ReferenceStep reference_generator_step_b(const EstimatorLawView& view, const GainSet& gains,
                                         const ControllerOptions& options) {
  std::vector<RelativeTerm> terms;
  terms.reserve(view.neighbors.size());
  for (const EstimatorNeighbor& nb : view.neighbors) {
    terms.push_back({nb.bearing, nb.communicated.ref_position - view.own.ref_position,
                     nb.communicated.ref_velocity - view.own.ref_velocity});
  }
  ReferenceStep out;
  out.s = terms.empty() ? Vector::Zero(view.velocity.size()) : sliding_variable(terms, gains.k4);
  out.u_bar = sliding_mode_input(view.own.ref_velocity, out.s, gains.k4, gains.k5,
                                 options.boundary_layer);
  out.d_ref_position = view.own.ref_velocity;
  out.d_ref_velocity = out.u_bar;
  return out;
}

Vector control_b(const EstimatorLawView& view, const GainSet& gains,
                 const ControllerOptions& options) {
  const ReferenceStep ref = reference_generator_step_b(view, gains, options);
  return ref.u_bar + gains.k1 * (view.own.ref_position - view.own.est_position) +
         gains.k2 * (view.own.ref_velocity - view.own.est_velocity);
}

EstimatorStep estimator_step_b(const EstimatorLawView& view, const Vector& u,
                               const GainSet& gains, const ControllerOptions& options) {
  const bool literal = options.estimator_form == EstimatorForm::kSignFlipped;
  Vector pos_term = Vector::Zero(view.velocity.size());
  Vector vel_term = Vector::Zero(view.velocity.size());
  for (const EstimatorNeighbor& nb : view.neighbors) {
    const Vector dp_hat = nb.communicated.est_position - view.own.est_position;
    const Vector dv_hat = nb.communicated.est_velocity - view.own.est_velocity;
    if (literal) {
      pos_term += dp_hat + nb.rel_position;
      vel_term += dv_hat + nb.rel_velocity;
    } else {
      pos_term += dp_hat - nb.rel_position;
      vel_term += dv_hat - nb.rel_velocity;
    }
  }
  return {view.own.est_velocity, u + gains.k3 * pos_term + gains.k6 * vel_term};
}

}  // namespace bft
