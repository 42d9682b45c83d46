#ifndef BFT_LOCALIZATION_HPP
#define BFT_LOCALIZATION_HPP

#include "bft/formation.hpp"

#include <string>
#include <variant>
#include <vector>

namespace bft {

/// Common leader velocity v_c(t). Each built-in profile carries its exact
/// integral and the exact suprema of ||v_c|| and ||dv_c/dt||.
class VelocityProfile {
 public:
  struct Constant {
    Vector value;
  };
  /// offset + amplitude * sin(frequency * t + phase), shared frequency/phase.
  struct Sinusoidal {
    Vector offset;
    Vector amplitude;
    double frequency = 1.0;
    double phase = 0.0;
  };
  /// velocities[k] holds on [starts[k], starts[k+1]); starts[0] must be 0.
  struct PiecewiseConstant {
    std::vector<double> starts;
    std::vector<Vector> velocities;
  };
  using Shape = std::variant<Constant, Sinusoidal, PiecewiseConstant>;

  VelocityProfile() : VelocityProfile(Constant{Vector::Zero(2)}) {}
  explicit VelocityProfile(Shape shape);

  static VelocityProfile constant(Vector value) { return VelocityProfile(Constant{std::move(value)}); }
  static VelocityProfile sinusoidal(Vector offset, Vector amplitude, double frequency,
                                    double phase) {
    return VelocityProfile(Sinusoidal{std::move(offset), std::move(amplitude), frequency, phase});
  }
  static VelocityProfile piecewise_constant(std::vector<double> starts,
                                            std::vector<Vector> velocities) {
    return VelocityProfile(PiecewiseConstant{std::move(starts), std::move(velocities)});
  }

  const Shape& shape() const { return shape_; }
  std::string id() const;
  int dimension() const;

  Vector velocity(double t) const;
  Vector acceleration(double t) const;
  /// Exact integral of v_c over [0, t].
  Vector displacement(double t) const;

  /// sup ||v_c(t)|| (delta_1).
  double speed_bound() const { return speed_bound_; }
  /// sup ||dv_c/dt|| (delta_2). Jumps of a piecewise-constant profile are
  /// not counted; has_jumps() reports them.
  double acceleration_bound() const { return acceleration_bound_; }
  bool has_jumps() const;

 private:
  Shape shape_;
  double speed_bound_ = 0.0;
  double acceleration_bound_ = 0.0;
};

struct DesiredRealization {
  Matrix positions;  // d x n, leader columns copied verbatim from the spec
  double residual = 0.0;  // ||B_ff p*_F + B_fl p_L||

  Vector follower_stack(int leaders) const;
};

/// Unique follower positions satisfying the bearing constraints given the
/// leader anchors. Throws Error(kNotLocalizable) if B_ff is singular.
DesiredRealization solve_desired_positions(const FormationSpec& spec);

/// p*(t) = p*(0) + 1_n (x) integral of v_c.
class TargetTrajectory {
 public:
  TargetTrajectory(DesiredRealization initial, VelocityProfile profile);

  const DesiredRealization& initial() const { return initial_; }
  const VelocityProfile& profile() const { return profile_; }

  Matrix positions_at(double t) const;

 private:
  DesiredRealization initial_;
  VelocityProfile profile_;
};

/// Throws Error(kInvalidArgument) for t < 0.
Matrix target_at(const TargetTrajectory& trajectory, double t);

}  // namespace bft

#endif  // BFT_LOCALIZATION_HPP
