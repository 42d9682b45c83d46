#include "bft/localization.hpp"

#include <algorithm>
#include <cmath>

namespace bft {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int segment_at(const VelocityProfile::PiecewiseConstant& p, double t) {
  auto it = std::upper_bound(p.starts.begin(), p.starts.end(), t);
  return std::max(0, static_cast<int>(it - p.starts.begin()) - 1);
}

}  // namespace

VelocityProfile::VelocityProfile(Shape shape) : shape_(std::move(shape)) {
  std::visit(
      overloaded{
          [&](const Constant& c) {
            if (c.value.size() == 0 || !c.value.allFinite()) {
              throw Error(ErrorCode::kConfig, "constant profile needs a finite vector");
            }
            speed_bound_ = c.value.norm();
            acceleration_bound_ = 0.0;
          },
          [&](const Sinusoidal& s) {
            if (s.offset.size() == 0 || s.offset.size() != s.amplitude.size()) {
              throw Error(ErrorCode::kConfig, "sinusoidal profile: offset/amplitude size mismatch");
            }
            if (!std::isfinite(s.frequency) || s.frequency < 0.0 || !std::isfinite(s.phase)) {
              throw Error(ErrorCode::kConfig, "sinusoidal profile: bad frequency or phase");
            }
            if (s.frequency == 0.0) {
              speed_bound_ = (s.offset + s.amplitude * std::sin(s.phase)).norm();
              acceleration_bound_ = 0.0;
            } else {
              // ||o + a sin||^2 is convex in sin, so the sup sits at sin = +-1.
              speed_bound_ = std::max((s.offset + s.amplitude).norm(),
                                      (s.offset - s.amplitude).norm());
              acceleration_bound_ = s.frequency * s.amplitude.norm();
            }
          },
          [&](const PiecewiseConstant& p) {
            if (p.starts.empty() || p.starts.size() != p.velocities.size() ||
                p.starts.front() != 0.0) {
              throw Error(ErrorCode::kConfig,
                          "piecewise profile: starts must begin at 0 and match velocities");
            }
            for (std::size_t k = 1; k < p.starts.size(); ++k) {
              if (!(p.starts[k] > p.starts[k - 1])) {
                throw Error(ErrorCode::kConfig, "piecewise profile: starts must increase");
              }
            }
            for (const Vector& v : p.velocities) {
              if (v.size() != p.velocities.front().size() || !v.allFinite()) {
                throw Error(ErrorCode::kConfig, "piecewise profile: inconsistent velocities");
              }
              speed_bound_ = std::max(speed_bound_, v.norm());
            }
            acceleration_bound_ = 0.0;
          },
      },
      shape_);
}

std::string VelocityProfile::id() const {
  return std::visit(overloaded{[](const Constant&) { return std::string("constant"); },
                               [](const Sinusoidal&) { return std::string("sinusoidal"); },
                               [](const PiecewiseConstant&) {
                                 return std::string("piecewise_constant");
                               }},
                    shape_);
}

int VelocityProfile::dimension() const {
  return std::visit(
      overloaded{[](const Constant& c) { return static_cast<int>(c.value.size()); },
                 [](const Sinusoidal& s) { return static_cast<int>(s.offset.size()); },
                 [](const PiecewiseConstant& p) {
                   return static_cast<int>(p.velocities.front().size());
                 }},
      shape_);
}

bool VelocityProfile::has_jumps() const {
  const auto* p = std::get_if<PiecewiseConstant>(&shape_);
  return p != nullptr && p->starts.size() > 1;
}

Vector VelocityProfile::velocity(double t) const {
  return std::visit(
      overloaded{[](const Constant& c) -> Vector { return c.value; },
                 [t](const Sinusoidal& s) -> Vector {
                   return s.offset + s.amplitude * std::sin(s.frequency * t + s.phase);
                 },
                 [t](const PiecewiseConstant& p) -> Vector { return p.velocities[segment_at(p, t)]; }},
      shape_);
}

Vector VelocityProfile::acceleration(double t) const {
  return std::visit(
      overloaded{[](const Constant& c) -> Vector { return Vector::Zero(c.value.size()); },
                 [t](const Sinusoidal& s) -> Vector {
                   return s.amplitude * (s.frequency * std::cos(s.frequency * t + s.phase));
                 },
                 [](const PiecewiseConstant& p) -> Vector {
                   return Vector::Zero(p.velocities.front().size());
                 }},
      shape_);
}

Vector VelocityProfile::displacement(double t) const {
  return std::visit(
      overloaded{[t](const Constant& c) -> Vector { return c.value * t; },
                 [t](const Sinusoidal& s) -> Vector {
                   if (s.frequency == 0.0) return (s.offset + s.amplitude * std::sin(s.phase)) * t;
                   const double w = s.frequency;
                   return s.offset * t +
                          s.amplitude * ((std::cos(s.phase) - std::cos(w * t + s.phase)) / w);
                 },
                 [t](const PiecewiseConstant& p) -> Vector {
                   Vector out = Vector::Zero(p.velocities.front().size());
                   const int last = segment_at(p, t);
                   for (int k = 0; k < last; ++k) {
                     out += p.velocities[k] * (p.starts[k + 1] - p.starts[k]);
                   }
                   out += p.velocities[last] * (t - p.starts[last]);
                   return out;
                 }},
      shape_);
}

Vector DesiredRealization::follower_stack(int leaders) const {
  const int d = static_cast<int>(positions.rows());
  const int f = static_cast<int>(positions.cols()) - leaders;
  return Eigen::Map<const Vector>(positions.data() + d * leaders, d * f);
}

DesiredRealization solve_desired_positions(const FormationSpec& spec) {
  const int d = spec.dimension;
  const int l = spec.leaders;
  const int n = spec.agents;
  if (spec.leader_positions.rows() != d || spec.leader_positions.cols() != l) {
    throw Error(ErrorCode::kInvalidArgument, "leader positions must be d x l");
  }
  const auto blocks = build_bearing_laplacian(spec);
  const Vector leader_stack = Eigen::Map<const Vector>(spec.leader_positions.data(), d * l);
  const Vector rhs = -blocks.fl * leader_stack;

  DesiredRealization out;
  out.positions = Matrix::Zero(d, n);
  out.positions.leftCols(l) = spec.leader_positions;
  if (n == l) return out;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (blocks.ff + blocks.ff.transpose()),
                                            Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  if (!(lmin > 1e-9 * std::max(1.0, lmax))) {
    throw Error(ErrorCode::kNotLocalizable,
                "follower bearing block is singular (min eigenvalue " + std::to_string(lmin) +
                    "); desired positions are not unique");
  }
  const Vector followers = blocks.ff.llt().solve(rhs);
  out.residual = (blocks.ff * followers - rhs).norm();
  out.positions.rightCols(n - l) = Eigen::Map<const Matrix>(followers.data(), d, n - l);
  return out;
}

TargetTrajectory::TargetTrajectory(DesiredRealization initial, VelocityProfile profile)
    : initial_(std::move(initial)), profile_(std::move(profile)) {
  if (profile_.dimension() != initial_.positions.rows()) {
    throw Error(ErrorCode::kConfig, "velocity profile dimension does not match formation");
  }
}

Matrix TargetTrajectory::positions_at(double t) const {
  return initial_.positions.colwise() + profile_.displacement(t);
}

Matrix target_at(const TargetTrajectory& trajectory, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "target_at: t must be >= 0");
  return trajectory.positions_at(t);
}

}  // namespace bft
