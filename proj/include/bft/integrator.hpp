#ifndef BFT_INTEGRATOR_HPP
#define BFT_INTEGRATOR_HPP

#include "bft/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bft {

enum class Scheme { kForwardEuler, kRk4 };

std::string scheme_name(Scheme scheme);

struct IntegratorConfig {
  Scheme scheme = Scheme::kRk4;
  double step = 1e-3;
  double duration = 30.0;
  double collision_epsilon = 1e-6;
  double max_abs_state = 1e12;  // blow-up guard

  /// Number of fixed steps covering [0, duration].
  std::int64_t step_count() const;
};

/// Violations of h > 0, T_end >= h, eps >= 0.
std::vector<std::string> validate_integrator(const IntegratorConfig& config);

using Rhs = std::function<Vector(double, const Vector&)>;

/// One fixed step from (t, x). Deterministic; RK4 evaluates `rhs` at its four
/// stage points and lets any exception from a stage propagate.
Vector step(const Vector& x, double t, double h, Scheme scheme, const Rhs& rhs);

}  // namespace bft

#endif  // BFT_INTEGRATOR_HPP
