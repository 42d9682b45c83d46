#include "bft/integrator.hpp"

#include <cmath>
#include <vector>

namespace bft {

std::string scheme_name(Scheme scheme) {
  return scheme == Scheme::kRk4 ? "rk4" : "forward-euler";
}

std::int64_t IntegratorConfig::step_count() const {
  // Tolerate representation error in duration / step (30 / 1e-3 = 29999.99...).
  return static_cast<std::int64_t>(std::floor(duration / step + 1e-9));
}

std::vector<std::string> validate_integrator(const IntegratorConfig& c) {
  std::vector<std::string> v;
  if (!(c.step > 0.0) || !std::isfinite(c.step)) v.push_back("integrator step h must be > 0");
  if (!(c.duration >= c.step) || !std::isfinite(c.duration)) {
    v.push_back("integrator duration must be >= step");
  }
  if (!(c.collision_epsilon >= 0.0)) v.push_back("collision epsilon must be >= 0");
  if (!(c.max_abs_state > 0.0)) v.push_back("max_abs_state must be > 0");
  return v;
}

Vector step(const Vector& x, double t, double h, Scheme scheme, const Rhs& rhs) {
  if (scheme == Scheme::kForwardEuler) return x + h * rhs(t, x);
  const Vector k1 = rhs(t, x);
  const Vector k2 = rhs(t + 0.5 * h, x + (0.5 * h) * k1);
  const Vector k3 = rhs(t + 0.5 * h, x + (0.5 * h) * k2);
  const Vector k4 = rhs(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace bft
