#ifndef BFT_TYPES_HPP
#define BFT_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace bft {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Error categories surfaced by the core. The C API maps each one onto a
/// status code, so keep the two lists in sync.
enum class ErrorCode {
  kInvalidArgument,
  kInvalidBearing,
  kCollision,
  kHypothesisViolated,
  kNotLocalizable,
  kAmbiguousRigidity,
  kGainCondition,
  kNumericalBlowup,
  kConfig,
  kParse,
  kValidation,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised from inside a simulation step. Carries the simulation time and the
/// (0-based) agent that triggered it, or -1 when no single agent is at fault.
class SimulationError : public Error {
 public:
  SimulationError(ErrorCode code, const std::string& what, double time, int agent)
      : Error(code, what), time_(time), agent_(agent) {}

  double time() const noexcept { return time_; }
  int agent() const noexcept { return agent_; }

 private:
  double time_;
  int agent_;
};

}  // namespace bft

#endif  // BFT_TYPES_HPP
