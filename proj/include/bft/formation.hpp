#ifndef BFT_FORMATION_HPP
#define BFT_FORMATION_HPP

#include "bft/types.hpp"

#include <string>
#include <vector>

namespace bft {

inline constexpr double kUnitTolerance = 1e-9;
inline constexpr double kRankTolerance = 1e-8;

/// Directed interaction edge: agent `from` senses agent `to`. Indices are
/// 0-based; agents [0, leaders) are leaders, the rest are followers.
struct Edge {
  int from = 0;
  int to = 0;
  Vector bearing;  // desired unit bearing g*_{from,to}
};

struct FormationSpec {
  int dimension = 2;
  int agents = 0;
  int leaders = 0;
  std::vector<Edge> edges;
  Matrix leader_positions;  // dimension x leaders

  int followers() const { return agents - leaders; }
  bool is_leader(int agent) const { return agent < leaders; }

  /// Edge indices whose `from` is the given agent, in declaration order.
  std::vector<int> outgoing(int agent) const;
};

/// Every violated structural rule, one message per violation (1-based agent
/// ids in messages). An empty result means the spec is valid.
std::vector<std::string> validate_formation(const FormationSpec& spec,
                                            double unit_tolerance = kUnitTolerance);

/// Throws Error(kValidation) listing all violations.
void require_valid(const FormationSpec& spec);

/// Returns a copy with every bearing rescaled to unit length.
FormationSpec normalized_bearings(FormationSpec spec);

Matrix projection_matrix(const Vector& g, double unit_tolerance = kUnitTolerance);

/// P_g x without forming the matrix.
inline Vector project(const Vector& g, const Vector& x) { return x - g * g.dot(x); }

/// Unit vector from p_i toward p_j. Throws Error(kCollision) when the two
/// points are closer than `collision_epsilon`.
Vector bearing_of(const Vector& p_i, const Vector& p_j, double collision_epsilon = 1e-12);

struct LaplacianBlocks {
  Matrix full;             // n x n
  Matrix follower_leader;  // f x l
  Matrix follower_follower;  // f x f
};

LaplacianBlocks build_laplacian(const FormationSpec& spec);

struct BearingLaplacianBlocks {
  Matrix full;  // dn x dn, assembled on the underlying undirected graph
  Matrix ll;
  Matrix lf;
  Matrix fl;
  Matrix ff;
};

BearingLaplacianBlocks build_bearing_laplacian(const FormationSpec& spec);

struct RigidityReport {
  bool rigid = false;
  int rank = 0;
  int expected_rank = 0;  // d*n - d - 1
  int null_dimension = 0;
  double sigma_max = 0.0;
  double tolerance = 0.0;   // absolute cut-off on singular values
  double smallest_kept = 0.0;  // smallest singular value counted as nonzero
  double largest_dropped = 0.0;  // largest singular value counted as zero
  /// ||B p*|| / ||p*||: the realization is consistent with the bearings
  /// (translations and scaling lie in the null space) when this is ~0.
  double realization_residual = 0.0;
};

/// Rank test on the bearing Laplacian. `realization` is d x n. Throws
/// Error(kAmbiguousRigidity) when a singular value sits within two decades
/// of the rank tolerance.
RigidityReport check_infinitesimal_bearing_rigidity(const FormationSpec& spec,
                                                    const Matrix& realization,
                                                    double relative_tolerance = kRankTolerance);

struct FollowerBlockReport {
  bool holds = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double tolerance = 0.0;
};

/// B_ff positive definiteness. Throws Error(kHypothesisViolated) when the
/// spec has fewer than two leaders.
FollowerBlockReport check_follower_block(const FormationSpec& spec, double tolerance = 1e-9);

/// Smallest eigenvalue of the symmetrized follower block, for any leader
/// count (including the l < 2 cases that check_follower_block rejects).
double follower_block_min_eigenvalue(const FormationSpec& spec);

}  // namespace bft

#endif  // BFT_FORMATION_HPP
