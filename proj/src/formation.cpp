#include "bft/formation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace bft {
namespace {

std::string agent_label(int i) { return std::to_string(i + 1); }

std::string edge_label(const Edge& e) {
  return "(" + agent_label(e.from) + "," + agent_label(e.to) + ")";
}

void check_indices(const FormationSpec& spec) {
  if (spec.dimension < 1 || spec.agents < 1 || spec.leaders < 0 || spec.leaders > spec.agents) {
    throw Error(ErrorCode::kInvalidArgument, "formation has inconsistent sizes");
  }
  for (const Edge& e : spec.edges) {
    if (e.from < 0 || e.from >= spec.agents || e.to < 0 || e.to >= spec.agents) {
      throw Error(ErrorCode::kInvalidArgument, "edge references unknown agent");
    }
    if (e.bearing.size() != spec.dimension) {
      throw Error(ErrorCode::kInvalidArgument, "edge bearing has wrong dimension");
    }
  }
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

std::vector<int> FormationSpec::outgoing(int agent) const {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(edges.size()); ++k) {
    if (edges[k].from == agent) out.push_back(k);
  }
  return out;
}

std::vector<std::string> validate_formation(const FormationSpec& spec, double unit_tolerance) {
  std::vector<std::string> v;
  const int d = spec.dimension;
  const int n = spec.agents;
  const int l = spec.leaders;

  if (d < 2) v.push_back("dimension must be >= 2, got " + std::to_string(d));
  if (n < 1) v.push_back("agent count must be positive");
  if (l < 2) {
    v.push_back("at least two leaders required, got " + std::to_string(l));
  }
  if (l > n) v.push_back("leader count exceeds agent count");
  if (spec.leader_positions.rows() != d || spec.leader_positions.cols() != std::max(l, 0)) {
    v.push_back("leader_positions must hold one " + std::to_string(d) +
                "-vector per leader");
  }
  if (!v.empty() && (d < 1 || n < 1 || l > n || l < 0)) return v;

  std::set<std::pair<int, int>> seen;
  for (const Edge& e : spec.edges) {
    const bool in_range = e.from >= 0 && e.from < n && e.to >= 0 && e.to < n;
    if (!in_range) {
      v.push_back("edge " + edge_label(e) + " references an unknown agent");
      continue;
    }
    if (e.from == e.to) v.push_back("edge " + edge_label(e) + " is a self loop");
    if (!seen.insert({e.from, e.to}).second) {
      v.push_back("edge " + edge_label(e) + " is listed twice");
    }
    if (e.bearing.size() != d) {
      v.push_back("edge " + edge_label(e) + " bearing has dimension " +
                  std::to_string(e.bearing.size()));
      continue;
    }
    if (!e.bearing.allFinite() || std::abs(e.bearing.norm() - 1.0) > unit_tolerance) {
      std::ostringstream os;
      os << "edge " << edge_label(e) << " bearing is not unit length (norm "
         << e.bearing.norm() << ")";
      v.push_back(os.str());
    }
    if (spec.is_leader(e.from)) {
      v.push_back("edge " + edge_label(e) + " leaves a leader; leaders sense nobody");
    }
  }

  for (const Edge& e : spec.edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) continue;
    if (spec.is_leader(e.from)) continue;
    const bool follower_pair = !spec.is_leader(e.to);
    auto it = std::find_if(spec.edges.begin(), spec.edges.end(),
                           [&](const Edge& r) { return r.from == e.to && r.to == e.from; });
    if (follower_pair && it == spec.edges.end()) {
      v.push_back("follower edge " + edge_label(e) + " has no reverse edge");
    }
    if (it != spec.edges.end() && e.from < e.to && it->bearing.size() == d &&
        e.bearing.size() == d && (e.bearing + it->bearing).norm() > 10 * unit_tolerance) {
      v.push_back("bearings on " + edge_label(e) + " and " + edge_label(*it) +
                  " are not antisymmetric");
    }
  }

  for (int i = std::max(l, 0); i < n; ++i) {
    if (spec.outgoing(i).empty()) {
      v.push_back("follower " + agent_label(i) + " has no neighbors");
    }
  }
  return v;
}

void require_valid(const FormationSpec& spec) {
  auto v = validate_formation(spec);
  if (v.empty()) return;
  std::string msg = "invalid formation:";
  for (const auto& s : v) msg += "\n  - " + s;
  throw Error(ErrorCode::kValidation, msg);
}

FormationSpec normalized_bearings(FormationSpec spec) {
  for (Edge& e : spec.edges) {
    const double norm = e.bearing.norm();
    if (norm > 0.0 && std::isfinite(norm)) e.bearing /= norm;
  }
  return spec;
}

Matrix projection_matrix(const Vector& g, double unit_tolerance) {
  if (g.size() == 0 || !g.allFinite() || std::abs(g.norm() - 1.0) > unit_tolerance) {
    throw Error(ErrorCode::kInvalidBearing, "projection_matrix: bearing is not a unit vector");
  }
  return Matrix::Identity(g.size(), g.size()) - g * g.transpose();
}

Vector bearing_of(const Vector& p_i, const Vector& p_j, double collision_epsilon) {
  Vector diff = p_j - p_i;
  const double dist = diff.norm();
  if (!(dist >= collision_epsilon) || dist == 0.0) {
    throw Error(ErrorCode::kCollision, "bearing_of: coincident positions");
  }
  return diff / dist;
}

LaplacianBlocks build_laplacian(const FormationSpec& spec) {
  check_indices(spec);
  const int n = spec.agents;
  const int l = spec.leaders;
  const int f = n - l;
  Matrix L = Matrix::Zero(n, n);
  for (const Edge& e : spec.edges) {
    if (e.from == e.to) continue;
    L(e.from, e.to) = -1.0;
  }
  for (int i = 0; i < n; ++i) L(i, i) = -L.row(i).sum();
  return {L, L.block(l, 0, f, l), L.block(l, l, f, f)};
}

BearingLaplacianBlocks build_bearing_laplacian(const FormationSpec& spec) {
  check_indices(spec);
  const int d = spec.dimension;
  const int n = spec.agents;
  const int dl = d * spec.leaders;
  const int df = d * spec.followers();

  Matrix B = Matrix::Zero(d * n, d * n);
  std::set<std::pair<int, int>> pairs;
  for (const Edge& e : spec.edges) {
    if (e.from == e.to) continue;
    auto key = std::minmax(e.from, e.to);
    if (!pairs.insert(key).second) continue;
    const Matrix P = Matrix::Identity(d, d) - e.bearing * e.bearing.transpose();
    const int i = e.from;
    const int j = e.to;
    B.block(d * i, d * i, d, d) += P;
    B.block(d * j, d * j, d, d) += P;
    B.block(d * i, d * j, d, d) -= P;
    B.block(d * j, d * i, d, d) -= P;
  }
  return {B, B.block(0, 0, dl, dl), B.block(0, dl, dl, df), B.block(dl, 0, df, dl),
          B.block(dl, dl, df, df)};
}

RigidityReport check_infinitesimal_bearing_rigidity(const FormationSpec& spec,
                                                    const Matrix& realization,
                                                    double relative_tolerance) {
  const auto blocks = build_bearing_laplacian(spec);
  const int d = spec.dimension;
  const int n = spec.agents;
  if (realization.rows() != d || realization.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "realization must be d x n");
  }

  // B is symmetric PSD, so its singular values are its eigenvalues.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(blocks.full), Eigen::EigenvaluesOnly);
  Vector sigma = eig.eigenvalues().cwiseAbs();
  std::sort(sigma.data(), sigma.data() + sigma.size(), std::greater<>());

  RigidityReport r;
  r.sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  r.tolerance = relative_tolerance * r.sigma_max;
  r.expected_rank = d * n - d - 1;
  r.smallest_kept = 0.0;
  r.largest_dropped = 0.0;
  for (int k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > r.tolerance) {
      ++r.rank;
      r.smallest_kept = sigma(k);
    } else if (r.largest_dropped == 0.0) {
      r.largest_dropped = sigma(k);
    }
  }
  r.null_dimension = d * n - r.rank;

  for (int k = 0; k < sigma.size(); ++k) {
    const double rel = r.sigma_max > 0.0 ? sigma(k) / r.sigma_max : 0.0;
    if (rel > relative_tolerance * 1e-2 && rel < relative_tolerance * 1e2) {
      std::ostringstream os;
      os << "ambiguous rigidity rank: singular value " << sigma(k) << " (relative " << rel
         << ") lies within two decades of the tolerance " << r.tolerance
         << "; smallest kept " << r.smallest_kept << ", largest dropped " << r.largest_dropped;
      throw Error(ErrorCode::kAmbiguousRigidity, os.str());
    }
  }

  Vector stacked = Eigen::Map<const Vector>(realization.data(), d * n);
  const double scale = std::max(stacked.norm(), 1.0);
  r.realization_residual = (blocks.full * stacked).norm() / scale;
  r.rigid = r.rank == r.expected_rank;
  return r;
}

double follower_block_min_eigenvalue(const FormationSpec& spec) {
  const auto blocks = build_bearing_laplacian(spec);
  if (blocks.ff.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(blocks.ff), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

FollowerBlockReport check_follower_block(const FormationSpec& spec, double tolerance) {
  if (spec.leaders < 2) {
    throw Error(ErrorCode::kHypothesisViolated,
                "the follower block test needs at least two leaders, spec has " + std::to_string(spec.leaders));
  }
  const auto blocks = build_bearing_laplacian(spec);
  FollowerBlockReport r;
  r.tolerance = tolerance;
  if (blocks.ff.size() == 0) return r;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(blocks.ff), Eigen::EigenvaluesOnly);
  r.min_eigenvalue = eig.eigenvalues()(0);
  r.max_eigenvalue = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  r.holds = r.min_eigenvalue > tolerance;
  return r;
}

}  // namespace bft
