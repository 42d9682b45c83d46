#ifndef BFT_TESTS_FIXTURES_HPP
#define BFT_TESTS_FIXTURES_HPP

#include "bft/formation.hpp"
#include "bft/localization.hpp"

#include <cmath>
#include <random>

namespace fixtures {

inline bft::Vector vec(std::initializer_list<double> xs) {
  bft::Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

// Five-agent planar formation: leaders 1, 2 at (0,0), (0,2); followers 3, 4, 5.
// Built by hand (0-based ids) so tests don't depend on the scenario parser.
inline bft::FormationSpec five_agent() {
  const double r = 1.0 / std::sqrt(2.0);
  bft::FormationSpec s;
  s.dimension = 2;
  s.agents = 5;
  s.leaders = 2;
  s.leader_positions.resize(2, 2);
  s.leader_positions << 0, 0, 0, 2;
  auto add = [&](int i, int j, bft::Vector g) { s.edges.push_back({i - 1, j - 1, std::move(g)}); };
  add(3, 1, vec({1, 0}));
  add(3, 2, vec({r, r}));
  add(3, 4, vec({0, 1}));
  add(3, 5, vec({-r, r}));
  add(4, 2, vec({1, 0}));
  add(4, 3, vec({0, -1}));
  add(4, 5, vec({-r, -r}));
  add(5, 3, vec({r, -r}));
  add(5, 4, vec({r, r}));
  return s;
}

inline bft::VelocityProfile sinusoid_profile() {
  return bft::VelocityProfile::sinusoidal(vec({1, 0}), vec({0, 1}), 1.0, 0.0);
}

// Expected follower positions, columns for agents 3, 4, 5.
inline bft::Matrix expected_followers() {
  bft::Matrix m(2, 3);
  m << -2, -2, -3, 0, 2, 1;
  return m;
}

inline bft::Vector random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  bft::Vector v(d);
  for (int k = 0; k < d; ++k) v(k) = n(rng);
  return v / v.norm();
}

inline bft::Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  bft::Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = u(rng);
  }
  return m;
}

// Reference bearing Laplacian built straight from the definition on the
// undirected pair list, used as a second code path.
inline bft::Matrix reference_bearing_laplacian(const bft::FormationSpec& s) {
  const int d = s.dimension;
  bft::Matrix b = bft::Matrix::Zero(d * s.agents, d * s.agents);
  for (const auto& e : s.edges) {
    bool mirrored = false;
    for (const auto& f : s.edges) mirrored |= (f.from == e.to && f.to == e.from);
    if (mirrored && e.from > e.to) continue;
    const bft::Matrix p = bft::Matrix::Identity(d, d) - e.bearing * e.bearing.transpose();
    b.block(d * e.from, d * e.from, d, d) += p;
    b.block(d * e.to, d * e.to, d, d) += p;
    b.block(d * e.from, d * e.to, d, d) -= p;
    b.block(d * e.to, d * e.from, d, d) -= p;
  }
  return b;
}

}  // namespace fixtures

#endif  // BFT_TESTS_FIXTURES_HPP
