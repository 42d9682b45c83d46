#include "bft/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bft {
namespace {

using nlohmann::json;

const char* const kSim1 = R"({
  "name": "sim1",
  "description": "Five-agent planar formation, direct sliding-mode law (gains k1=0.5, k2=2).",
  "formation": {
    "dimension": 2,
    "agents": 5,
    "leaders": 2,
    "leader_positions": [[0, 0], [0, 2]],
    "edges": [
      {"from": 3, "to": 1, "bearing": [1, 0]},
      {"from": 3, "to": 2, "bearing": [0.70710678118654752, 0.70710678118654752]},
      {"from": 3, "to": 4, "bearing": [0, 1]},
      {"from": 3, "to": 5, "bearing": [-0.70710678118654752, 0.70710678118654752]},
      {"from": 4, "to": 2, "bearing": [1, 0]},
      {"from": 4, "to": 3, "bearing": [0, -1]},
      {"from": 4, "to": 5, "bearing": [-0.70710678118654752, -0.70710678118654752]},
      {"from": 5, "to": 3, "bearing": [0.70710678118654752, -0.70710678118654752]},
      {"from": 5, "to": 4, "bearing": [0.70710678118654752, 0.70710678118654752]}
    ]
  },
  "law": "A",
  "gains": {"k1": 0.5, "k2": 2},
  "velocity_profile": {"type": "sinusoidal", "offset": [1, 0], "amplitude": [0, 1],
                       "frequency": 1, "phase": 0},
  "integrator": {"scheme": "rk4", "step": 0.001, "duration": 30, "collision_epsilon": 1e-6},
  "initialization": {"seed": 1, "box_half_width": 3},
  "output": {"decimation": 10}
})";

const char* const kSim2 = R"({
  "name": "sim2",
  "description": "Five-agent planar formation, estimator-based law (k1=k2=k3=1, k4=0.5, k5=2; k6=1 reconstructed).",
  "formation": {
    "dimension": 2,
    "agents": 5,
    "leaders": 2,
    "leader_positions": [[0, 0], [0, 2]],
    "edges": [
      {"from": 3, "to": 1, "bearing": [1, 0]},
      {"from": 3, "to": 2, "bearing": [0.70710678118654752, 0.70710678118654752]},
      {"from": 3, "to": 4, "bearing": [0, 1]},
      {"from": 3, "to": 5, "bearing": [-0.70710678118654752, 0.70710678118654752]},
      {"from": 4, "to": 2, "bearing": [1, 0]},
      {"from": 4, "to": 3, "bearing": [0, -1]},
      {"from": 4, "to": 5, "bearing": [-0.70710678118654752, -0.70710678118654752]},
      {"from": 5, "to": 3, "bearing": [0.70710678118654752, -0.70710678118654752]},
      {"from": 5, "to": 4, "bearing": [0.70710678118654752, 0.70710678118654752]}
    ]
  },
  "law": "B",
  "gains": {"k1": 1, "k2": 1, "k3": 1, "k4": 0.5, "k5": 2, "k6": 1, "reconstructed": ["k6"]},
  "velocity_profile": {"type": "sinusoidal", "offset": [1, 0], "amplitude": [0, 1],
                       "frequency": 1, "phase": 0},
  "integrator": {"scheme": "rk4", "step": 0.001, "duration": 30, "collision_epsilon": 1e-6},
  "initialization": {"seed": 1, "box_half_width": 3},
  "output": {"decimation": 10}
})";

// Reads typed fields from a JSON tree, collecting every problem instead of
// stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  const json* object(const json& parent, const std::string& path, const char* key,
                     bool required) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (required) errors.push_back("field '" + join(path, key) + "': missing");
      return nullptr;
    }
    if (!it->is_object()) {
      errors.push_back("field '" + join(path, key) + "': expected an object");
      return nullptr;
    }
    return &*it;
  }

  double number(const json& parent, const std::string& path, const char* key,
                std::optional<double> fallback) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (!fallback) errors.push_back("field '" + join(path, key) + "': missing");
      return fallback.value_or(0.0);
    }
    if (!it->is_number()) {
      errors.push_back("field '" + join(path, key) + "': expected a number");
      return fallback.value_or(0.0);
    }
    return it->get<double>();
  }

  std::int64_t integer(const json& parent, const std::string& path, const char* key,
                       std::optional<std::int64_t> fallback) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (!fallback) errors.push_back("field '" + join(path, key) + "': missing");
      return fallback.value_or(0);
    }
    if (!it->is_number_integer()) {
      errors.push_back("field '" + join(path, key) + "': expected an integer");
      return fallback.value_or(0);
    }
    return it->get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const json& parent, const std::string& path, const char* key,
                                 std::uint64_t fallback) {
    auto it = parent.find(key);
    if (it == parent.end()) return fallback;
    if (!it->is_number_unsigned()) {
      errors.push_back("field '" + join(path, key) + "': expected a non-negative integer");
      return fallback;
    }
    return it->get<std::uint64_t>();
  }

  bool boolean(const json& parent, const std::string& path, const char* key, bool fallback) {
    auto it = parent.find(key);
    if (it == parent.end()) return fallback;
    if (!it->is_boolean()) {
      errors.push_back("field '" + join(path, key) + "': expected true/false");
      return fallback;
    }
    return it->get<bool>();
  }

  std::string string(const json& parent, const std::string& path, const char* key,
                     std::optional<std::string> fallback) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (!fallback) errors.push_back("field '" + join(path, key) + "': missing");
      return fallback.value_or("");
    }
    if (!it->is_string()) {
      errors.push_back("field '" + join(path, key) + "': expected a string");
      return fallback.value_or("");
    }
    return it->get<std::string>();
  }

  Vector vector(const json& value, const std::string& path) {
    if (!value.is_array() || value.empty()) {
      errors.push_back("field '" + path + "': expected a non-empty array of numbers");
      return {};
    }
    Vector out(static_cast<Eigen::Index>(value.size()));
    for (std::size_t k = 0; k < value.size(); ++k) {
      if (!value[k].is_number()) {
        errors.push_back("field '" + path + "[" + std::to_string(k) + "]': expected a number");
        return {};
      }
      out(static_cast<Eigen::Index>(k)) = value[k].get<double>();
    }
    return out;
  }

  Vector vector(const json& parent, const std::string& path, const char* key) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      errors.push_back("field '" + join(path, key) + "': missing");
      return {};
    }
    return vector(*it, join(path, key));
  }

  // List of equally sized vectors stored as matrix columns.
  std::optional<Matrix> columns(const json& value, const std::string& path) {
    if (!value.is_array()) {
      errors.push_back("field '" + path + "': expected an array of vectors");
      return std::nullopt;
    }
    std::vector<Vector> cols;
    for (std::size_t k = 0; k < value.size(); ++k) {
      cols.push_back(vector(value[k], path + "[" + std::to_string(k) + "]"));
      if (cols.back().size() == 0) return std::nullopt;
      if (cols.back().size() != cols.front().size()) {
        errors.push_back("field '" + path + "': vectors have different lengths");
        return std::nullopt;
      }
    }
    if (cols.empty()) return Matrix(0, 0);
    Matrix m(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = cols[k];
    return m;
  }

  static std::string join(const std::string& path, const char* key) {
    return path.empty() ? std::string(key) : path + "." + key;
  }
};

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

json columns_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(to_json(m.col(c)));
  return out;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

VelocityProfile parse_profile(Reader& rd, const json& node) {
  const std::string path = "velocity_profile";
  const std::string type = rd.string(node, path, "type", std::nullopt);
  try {
    if (type == "constant") return VelocityProfile::constant(rd.vector(node, path, "value"));
    if (type == "sinusoidal") {
      return VelocityProfile::sinusoidal(rd.vector(node, path, "offset"),
                                         rd.vector(node, path, "amplitude"),
                                         rd.number(node, path, "frequency", 1.0),
                                         rd.number(node, path, "phase", 0.0));
    }
    if (type == "piecewise_constant") {
      auto it = node.find("segments");
      if (it == node.end() || !it->is_array() || it->empty()) {
        rd.errors.push_back("field 'velocity_profile.segments': expected a non-empty array");
        return {};
      }
      std::vector<double> starts;
      std::vector<Vector> velocities;
      for (std::size_t k = 0; k < it->size(); ++k) {
        const std::string p = path + ".segments[" + std::to_string(k) + "]";
        const json& seg = (*it)[k];
        if (!seg.is_object()) {
          rd.errors.push_back("field '" + p + "': expected an object");
          return {};
        }
        starts.push_back(rd.number(seg, p, "start", std::nullopt));
        velocities.push_back(rd.vector(seg, p, "velocity"));
      }
      return VelocityProfile::piecewise_constant(std::move(starts), std::move(velocities));
    }
    if (!type.empty()) rd.errors.push_back("field 'velocity_profile.type': unknown profile '" + type + "'");
  } catch (const Error& e) {
    rd.errors.push_back(std::string("field 'velocity_profile': ") + e.what());
  }
  return {};
}

json profile_json(const VelocityProfile& profile) {
  json out;
  out["type"] = profile.id();
  if (const auto* c = std::get_if<VelocityProfile::Constant>(&profile.shape())) {
    out["value"] = to_json(c->value);
  } else if (const auto* s = std::get_if<VelocityProfile::Sinusoidal>(&profile.shape())) {
    out["offset"] = to_json(s->offset);
    out["amplitude"] = to_json(s->amplitude);
    out["frequency"] = s->frequency;
    out["phase"] = s->phase;
  } else if (const auto* p = std::get_if<VelocityProfile::PiecewiseConstant>(&profile.shape())) {
    json segs = json::array();
    for (std::size_t k = 0; k < p->starts.size(); ++k) {
      segs.push_back({{"start", p->starts[k]}, {"velocity", to_json(p->velocities[k])}});
    }
    out["segments"] = segs;
  }
  return out;
}

bool same(const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; }
bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}
bool same(const std::optional<Matrix>& a, const std::optional<Matrix>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same(*a, *b);
}

bool same_profile(const VelocityProfile& a, const VelocityProfile& b) {
  if (a.shape().index() != b.shape().index()) return false;
  if (const auto* x = std::get_if<VelocityProfile::Constant>(&a.shape())) {
    return same(x->value, std::get<VelocityProfile::Constant>(b.shape()).value);
  }
  if (const auto* x = std::get_if<VelocityProfile::Sinusoidal>(&a.shape())) {
    const auto& y = std::get<VelocityProfile::Sinusoidal>(b.shape());
    return same(x->offset, y.offset) && same(x->amplitude, y.amplitude) &&
           x->frequency == y.frequency && x->phase == y.phase;
  }
  const auto& x = std::get<VelocityProfile::PiecewiseConstant>(a.shape());
  const auto& y = std::get<VelocityProfile::PiecewiseConstant>(b.shape());
  if (x.starts != y.starts || x.velocities.size() != y.velocities.size()) return false;
  for (std::size_t k = 0; k < x.velocities.size(); ++k) {
    if (!same(x.velocities[k], y.velocities[k])) return false;
  }
  return true;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << "scenario parse error at line " << line << ", column " << column << ": " << e.what();
    throw Error(ErrorCode::kParse, os.str());
  }
  if (!root.is_object()) throw Error(ErrorCode::kParse, "scenario must be a JSON object");

  Reader rd;
  ScenarioConfig cfg;
  cfg.name = rd.string(root, "", "name", std::string("scenario"));
  cfg.description = rd.string(root, "", "description", std::string());

  if (const json* f = rd.object(root, "", "formation", true)) {
    const std::string path = "formation";
    cfg.formation.dimension = static_cast<int>(rd.integer(*f, path, "dimension", std::nullopt));
    cfg.formation.agents = static_cast<int>(rd.integer(*f, path, "agents", std::nullopt));
    cfg.formation.leaders = static_cast<int>(rd.integer(*f, path, "leaders", std::nullopt));
    cfg.renormalize_bearings = rd.boolean(*f, path, "renormalize_bearings", false);
    if (auto it = f->find("leader_positions"); it != f->end()) {
      if (auto m = rd.columns(*it, path + ".leader_positions")) cfg.formation.leader_positions = *m;
    } else {
      rd.errors.push_back("field 'formation.leader_positions': missing");
    }
    auto edges = f->find("edges");
    if (edges == f->end() || !edges->is_array()) {
      rd.errors.push_back("field 'formation.edges': expected an array");
    } else {
      for (std::size_t k = 0; k < edges->size(); ++k) {
        const std::string p = path + ".edges[" + std::to_string(k) + "]";
        const json& e = (*edges)[k];
        if (!e.is_object()) {
          rd.errors.push_back("field '" + p + "': expected an object");
          continue;
        }
        Edge edge;
        edge.from = static_cast<int>(rd.integer(e, p, "from", std::nullopt)) - 1;
        edge.to = static_cast<int>(rd.integer(e, p, "to", std::nullopt)) - 1;
        edge.bearing = rd.vector(e, p, "bearing");
        cfg.formation.edges.push_back(std::move(edge));
      }
    }
    if (cfg.renormalize_bearings) cfg.formation = normalized_bearings(std::move(cfg.formation));
  }

  const std::string law = rd.string(root, "", "law", std::nullopt);
  if (law == "A") {
    cfg.law = Law::kDirect;
  } else if (law == "B") {
    cfg.law = Law::kEstimator;
  } else if (!law.empty()) {
    rd.errors.push_back("field 'law': expected \"A\" or \"B\", got \"" + law + "\"");
  }

  if (const json* pnode = rd.object(root, "", "velocity_profile", true)) {
    cfg.profile = parse_profile(rd, *pnode);
  }

  if (const json* g = rd.object(root, "", "gains", true)) {
    const std::string path = "gains";
    cfg.gains.k1 = rd.number(*g, path, "k1", std::nullopt);
    cfg.gains.k2 = rd.number(*g, path, "k2", std::nullopt);
    const std::optional<double> b_default =
        cfg.law == Law::kEstimator ? std::nullopt : std::optional<double>(0.0);
    cfg.gains.k3 = rd.number(*g, path, "k3", b_default);
    cfg.gains.k4 = rd.number(*g, path, "k4", b_default);
    cfg.gains.k5 = rd.number(*g, path, "k5", b_default);
    cfg.gains.k6 = rd.number(*g, path, "k6", b_default);
    // The followers' bounds default to the profile's exact suprema.
    cfg.gains.delta1 = rd.number(*g, path, "delta1", cfg.profile.speed_bound());
    cfg.gains.delta2 = rd.number(*g, path, "delta2", cfg.profile.acceleration_bound());
    if (auto it = g->find("reconstructed"); it != g->end()) {
      if (!it->is_array()) {
        rd.errors.push_back("field 'gains.reconstructed': expected an array of names");
      } else {
        for (const json& name : *it) {
          if (name.is_string()) cfg.reconstructed_gains.push_back(name.get<std::string>());
        }
      }
    }
  }

  if (const json* in = rd.object(root, "", "integrator", false)) {
    const std::string path = "integrator";
    const std::string scheme = rd.string(*in, path, "scheme", std::string("rk4"));
    if (scheme == "rk4") {
      cfg.integrator.scheme = Scheme::kRk4;
    } else if (scheme == "forward-euler" || scheme == "euler") {
      cfg.integrator.scheme = Scheme::kForwardEuler;
    } else {
      rd.errors.push_back("field 'integrator.scheme': unknown scheme '" + scheme + "'");
    }
    cfg.integrator.step = rd.number(*in, path, "step", cfg.integrator.step);
    cfg.integrator.duration = rd.number(*in, path, "duration", cfg.integrator.duration);
    cfg.integrator.collision_epsilon =
        rd.number(*in, path, "collision_epsilon", cfg.integrator.collision_epsilon);
    cfg.integrator.max_abs_state = rd.number(*in, path, "max_abs_state", cfg.integrator.max_abs_state);
  }

  if (const json* ic = rd.object(root, "", "initialization", false)) {
    const std::string path = "initialization";
    cfg.initial.seed = rd.unsigned_integer(*ic, path, "seed", cfg.initial.seed);
    cfg.initial.box_half_width = rd.number(*ic, path, "box_half_width", cfg.initial.box_half_width);
    cfg.initial.on_target = rd.boolean(*ic, path, "on_target", false);
    if (auto it = ic->find("follower_positions"); it != ic->end()) {
      cfg.initial.follower_positions = rd.columns(*it, path + ".follower_positions");
    }
    if (auto it = ic->find("follower_velocities"); it != ic->end()) {
      cfg.initial.follower_velocities = rd.columns(*it, path + ".follower_velocities");
    }
  }

  if (const json* c = rd.object(root, "", "controller", false)) {
    cfg.controller.boundary_layer = rd.number(*c, "controller", "boundary_layer", 0.0);
    cfg.controller.estimator_form = rd.boolean(*c, "controller", "sign_flipped_estimator", false)
                                        ? EstimatorForm::kSignFlipped
                                        : EstimatorForm::kCorrected;
  }
  cfg.override_rigidity = rd.boolean(root, "", "override_rigidity", false);

  if (const json* o = rd.object(root, "", "output", false)) {
    cfg.output.decimation = static_cast<int>(rd.integer(*o, "output", "decimation", 10));
    if (auto it = o->find("formats"); it != o->end()) {
      cfg.output.formats.clear();
      if (!it->is_array()) {
        rd.errors.push_back("field 'output.formats': expected an array");
      } else {
        for (const json& f : *it) {
          if (f.is_string()) cfg.output.formats.push_back(f.get<std::string>());
        }
      }
    }
  }

  if (const json* r = rd.object(root, "", "report", false)) {
    ReportPolicy& p = cfg.policy;
    p.position_threshold = rd.number(*r, "report", "position_threshold", p.position_threshold);
    p.bearing_threshold = rd.number(*r, "report", "bearing_threshold", p.bearing_threshold);
    p.velocity_threshold = rd.number(*r, "report", "velocity_threshold", p.velocity_threshold);
    p.estimator_threshold = rd.number(*r, "report", "estimator_threshold", p.estimator_threshold);
    p.final_window_fraction =
        rd.number(*r, "report", "final_window_fraction", p.final_window_fraction);
    p.min_duration = rd.number(*r, "report", "min_duration", p.min_duration);
    p.divergence_factor = rd.number(*r, "report", "divergence_factor", p.divergence_factor);
  }

  if (!rd.errors.empty()) {
    std::string msg = "scenario field errors:";
    for (const auto& e : rd.errors) msg += "\n  - " + e;
    throw Error(ErrorCode::kParse, msg);
  }
  return cfg;
}

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> v = validate_formation(cfg.formation);
  const bool formation_ok = v.empty();

  if (cfg.profile.dimension() != cfg.formation.dimension) {
    v.push_back("velocity profile dimension " + std::to_string(cfg.profile.dimension()) +
                " does not match formation dimension " + std::to_string(cfg.formation.dimension));
  }
  for (const auto& g : validate_gains(cfg.gains, cfg.law).violations) v.push_back(g.rule);
  const double tol = 1e-12;
  if (cfg.gains.delta1 < cfg.profile.speed_bound() * (1.0 - tol)) {
    v.push_back("disturbance bound: delta1=" + fmt(cfg.gains.delta1) +
                " is below the profile's sup ||v_c|| = " + fmt(cfg.profile.speed_bound()));
  }
  if (cfg.gains.delta2 < cfg.profile.acceleration_bound() * (1.0 - tol)) {
    v.push_back("disturbance bound: delta2=" + fmt(cfg.gains.delta2) +
                " is below the profile's sup ||dv_c/dt|| = " +
                fmt(cfg.profile.acceleration_bound()));
  }
  for (const auto& s : validate_integrator(cfg.integrator)) v.push_back(s);
  if (cfg.output.decimation < 1) v.push_back("output decimation must be >= 1");
  for (const auto& f : cfg.output.formats) {
    if (f != "csv" && f != "json" && f != "svg") v.push_back("unknown output format '" + f + "'");
  }
  if (!(cfg.initial.box_half_width >= 0.0)) v.push_back("box_half_width must be >= 0");
  const int f = cfg.formation.agents - cfg.formation.leaders;
  if (cfg.initial.follower_positions &&
      (cfg.initial.follower_positions->rows() != cfg.formation.dimension ||
       cfg.initial.follower_positions->cols() != f)) {
    v.push_back("initialization.follower_positions must list one position per follower");
  }
  if (cfg.initial.follower_velocities &&
      (cfg.initial.follower_velocities->rows() != cfg.formation.dimension ||
       cfg.initial.follower_velocities->cols() != f)) {
    v.push_back("initialization.follower_velocities must list one velocity per follower");
  }
  if (!(cfg.controller.boundary_layer >= 0.0)) v.push_back("boundary_layer must be >= 0");
  if (!(cfg.policy.final_window_fraction > 0.0 && cfg.policy.final_window_fraction <= 1.0)) {
    v.push_back("report.final_window_fraction must lie in (0, 1]");
  }

  if (formation_ok && !cfg.override_rigidity) {
    const auto block = check_follower_block(cfg.formation);
    if (!block.holds) {
      v.push_back("rigidity: follower bearing block B_ff is not positive definite (min eigenvalue " +
                  fmt(block.min_eigenvalue) + "); set override_rigidity to run anyway");
    }
  }
  return v;
}

std::vector<std::string> scenario_warnings(const ScenarioConfig& cfg) {
  std::vector<std::string> w;
  if (!validate_formation(cfg.formation).empty()) return w;
  try {
    const auto realization = solve_desired_positions(cfg.formation);
    const auto rig = check_infinitesimal_bearing_rigidity(cfg.formation, realization.positions);
    if (!rig.rigid) {
      w.push_back("formation is not infinitesimally bearing rigid: rank(B)=" +
                  std::to_string(rig.rank) + ", expected " + std::to_string(rig.expected_rank) +
                  " (followers remain localizable because B_ff is positive definite)");
    }
  } catch (const Error& e) {
    w.push_back(std::string("rigidity analysis unavailable: ") + e.what());
  }
  if (cfg.profile.has_jumps()) {
    w.push_back("piecewise-constant velocity profile has jumps; the acceleration bound excludes them");
  }
  if (cfg.controller.estimator_form == EstimatorForm::kSignFlipped) {
    w.push_back("sign-flipped estimator selected: estimator error dynamics are unstable");
  }
  const double kswitch = cfg.law == Law::kDirect ? cfg.gains.k2 : cfg.gains.k5;
  if (kswitch * cfg.integrator.step > 0.05) {
    w.push_back("switching gain times step is large; expect a wide chattering band");
  }
  return w;
}

ScenarioConfig load_scenario_text(std::string_view text) {
  ScenarioConfig cfg = parse_scenario(text);
  const auto v = validate_scenario(cfg);
  if (!v.empty()) {
    std::string msg = "scenario '" + cfg.name + "' is invalid:";
    for (const auto& s : v) msg += "\n  - " + s;
    throw Error(ErrorCode::kValidation, msg);
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  json root;
  root["name"] = cfg.name;
  if (!cfg.description.empty()) root["description"] = cfg.description;

  json f;
  f["dimension"] = cfg.formation.dimension;
  f["agents"] = cfg.formation.agents;
  f["leaders"] = cfg.formation.leaders;
  f["leader_positions"] = columns_json(cfg.formation.leader_positions);
  json edges = json::array();
  for (const Edge& e : cfg.formation.edges) {
    edges.push_back({{"from", e.from + 1}, {"to", e.to + 1}, {"bearing", to_json(e.bearing)}});
  }
  f["edges"] = edges;
  f["renormalize_bearings"] = cfg.renormalize_bearings;
  root["formation"] = f;

  root["law"] = law_name(cfg.law);
  json g;
  g["k1"] = cfg.gains.k1;
  g["k2"] = cfg.gains.k2;
  g["k3"] = cfg.gains.k3;
  g["k4"] = cfg.gains.k4;
  g["k5"] = cfg.gains.k5;
  g["k6"] = cfg.gains.k6;
  g["delta1"] = cfg.gains.delta1;
  g["delta2"] = cfg.gains.delta2;
  if (!cfg.reconstructed_gains.empty()) g["reconstructed"] = cfg.reconstructed_gains;
  root["gains"] = g;
  root["velocity_profile"] = profile_json(cfg.profile);
  root["integrator"] = {{"scheme", scheme_name(cfg.integrator.scheme)},
                        {"step", cfg.integrator.step},
                        {"duration", cfg.integrator.duration},
                        {"collision_epsilon", cfg.integrator.collision_epsilon},
                        {"max_abs_state", cfg.integrator.max_abs_state}};
  json ic = {{"seed", cfg.initial.seed},
             {"box_half_width", cfg.initial.box_half_width},
             {"on_target", cfg.initial.on_target}};
  if (cfg.initial.follower_positions) {
    ic["follower_positions"] = columns_json(*cfg.initial.follower_positions);
  }
  if (cfg.initial.follower_velocities) {
    ic["follower_velocities"] = columns_json(*cfg.initial.follower_velocities);
  }
  root["initialization"] = ic;
  root["controller"] = {
      {"boundary_layer", cfg.controller.boundary_layer},
      {"sign_flipped_estimator", cfg.controller.estimator_form == EstimatorForm::kSignFlipped}};
  root["override_rigidity"] = cfg.override_rigidity;
  root["output"] = {{"decimation", cfg.output.decimation}, {"formats", cfg.output.formats}};
  const ReportPolicy& p = cfg.policy;
  root["report"] = {{"position_threshold", p.position_threshold},
                    {"bearing_threshold", p.bearing_threshold},
                    {"velocity_threshold", p.velocity_threshold},
                    {"estimator_threshold", p.estimator_threshold},
                    {"final_window_fraction", p.final_window_fraction},
                    {"min_duration", p.min_duration},
                    {"divergence_factor", p.divergence_factor}};
  return root.dump(2) + "\n";
}

bool equivalent(const ScenarioConfig& a, const ScenarioConfig& b) {
  const auto& fa = a.formation;
  const auto& fb = b.formation;
  if (a.name != b.name || a.description != b.description) return false;
  if (fa.dimension != fb.dimension || fa.agents != fb.agents || fa.leaders != fb.leaders ||
      !same(fa.leader_positions, fb.leader_positions) || fa.edges.size() != fb.edges.size()) {
    return false;
  }
  for (std::size_t k = 0; k < fa.edges.size(); ++k) {
    if (fa.edges[k].from != fb.edges[k].from || fa.edges[k].to != fb.edges[k].to ||
        !same(fa.edges[k].bearing, fb.edges[k].bearing)) {
      return false;
    }
  }
  const GainSet& ga = a.gains;
  const GainSet& gb = b.gains;
  const ReportPolicy& pa = a.policy;
  const ReportPolicy& pb = b.policy;
  return a.renormalize_bearings == b.renormalize_bearings && a.law == b.law && ga.k1 == gb.k1 &&
         ga.k2 == gb.k2 && ga.k3 == gb.k3 && ga.k4 == gb.k4 && ga.k5 == gb.k5 && ga.k6 == gb.k6 &&
         ga.delta1 == gb.delta1 && ga.delta2 == gb.delta2 &&
         a.reconstructed_gains == b.reconstructed_gains && same_profile(a.profile, b.profile) &&
         a.integrator.scheme == b.integrator.scheme && a.integrator.step == b.integrator.step &&
         a.integrator.duration == b.integrator.duration &&
         a.integrator.collision_epsilon == b.integrator.collision_epsilon &&
         a.integrator.max_abs_state == b.integrator.max_abs_state &&
         a.initial.seed == b.initial.seed && a.initial.box_half_width == b.initial.box_half_width &&
         a.initial.on_target == b.initial.on_target &&
         same(a.initial.follower_positions, b.initial.follower_positions) &&
         same(a.initial.follower_velocities, b.initial.follower_velocities) &&
         a.controller.boundary_layer == b.controller.boundary_layer &&
         a.controller.estimator_form == b.controller.estimator_form &&
         a.override_rigidity == b.override_rigidity &&
         a.output.decimation == b.output.decimation && a.output.formats == b.output.formats &&
         pa.position_threshold == pb.position_threshold &&
         pa.bearing_threshold == pb.bearing_threshold &&
         pa.velocity_threshold == pb.velocity_threshold &&
         pa.estimator_threshold == pb.estimator_threshold &&
         pa.final_window_fraction == pb.final_window_fraction &&
         pa.min_duration == pb.min_duration && pa.divergence_factor == pb.divergence_factor;
}

std::optional<std::string> builtin_scenario(std::string_view name) {
  if (name == "sim1") return std::string(kSim1);
  if (name == "sim2") return std::string(kSim2);
  return std::nullopt;
}

std::vector<std::string> builtin_scenario_names() { return {"sim1", "sim2"}; }

SimulationSetup make_setup(const ScenarioConfig& cfg) {
  SimulationSetup s;
  s.spec = cfg.formation;
  s.profile = cfg.profile;
  s.gains = cfg.gains;
  s.law = cfg.law;
  s.controller = cfg.controller;
  s.integrator = cfg.integrator;
  s.initial = cfg.initial;
  s.decimation = cfg.output.decimation;
  return s;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  const auto v = validate_scenario(cfg);
  if (!v.empty()) {
    std::string msg = "scenario '" + cfg.name + "' is invalid:";
    for (const auto& s : v) msg += "\n  - " + s;
    throw Error(ErrorCode::kValidation, msg);
  }
  RunResult r;
  r.warnings = scenario_warnings(cfg);
  r.trace = simulate(make_setup(cfg));
  r.report = convergence_report(r.trace, cfg.formation, cfg.gains, cfg.policy);
  return r;
}

std::string rigidity_report_json(const ScenarioConfig& cfg) {
  json out;
  out["name"] = cfg.name;
  const auto violations = validate_formation(cfg.formation);
  out["formation_violations"] = violations;
  if (!violations.empty()) return out.dump(2) + "\n";

  const FormationSpec& spec = cfg.formation;
  const auto lap = build_laplacian(spec);
  json lff = json::array();
  for (Eigen::Index r = 0; r < lap.follower_follower.rows(); ++r) {
    lff.push_back(to_json(lap.follower_follower.row(r).transpose()));
  }
  out["laplacian_ff"] = lff;
  Eigen::SelfAdjointEigenSolver<Matrix> leig(lap.follower_follower, Eigen::EigenvaluesOnly);
  out["laplacian_ff_eigenvalues"] = to_json(leig.eigenvalues());

  const auto block = check_follower_block(spec);
  out["follower_block"] = {{"holds", block.holds},
                   {"min_eigenvalue_bff", block.min_eigenvalue},
                   {"max_eigenvalue_bff", block.max_eigenvalue}};
  if (block.holds) {
    const auto realization = solve_desired_positions(spec);
    out["desired_positions"] = columns_json(realization.positions);
    out["localization_residual"] = realization.residual;
    try {
      const auto rig = check_infinitesimal_bearing_rigidity(spec, realization.positions);
      out["bearing_rigidity"] = {{"rigid", rig.rigid},
                                 {"rank", rig.rank},
                                 {"expected_rank", rig.expected_rank},
                                 {"null_dimension", rig.null_dimension},
                                 {"sigma_max", rig.sigma_max},
                                 {"tolerance", rig.tolerance},
                                 {"smallest_kept", rig.smallest_kept},
                                 {"largest_dropped", rig.largest_dropped},
                                 {"realization_residual", rig.realization_residual}};
    } catch (const Error& e) {
      out["bearing_rigidity"] = {{"error", e.what()}};
    }
  }
  if (cfg.law == Law::kEstimator) {
    const auto eig = estimator_error_eigenvalues(spec, cfg.gains, cfg.controller.estimator_form);
    double max_re = -1e300;
    for (Eigen::Index k = 0; k < eig.size(); ++k) max_re = std::max(max_re, eig(k).real());
    out["estimator_max_real_eigenvalue"] = max_re;
  }
  const auto gains = validate_gains(cfg.gains, cfg.law);
  out["gain_margin"] = gains.margin;
  return out.dump(2) + "\n";
}

}  // namespace bft
