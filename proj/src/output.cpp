#include "bft/output.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace bft {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string axis_name(int k, int d) {
  if (d <= 3) return std::string(1, "xyz"[k]);
  return "a" + std::to_string(k + 1);
}

void add_block(std::vector<std::string>& cols, const std::string& prefix, int agent, int d) {
  for (int k = 0; k < d; ++k) cols.push_back(prefix + std::to_string(agent + 1) + "_" + axis_name(k, d));
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

// Minimal line-chart writer: stacked panels sharing one SVG canvas.
class SvgChart {
 public:
  struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
  };
  struct Panel {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_y = false;
    bool equal_aspect = false;
    std::vector<Series> series;
  };

  explicit SvgChart(std::string title) : title_(std::move(title)) {}
  void add(Panel p) { panels_.push_back(std::move(p)); }

  std::string render() const {
    const double w = 760, ph = 300, top = 40, gap = 60;
    const double h = top + panels_.size() * (ph + gap);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(title_) << "</text>\n";
    for (std::size_t k = 0; k < panels_.size(); ++k) {
      render_panel(os, panels_[k], 70, top + k * (ph + gap) + 20, w - 230, ph - 30);
    }
    os << "</svg>\n";
    return os.str();
  }

 private:
  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '<') out += "&lt;";
      else if (c == '>') out += "&gt;";
      else if (c == '&') out += "&amp;";
      else out += c;
    }
    return out;
  }

  static const char* color(std::size_t k) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[k % 10];
  }

  static void render_panel(std::ostringstream& os, const Panel& p, double x0, double y0,
                           double pw, double ph) {
    const double floor_y = 1e-16;
    auto ty = [&](double v) { return p.log_y ? std::log10(std::max(v, floor_y)) : v; };
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : p.series) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, ty(s.y[i]));
        ymax = std::max(ymax, ty(s.y[i]));
      }
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax - xmin < 1e-12) xmax = xmin + 1;
    if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    if (p.equal_aspect) {
      const double sx = (xmax - xmin) / pw, sy = (ymax - ymin) / ph;
      const double s = std::max(sx, sy);
      const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
      xmin = cx - 0.5 * s * pw, xmax = cx + 0.5 * s * pw;
      ymin = cy - 0.5 * s * ph, ymax = cy + 0.5 * s * ph;
    }
    auto sx = [&](double v) { return x0 + (v - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double v) { return y0 + ph - (v - ymin) / (ymax - ymin) * ph; };

    os << "<g>\n<text x=\"" << x0 + pw / 2 << "\" y=\"" << y0 - 6
       << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(p.title) << "</text>\n";
    os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
      const double xv = xmin + k * (xmax - xmin) / 5;
      const double yv = ymin + k * (ymax - ymin) / 5;
      char xl[32], yl[32];
      std::snprintf(xl, sizeof xl, "%.3g", xv);
      if (p.log_y) std::snprintf(yl, sizeof yl, "1e%.1f", yv);
      else std::snprintf(yl, sizeof yl, "%.3g", yv);
      os << "<line x1=\"" << sx(xv) << "\" y1=\"" << y0 + ph << "\" x2=\"" << sx(xv) << "\" y2=\""
         << y0 + ph + 4 << "\" stroke=\"black\"/>"
         << "<text x=\"" << sx(xv) << "\" y=\"" << y0 + ph + 16 << "\" text-anchor=\"middle\">" << xl
         << "</text>\n";
      os << "<line x1=\"" << x0 - 4 << "\" y1=\"" << sy(yv) << "\" x2=\"" << x0 << "\" y2=\""
         << sy(yv) << "\" stroke=\"black\"/>"
         << "<text x=\"" << x0 - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << yl
         << "</text>\n";
    }
    os << "<text x=\"" << x0 + pw / 2 << "\" y=\"" << y0 + ph + 32 << "\" text-anchor=\"middle\">"
       << escape(p.xlabel) << "</text>\n";
    os << "<text transform=\"translate(" << x0 - 52 << ',' << y0 + ph / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape(p.ylabel) << "</text>\n";

    for (std::size_t k = 0; k < p.series.size(); ++k) {
      const Series& s = p.series[k];
      os << "<polyline fill=\"none\" stroke-width=\"1.3\" stroke=\"" << color(k) << "\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        char pt[64];
        std::snprintf(pt, sizeof pt, "%.2f,%.2f ", sx(s.x[i]), sy(ty(s.y[i])));
        os << pt;
      }
      os << "\"/>\n";
      if (s.markers && !s.x.empty()) {
        os << "<circle cx=\"" << sx(s.x.front()) << "\" cy=\"" << sy(ty(s.y.front()))
           << "\" r=\"3\" fill=\"none\" stroke=\"" << color(k) << "\"/>\n";
        os << "<circle cx=\"" << sx(s.x.back()) << "\" cy=\"" << sy(ty(s.y.back())) << "\" r=\"3\" fill=\""
           << color(k) << "\"/>\n";
      }
      const double ly = y0 + 12 + 16 * k;
      os << "<line x1=\"" << x0 + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << x0 + pw + 32
         << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color(k) << "\" stroke-width=\"2\"/>"
         << "<text x=\"" << x0 + pw + 38 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
    }
    os << "</g>\n";
  }

  std::string title_;
  std::vector<Panel> panels_;
};

std::vector<double> times_of(const Trace& trace) {
  std::vector<double> t;
  for (const auto& s : trace.samples) t.push_back(s.time);
  return t;
}

template <class F>
std::vector<double> collect(const Trace& trace, F f) {
  std::vector<double> out;
  out.reserve(trace.samples.size());
  for (const auto& s : trace.samples) out.push_back(f(s));
  return out;
}

std::string run_title(const Trace& trace) {
  return std::string("law ") + law_name(trace.law) + ", " + std::to_string(trace.agents) + " agents";
}

json stats_json(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  double lo = v.front(), hi = v.front(), sum = 0.0;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
  }
  return {{"min", lo}, {"max", hi}, {"mean", sum / static_cast<double>(v.size())}};
}

}  // namespace

std::vector<std::string> trace_columns(const Trace& trace) {
  const int d = trace.dimension;
  const int n = trace.agents;
  const int l = trace.leaders;
  std::vector<std::string> cols{"time"};
  for (int i = 0; i < n; ++i) add_block(cols, "p", i, d);
  for (int i = 0; i < n; ++i) add_block(cols, "v", i, d);
  for (int i = l; i < n; ++i) add_block(cols, "s", i, d);
  for (int i = l; i < n; ++i) add_block(cols, "u", i, d);
  if (trace.law == Law::kEstimator) {
    for (const char* prefix : {"phat", "vhat", "pbar", "vbar"}) {
      for (int i = l; i < n; ++i) add_block(cols, prefix, i, d);
    }
  }
  for (int i = 0; i < n; ++i) cols.push_back("e" + std::to_string(i + 1));
  for (const Edge& e : trace.edges) {
    cols.push_back("e" + std::to_string(e.from + 1) + "_" + std::to_string(e.to + 1));
  }
  for (int i = l; i < n; ++i) cols.push_back("ev" + std::to_string(i + 1));
  cols.insert(cols.end(), {"s_norm", "s_inf", "phi_norm"});
  if (trace.law == Law::kEstimator) {
    cols.insert(cols.end(), {"gamma_norm", "delta_norm", "pbar_err", "vbar_err"});
  }
  cols.push_back("collision");
  return cols;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  const auto cols = trace_columns(trace);
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  const int l = trace.leaders;
  const int f = trace.agents - l;
  std::string row;
  auto put = [&](double v) {
    row += ',';
    row += num(v);
  };
  auto put_cols = [&](const Matrix& m, int first, int count) {
    for (int j = first; j < first + count; ++j) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) put(m(r, j));
    }
  };
  for (const TraceSample& s : trace.samples) {
    row = num(s.time);
    put_cols(s.state.position, 0, trace.agents);
    put_cols(s.state.velocity, 0, trace.agents);
    for (Eigen::Index k = 0; k < s.sliding.size(); ++k) put(s.sliding(k));
    for (Eigen::Index k = 0; k < s.input.size(); ++k) put(s.input(k));
    if (trace.law == Law::kEstimator) {
      put_cols(s.state.est_position, l, f);
      put_cols(s.state.est_velocity, l, f);
      put_cols(s.state.ref_position, l, f);
      put_cols(s.state.ref_velocity, l, f);
    }
    const MetricsSample& m = s.metrics;
    for (double v : m.position_error) put(v);
    for (double v : m.bearing_error) put(v);
    for (double v : m.velocity_error) put(v);
    put(m.sliding_norm);
    put(m.sliding_inf_norm);
    put(m.phi_norm);
    if (trace.law == Law::kEstimator) {
      put(m.gamma_norm);
      put(m.delta_norm);
      put(m.ref_position_error);
      put(m.ref_velocity_error);
    }
    row += m.collision ? ",1" : ",0";
    out << row << '\n';
  }
}

std::string summary_json(const ScenarioConfig& config, const RunResult& result) {
  const Trace& trace = result.trace;
  const ConvergenceReport& r = result.report;
  json out;
  out["scenario"] = config.name;
  out["law"] = law_name(trace.law);
  out["seed"] = config.initial.seed;
  out["scheme"] = scheme_name(config.integrator.scheme);
  out["step"] = trace.step;
  out["duration"] = trace.duration;
  out["decimation"] = trace.decimation;
  out["samples"] = trace.samples.size();
  out["termination"] = {{"status", termination_name(trace.termination)},
                        {"message", trace.message},
                        {"time", trace.termination_time},
                        {"agent", trace.termination_agent >= 0 ? json(trace.termination_agent + 1)
                                                               : json(nullptr)}};
  out["verdict"] = verdict_name(r.verdict);
  out["reasons"] = r.reasons;
  out["warnings"] = result.warnings;
  out["thresholds"] = {{"position", config.policy.position_threshold},
                       {"bearing", config.policy.bearing_threshold},
                       {"velocity", config.policy.velocity_threshold},
                       {"estimator", config.policy.estimator_threshold},
                       {"final_window_fraction", config.policy.final_window_fraction}};
  json fw = {{"start", r.window_start},
             {"end", r.final_time},
             {"max_position_error", r.max_position_error},
             {"max_bearing_error", r.max_bearing_error},
             {"max_velocity_error", r.max_velocity_error},
             {"max_sliding_norm", r.max_sliding_norm}};
  if (trace.law == Law::kEstimator) {
    fw["max_gamma"] = r.max_gamma;
    fw["max_delta"] = r.max_delta;
    fw["max_ref_position_error"] = r.max_ref_position_error;
    fw["max_ref_velocity_error"] = r.max_ref_velocity_error;
  }
  out["final_window"] = fw;
  out["first_crossing"] = {{"position", optional_json(r.position_crossing)},
                           {"bearing", optional_json(r.bearing_crossing)},
                           {"velocity", optional_json(r.velocity_crossing)},
                           {"estimator", optional_json(r.estimator_crossing)}};
  if (r.settling) {
    const SettlingCheck& s = *r.settling;
    out["sliding_settling"] = {{"v0", s.v0},
                               {"kappa", s.kappa},
                               {"bound", s.bound},
                               {"threshold", s.threshold},
                               {"slack", s.slack},
                               {"settled", s.settled},
                               {"settle_time", s.settled ? json(s.settle_time) : json(nullptr)},
                               {"within_bound", s.within}};
  }
  out["sliding_monotone_fraction"] = r.sliding_monotone_fraction;
  json rates = {{"phi", r.phi_rate}};
  if (trace.law == Law::kDirect) rates["phi_expected"] = r.phi_rate_expected;
  if (trace.law == Law::kEstimator) {
    rates["gamma"] = r.gamma_rate;
    rates["delta"] = r.delta_rate;
    rates["estimator_expected"] = r.estimator_rate_expected;
    out["estimator"] = {{"growth", r.estimator_growth}, {"divergence", r.estimator_divergence}};
  }
  out["decay_rates"] = rates;
  if (!trace.samples.empty()) {
    const MetricsSample& m = trace.samples.back().metrics;
    json last = {{"time", trace.samples.back().time},
                 {"position_error", m.position_error},
                 {"bearing_error", m.bearing_error},
                 {"velocity_error", m.velocity_error},
                 {"sliding_norm", m.sliding_norm},
                 {"phi_norm", m.phi_norm}};
    if (trace.law == Law::kEstimator) {
      last["gamma_norm"] = m.gamma_norm;
      last["delta_norm"] = m.delta_norm;
    }
    out["final_sample"] = last;
  }
  return out.dump(2) + "\n";
}

std::string report_text(const ScenarioConfig& config, const RunResult& result) {
  const Trace& trace = result.trace;
  const ConvergenceReport& r = result.report;
  std::ostringstream os;
  auto line = [&](const std::string& key, const std::string& value) {
    os << key << " = " << value << '\n';
  };
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("never"); };
  line("scenario", config.name);
  line("law", law_name(trace.law));
  line("seed", std::to_string(config.initial.seed));
  line("verdict", verdict_name(r.verdict));
  for (std::size_t k = 0; k < r.reasons.size(); ++k) line("reason." + std::to_string(k + 1), r.reasons[k]);
  for (std::size_t k = 0; k < result.warnings.size(); ++k) {
    line("warning." + std::to_string(k + 1), result.warnings[k]);
  }
  line("termination.status", termination_name(trace.termination));
  if (trace.termination != Termination::kCompleted) {
    line("termination.time", num(trace.termination_time));
    line("termination.agent", std::to_string(trace.termination_agent + 1));
    line("termination.message", trace.message);
  }
  line("final_window.start", num(r.window_start));
  line("final_window.end", num(r.final_time));
  line("final_window.max_position_error", num(r.max_position_error));
  line("final_window.max_bearing_error", num(r.max_bearing_error));
  line("final_window.max_velocity_error", num(r.max_velocity_error));
  line("final_window.max_sliding_norm", num(r.max_sliding_norm));
  if (trace.law == Law::kEstimator) {
    line("final_window.max_gamma", num(r.max_gamma));
    line("final_window.max_delta", num(r.max_delta));
  }
  line("first_crossing.position", opt(r.position_crossing));
  line("first_crossing.bearing", opt(r.bearing_crossing));
  line("first_crossing.velocity", opt(r.velocity_crossing));
  if (trace.law == Law::kEstimator) line("first_crossing.estimator", opt(r.estimator_crossing));
  if (r.settling) {
    line("sliding.bound", num(r.settling->bound));
    line("sliding.settled", r.settling->settled ? "true" : "false");
    if (r.settling->settled) line("sliding.settle_time", num(r.settling->settle_time));
    line("sliding.within_bound", r.settling->within ? "true" : "false");
  }
  line("sliding.monotone_fraction", num(r.sliding_monotone_fraction));
  line("rate.phi", num(r.phi_rate));
  if (trace.law == Law::kDirect) line("rate.phi_expected", num(r.phi_rate_expected));
  if (trace.law == Law::kEstimator) {
    line("rate.gamma", num(r.gamma_rate));
    line("rate.delta", num(r.delta_rate));
    line("rate.estimator_expected", num(r.estimator_rate_expected));
    line("estimator.growth", num(r.estimator_growth));
    line("estimator.divergence", r.estimator_divergence ? "true" : "false");
  }
  return os.str();
}

std::string trajectories_svg(const Trace& trace) {
  SvgChart chart("Trajectories (" + run_title(trace) + ")");
  SvgChart::Panel p{"positions", "x [m]", "y [m]", false, true, {}};
  for (int i = 0; i < trace.agents; ++i) {
    SvgChart::Series s;
    s.label = (i < trace.leaders ? "leader " : "agent ") + std::to_string(i + 1);
    s.markers = true;
    for (const auto& smp : trace.samples) {
      s.x.push_back(smp.state.position(0, i));
      s.y.push_back(trace.dimension > 1 ? smp.state.position(1, i) : 0.0);
    }
    p.series.push_back(std::move(s));
  }
  chart.add(std::move(p));
  return chart.render();
}

std::string errors_svg(const Trace& trace) {
  SvgChart chart("Errors (" + run_title(trace) + ")");
  const auto t = times_of(trace);
  SvgChart::Panel pos{"position error ||p_i - p*_i||^2", "t [s]", "log10", true, false, {}};
  for (int i = trace.leaders; i < trace.agents; ++i) {
    pos.series.push_back({"e" + std::to_string(i + 1), t,
                          collect(trace, [&](const TraceSample& s) {
                            return s.metrics.position_error[i];
                          }),
                          false});
  }
  chart.add(std::move(pos));
  SvgChart::Panel bear{"bearing error ||g_ij - g*_ij||^2", "t [s]", "log10", true, false, {}};
  for (std::size_t k = 0; k < trace.edges.size(); ++k) {
    const Edge& e = trace.edges[k];
    bear.series.push_back({"e" + std::to_string(e.from + 1) + std::to_string(e.to + 1), t,
                           collect(trace, [&](const TraceSample& s) {
                             return s.metrics.bearing_error[k];
                           }),
                           false});
  }
  chart.add(std::move(bear));
  SvgChart::Panel slide{"sliding variable", "t [s]", "log10", true, false, {}};
  slide.series.push_back(
      {"||s||", t, collect(trace, [](const TraceSample& s) { return s.metrics.sliding_norm; }), false});
  slide.series.push_back(
      {"||phi||", t, collect(trace, [](const TraceSample& s) { return s.metrics.phi_norm; }), false});
  if (trace.law == Law::kEstimator) {
    slide.series.push_back(
        {"||gamma||", t, collect(trace, [](const TraceSample& s) { return s.metrics.gamma_norm; }), false});
    slide.series.push_back(
        {"||delta||", t, collect(trace, [](const TraceSample& s) { return s.metrics.delta_norm; }), false});
    slide.title = "sliding variable and estimator errors";
  }
  chart.add(std::move(slide));
  return chart.render();
}

std::string velocities_svg(const Trace& trace) {
  SvgChart chart("Velocities (" + run_title(trace) + ")");
  const auto t = times_of(trace);
  for (int k = 0; k < trace.dimension; ++k) {
    SvgChart::Panel p{"velocity " + axis_name(k, trace.dimension), "t [s]", "m/s", false, false, {}};
    for (int i = 0; i < trace.agents; ++i) {
      p.series.push_back({"v" + std::to_string(i + 1), t,
                          collect(trace, [&](const TraceSample& s) { return s.state.velocity(k, i); }),
                          false});
    }
    chart.add(std::move(p));
  }
  return chart.render();
}

std::vector<fs::path> write_run(const ScenarioConfig& config, const RunResult& result,
                                const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  auto wants = [&](const char* f) {
    return std::find(config.output.formats.begin(), config.output.formats.end(), f) !=
           config.output.formats.end();
  };
  std::vector<fs::path> written;
  if (wants("csv")) {
    const fs::path p = dir / "trace.csv";
    std::ostringstream os;
    write_trace_csv(result.trace, os);
    write_file(p, os.str());
    written.push_back(p);
  }
  if (wants("json")) {
    written.push_back(dir / "summary.json");
    write_file(written.back(), summary_json(config, result));
  }
  written.push_back(dir / "report.txt");
  write_file(written.back(), report_text(config, result));
  if (wants("svg")) {
    written.push_back(dir / "trajectories.svg");
    write_file(written.back(), trajectories_svg(result.trace));
    written.push_back(dir / "errors.svg");
    write_file(written.back(), errors_svg(result.trace));
    written.push_back(dir / "velocities.svg");
    write_file(written.back(), velocities_svg(result.trace));
  }
  return written;
}

bool SweepResult::all_pass() const {
  return !runs.empty() && std::all_of(runs.begin(), runs.end(),
                                      [](const SweepRun& r) { return r.verdict == Verdict::kPass; });
}

SweepResult run_sweep(const ScenarioConfig& config, const std::vector<std::uint64_t>& seeds,
                      const fs::path& dir, unsigned threads) {
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep needs at least one seed");
  const auto violations = validate_scenario(config);
  if (!violations.empty()) {
    std::string msg = "scenario '" + config.name + "' is invalid:";
    for (const auto& s : violations) msg += "\n  - " + s;
    throw Error(ErrorCode::kValidation, msg);
  }
  SweepResult out;
  out.runs.resize(seeds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(seeds.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < seeds.size(); k = next++) {
      SweepRun& run = out.runs[k];
      run.seed = seeds[k];
      run.directory = dir / ("seed-" + std::to_string(seeds[k]));
      try {
        ScenarioConfig cfg = config;
        cfg.initial.seed = seeds[k];
        const RunResult r = run_scenario(cfg);
        write_run(cfg, r, run.directory);
        run.verdict = r.report.verdict;
        run.max_position_error = r.report.max_position_error;
        run.max_bearing_error = r.report.max_bearing_error;
        run.max_velocity_error = r.report.max_velocity_error;
        run.max_estimator_error = std::max(r.report.max_gamma, r.report.max_delta);
      } catch (const std::exception& e) {
        run.verdict = Verdict::kFail;
        run.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json summary;
  summary["scenario"] = config.name;
  summary["law"] = law_name(config.law);
  json runs = json::array();
  std::vector<double> pos, bear, vel, est;
  int passed = 0;
  for (const SweepRun& r : out.runs) {
    json j = {{"seed", r.seed},
              {"directory", r.directory.filename().string()},
              {"verdict", verdict_name(r.verdict)},
              {"max_position_error", r.max_position_error},
              {"max_bearing_error", r.max_bearing_error},
              {"max_velocity_error", r.max_velocity_error}};
    if (config.law == Law::kEstimator) j["max_estimator_error"] = r.max_estimator_error;
    if (!r.error.empty()) j["error"] = r.error;
    runs.push_back(j);
    if (!r.error.empty()) continue;
    pos.push_back(r.max_position_error);
    bear.push_back(r.max_bearing_error);
    vel.push_back(r.max_velocity_error);
    est.push_back(r.max_estimator_error);
    passed += r.verdict == Verdict::kPass;
  }
  summary["runs"] = runs;
  summary["passed"] = passed;
  summary["total"] = out.runs.size();
  json agg = {{"max_position_error", stats_json(pos)},
              {"max_bearing_error", stats_json(bear)},
              {"max_velocity_error", stats_json(vel)}};
  if (config.law == Law::kEstimator) agg["max_estimator_error"] = stats_json(est);
  summary["aggregate"] = agg;
  std::error_code ec;
  fs::create_directories(dir, ec);
  out.summary_path = dir / "sweep.json";
  write_file(out.summary_path, summary.dump(2) + "\n");
  return out;
}

}  // namespace bft
