#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tis/assembly.hpp"
#include "tis/errors.hpp"
#include "tis/model.hpp"
#include "tis/solver.hpp"

namespace tis {

inline constexpr const char* kVersion = "0.1.0";

/// Resolved experiment configuration. Scalar fields are the run values;
/// sweep.* lists expand into the run grid. E is accepted in Pa and held in
/// MPa internally (mm/N units).
struct ExperimentConfig {
  int grid = 5;
  double panel_side = 50.0;
  double block_length = 0.0;  ///< 0: derive L/(grid+1)
  double height = 3.18;
  double youngs_pa = 18.7e9;
  double poisson = 0.2;
  double friction = 0.23;

  double amplitude = 0.0;
  int oscillations = 3;
  double avg_inclination_deg = 5.0;
  double phase = 0.5 * std::numbers::pi;

  int density = 4;
  int vertical = 0;

  double delta_max_over_h = 3.0;
  double initial_increment = 0.0;  ///< mm; 0: h/200
  double min_increment = 0.0;      ///< mm; 0: h/20000
  double max_increment = 0.0;      ///< mm; 0: h/60
  int max_newton_iterations = 30;
  double residual_tolerance = 1e-6;

  double penalty_scale = 100.0;
  double kappa_t_ratio = 0.1;
  double regularization = 1e-10;

  double indenter_radius = 4.0;
  double indenter_mu = 0.0;

  bool quarter = true;
  bool seedless = true;
  std::string output_dir = "out";
  std::vector<double> snapshots;  ///< delta/h stations

  std::vector<int> sweep_n;
  std::vector<double> sweep_amplitude;
  std::vector<double> sweep_theta;
  std::vector<double> sweep_mu;

  double youngs_mpa() const { return youngs_pa * 1e-6; }

  AssemblySpec assembly_spec() const {
    AssemblySpec s;
    s.grid = grid;
    s.panel_side = panel_side;
    s.block_length = block_length;
    s.height = height;
    s.youngs_mpa = youngs_mpa();
    s.poisson = poisson;
    s.friction = friction;
    s.amplitude = amplitude;
    s.oscillations = amplitude == 0.0 ? 1 : oscillations;
    s.avg_inclination_deg = avg_inclination_deg;
    s.phase = amplitude == 0.0 ? 0.0 : phase;
    s.resolve();
    return s;
  }

  LoadSchedule schedule() const {
    LoadSchedule s = LoadSchedule::defaults(height);
    s.delta_max = delta_max_over_h * height;
    if (initial_increment > 0.0) s.initial_increment = initial_increment;
    if (min_increment > 0.0) s.min_increment = min_increment;
    if (max_increment > 0.0) s.max_increment = max_increment;
    s.max_newton_iterations = max_newton_iterations;
    s.residual_tolerance = residual_tolerance;
    return s;
  }

  ModelOptions model_options() const {
    ModelOptions o;
    o.density = density;
    o.vertical_divisions = vertical;
    o.penalty_scale = penalty_scale;
    o.kappa_t_ratio = kappa_t_ratio;
    o.spring_scale = regularization;
    o.indenter_radius = indenter_radius;
    o.indenter_mu = indenter_mu;
    return o;
  }

  void validate() const {
    if (grid < 3 || grid % 2 == 0) throw ConfigError("grid", "must be odd and >= 3");
    if (!(panel_side > 0.0)) throw ConfigError("L", "must be > 0");
    if (!(height > 0.0)) throw ConfigError("h", "must be > 0");
    if (!(youngs_pa > 0.0)) throw ConfigError("E", "must be > 0");
    if (!(poisson >= 0.0 && poisson < 0.5)) throw ConfigError("nu", "must be in [0, 0.5)");
    if (friction < 0.0) throw ConfigError("mu", "must be >= 0");
    if (amplitude < 0.0) throw ConfigError("profile.amplitude", "must be >= 0");
    if (oscillations < 1) throw ConfigError("profile.oscillations", "must be >= 1");
    if (!(std::abs(avg_inclination_deg) < 45.0))
      throw ConfigError("profile.avg_inclination_deg", "must satisfy |theta| < 45");
    if (density < 1) throw ConfigError("mesh.density", "must be >= 1");
    if (vertical < 0) throw ConfigError("mesh.vertical", "must be >= 0");
    if (!(delta_max_over_h >= 0.0 && delta_max_over_h <= 3.5))
      throw ConfigError("schedule.delta_max_over_h", "must be in [0, 3.5]");
    if (!(residual_tolerance > 0.0))
      throw ConfigError("schedule.residual_tolerance", "must be > 0");
    if (max_newton_iterations < 1)
      throw ConfigError("schedule.max_newton_iterations", "must be >= 1");
    if (!(penalty_scale > 0.0)) throw ConfigError("contact.penalty_scale", "must be > 0");
    if (!(kappa_t_ratio > 0.0)) throw ConfigError("contact.kappa_t_ratio", "must be > 0");
    if (regularization < 0.0) throw ConfigError("solver.regularization", "must be >= 0");
    if (!(indenter_radius > 0.0)) throw ConfigError("indenter.radius", "must be > 0");
    if (indenter_mu < 0.0) throw ConfigError("indenter.mu", "must be >= 0");
    for (int n : sweep_n)
      if (n < 1) throw ConfigError("sweep.n", "entries must be >= 1");
    for (double a : sweep_amplitude)
      if (a < 0.0) throw ConfigError("sweep.amplitude", "entries must be >= 0");
    for (double m : sweep_mu)
      if (m < 0.0) throw ConfigError("sweep.mu", "entries must be >= 0");
    for (double s : snapshots)
      if (s < 0.0) throw ConfigError("run.snapshots", "entries must be >= 0");
    assembly_spec().validate();
  }

  /// Physics-affecting parameters in canonical order; hashed into the run id.
  std::string canonical_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "grid=" << grid << "\nL=" << panel_side << "\nl="
       << (block_length == 0.0 ? panel_side / (grid + 1) : block_length) << "\nh=" << height
       << "\nE=" << youngs_pa << "\nnu=" << poisson << "\nmu=" << friction
       << "\nprofile.amplitude=" << amplitude
       << "\nprofile.oscillations=" << (amplitude == 0.0 ? 1 : oscillations)
       << "\nprofile.avg_inclination_deg=" << avg_inclination_deg
       << "\nprofile.phase=" << (amplitude == 0.0 ? 0.0 : phase) << "\nmesh.density=" << density
       << "\nmesh.vertical=" << vertical << "\nschedule.delta_max_over_h=" << delta_max_over_h
       << "\nschedule.initial_increment=" << initial_increment
       << "\nschedule.min_increment=" << min_increment
       << "\nschedule.max_increment=" << max_increment
       << "\nschedule.max_newton_iterations=" << max_newton_iterations
       << "\nschedule.residual_tolerance=" << residual_tolerance
       << "\ncontact.penalty_scale=" << penalty_scale
       << "\ncontact.kappa_t_ratio=" << kappa_t_ratio
       << "\nsolver.regularization=" << regularization
       << "\nindenter.radius=" << indenter_radius << "\nindenter.mu=" << indenter_mu
       << "\nrun.quarter=" << (quarter ? 1 : 0) << "\n";
    return os.str();
  }
};

inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string run_id_of(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg.canonical_text())));
  return std::string(buf);
}

struct ResolvedRun {
  ExperimentConfig cfg;  ///< sweep lists cleared, scalars resolved
  std::string id;
};

/// Expand the sweep grid (n x A x theta x mu); planar entries collapse to a
/// canonical n=1, and duplicate ids are dropped.
inline std::vector<ResolvedRun> expand_runs(const ExperimentConfig& base) {
  std::vector<int> ns = base.sweep_n.empty() ? std::vector<int>{base.oscillations} : base.sweep_n;
  std::vector<double> amps =
      base.sweep_amplitude.empty() ? std::vector<double>{base.amplitude} : base.sweep_amplitude;
  std::vector<double> thetas =
      base.sweep_theta.empty() ? std::vector<double>{base.avg_inclination_deg} : base.sweep_theta;
  std::vector<double> mus =
      base.sweep_mu.empty() ? std::vector<double>{base.friction} : base.sweep_mu;

  std::vector<ResolvedRun> out;
  std::map<std::string, bool> seen;
  for (int n : ns)
    for (double a : amps)
      for (double th : thetas)
        for (double mu : mus) {
          ResolvedRun r;
          r.cfg = base;
          r.cfg.sweep_n.clear();
          r.cfg.sweep_amplitude.clear();
          r.cfg.sweep_theta.clear();
          r.cfg.sweep_mu.clear();
          r.cfg.oscillations = a == 0.0 ? 1 : n;
          r.cfg.amplitude = a;
          r.cfg.avg_inclination_deg = th;
          r.cfg.friction = mu;
          r.id = run_id_of(r.cfg);
          if (seen.count(r.id)) continue;
          seen[r.id] = true;
          out.push_back(std::move(r));
        }
  return out;
}

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (...) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

inline int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return i;
  } catch (...) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F item) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(item(key, tok));
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

}  // namespace detail

/// Parse the flat `key = value` configuration text (see README for keys).
/// Unknown keys are rejected with their key path.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (val.empty()) throw ConfigError(key, "missing value");

    if (key == "grid") cfg.grid = detail::parse_int(key, val);
    else if (key == "L") cfg.panel_side = detail::parse_double(key, val);
    else if (key == "l") cfg.block_length = detail::parse_double(key, val);
    else if (key == "h") cfg.height = detail::parse_double(key, val);
    else if (key == "E") cfg.youngs_pa = detail::parse_double(key, val);
    else if (key == "nu") cfg.poisson = detail::parse_double(key, val);
    else if (key == "mu") cfg.friction = detail::parse_double(key, val);
    else if (key == "profile.amplitude") cfg.amplitude = detail::parse_double(key, val);
    else if (key == "profile.oscillations") cfg.oscillations = detail::parse_int(key, val);
    else if (key == "profile.avg_inclination_deg")
      cfg.avg_inclination_deg = detail::parse_double(key, val);
    else if (key == "profile.phase") cfg.phase = detail::parse_double(key, val);
    else if (key == "mesh.density") cfg.density = detail::parse_int(key, val);
    else if (key == "mesh.vertical") cfg.vertical = detail::parse_int(key, val);
    else if (key == "schedule.delta_max_over_h")
      cfg.delta_max_over_h = detail::parse_double(key, val);
    else if (key == "schedule.initial_increment")
      cfg.initial_increment = detail::parse_double(key, val);
    else if (key == "schedule.min_increment") cfg.min_increment = detail::parse_double(key, val);
    else if (key == "schedule.max_increment") cfg.max_increment = detail::parse_double(key, val);
    else if (key == "schedule.max_newton_iterations")
      cfg.max_newton_iterations = detail::parse_int(key, val);
    else if (key == "schedule.residual_tolerance")
      cfg.residual_tolerance = detail::parse_double(key, val);
    else if (key == "contact.penalty_scale") cfg.penalty_scale = detail::parse_double(key, val);
    else if (key == "contact.kappa_t_ratio") cfg.kappa_t_ratio = detail::parse_double(key, val);
    else if (key == "solver.regularization") cfg.regularization = detail::parse_double(key, val);
    else if (key == "indenter.radius") cfg.indenter_radius = detail::parse_double(key, val);
    else if (key == "indenter.mu") cfg.indenter_mu = detail::parse_double(key, val);
    else if (key == "run.quarter") cfg.quarter = detail::parse_bool(key, val);
    else if (key == "run.seedless") cfg.seedless = detail::parse_bool(key, val);
    else if (key == "run.output_dir") cfg.output_dir = val;
    else if (key == "run.snapshots")
      cfg.snapshots = detail::parse_list<double>(key, val, detail::parse_double);
    else if (key == "sweep.n") cfg.sweep_n = detail::parse_list<int>(key, val, detail::parse_int);
    else if (key == "sweep.amplitude")
      cfg.sweep_amplitude = detail::parse_list<double>(key, val, detail::parse_double);
    else if (key == "sweep.avg_inclination_deg")
      cfg.sweep_theta = detail::parse_list<double>(key, val, detail::parse_double);
    else if (key == "sweep.mu")
      cfg.sweep_mu = detail::parse_list<double>(key, val, detail::parse_double);
    else
      throw ConfigError(key, "unknown key");
  }
  cfg.validate();
  return cfg;
}

}  // namespace tis
