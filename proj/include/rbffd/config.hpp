#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "rbffd/benchmarks.hpp"

namespace rbffd {

/// Flat key = value run configuration; every field has a spelled-out default
/// so the effective-config echo round-trips.
struct RunConfig {
  std::string case_id = "annulus";
  Approach approach = Approach::composed;
  int m = 3;
  int p = 2;
  int p_fd = 2;
  double alpha_d = 0.5;
  double alpha_s = 0.0;
  double h = 0.066;
  unsigned long long seed = 1;
  std::optional<double> p_min, p_max, dp;  // default: the case's load program
  double e_tol = 1e-7;
  int nri_max = 70;
  std::string residual_rows = "all";  // all | force
  int threads = 1;

  // optional material overrides
  std::optional<double> E, nu, sigma_y0, H;
  std::optional<std::string> plane_mode;  // plane_strain | plane_stress

  // sweep grids (sweep verb only)
  std::vector<double> sweep_h;
  std::vector<int> sweep_p;
  std::vector<Approach> sweep_approach;
  std::vector<double> sweep_alpha_d;
  std::vector<double> sweep_alpha_s;
  bool with_kappa = false;

  std::vector<std::string> warnings;

  NewtonOptions newton() const {
    NewtonOptions n;
    n.tol = e_tol;
    n.max_iters = nri_max;
    n.residual_force_rows_only = residual_rows == "force";
    return n;
  }

  /// Benchmark case with overrides and the configured load program applied.
  BenchmarkCase make_configured_case() const {
    BenchmarkCase bc = make_case(case_id);
    if (E) bc.material.E = *E;
    if (nu) bc.material.nu = *nu;
    if (sigma_y0 || H) {
      double sy0 = sigma_y0.value_or(bc.material.sigma_y0());
      double hmod = H.value_or(bc.material.curve.slope(0.0));
      bc.material.curve = HardeningCurve::linear(sy0, hmod);
    }
    if (plane_mode)
      bc.material.mode =
          *plane_mode == "plane_stress" ? PlaneMode::plane_stress : PlaneMode::plane_strain;
    if (p_min) bc.loads.p_min = *p_min;
    if (p_max) bc.loads.p_max = *p_max;
    if (dp) bc.loads.dp = *dp;
    const double hh = h;
    bc.domain.density = [hh](const Vec2&) { return uniform_density(hh); };
    bc.domain.finalize();
    return bc;
  }

  ApproachConfig approach_config() const {
    ApproachConfig cfg;
    cfg.approach = approach;
    cfg.m = m;
    cfg.p = p;
    cfg.p_fd = p_fd;
    cfg.alpha_d = alpha_d;
    cfg.alpha_s = alpha_s;
    return cfg;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (...) {
    throw ConfigError("key '" + key + "': not a number: " + v);
  }
  if (pos != v.size()) throw ConfigError("key '" + key + "': trailing characters in " + v);
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  double x = parse_double(key, v);
  long long i = static_cast<long long>(std::llround(x));
  if (x != static_cast<double>(i)) throw ConfigError("key '" + key + "': expected an integer");
  return i;
}

inline Approach parse_approach(const std::string& key, const std::string& v) {
  if (v == "direct") return Approach::direct;
  if (v == "composed") return Approach::composed;
  if (v == "hybrid") return Approach::hybrid;
  throw ConfigError("key '" + key + "': unknown approach " + v);
}

}  // namespace detail

/// Parse and fully validate a flat key = value document. Lines starting with
/// '#' are comments. Unknown keys are rejected by name.
inline RunConfig parse_config(std::istream& in) {
  static const std::set<std::string> known = {
      "case", "approach", "m", "p", "p_fd", "alpha_d", "alpha_s", "h", "seed",
      "p_min", "p_max", "dp", "e_tol", "nri_max", "residual_rows", "threads",
      "E", "nu", "sigma_y0", "H", "plane_mode",
      "sweep_h", "sweep_p", "sweep_approach", "sweep_alpha_d", "sweep_alpha_s", "with_kappa"};
  RunConfig c;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(t.substr(0, eq));
    std::string val = detail::trim(t.substr(eq + 1));
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");

    if (key == "case") c.case_id = val;
    else if (key == "approach") c.approach = detail::parse_approach(key, val);
    else if (key == "m") c.m = static_cast<int>(detail::parse_int(key, val));
    else if (key == "p") c.p = static_cast<int>(detail::parse_int(key, val));
    else if (key == "p_fd") c.p_fd = static_cast<int>(detail::parse_int(key, val));
    else if (key == "alpha_d") c.alpha_d = detail::parse_double(key, val);
    else if (key == "alpha_s") c.alpha_s = detail::parse_double(key, val);
    else if (key == "h") c.h = detail::parse_double(key, val);
    else if (key == "seed") c.seed = static_cast<unsigned long long>(detail::parse_int(key, val));
    else if (key == "p_min") c.p_min = detail::parse_double(key, val);
    else if (key == "p_max") c.p_max = detail::parse_double(key, val);
    else if (key == "dp") c.dp = detail::parse_double(key, val);
    else if (key == "e_tol") c.e_tol = detail::parse_double(key, val);
    else if (key == "nri_max") c.nri_max = static_cast<int>(detail::parse_int(key, val));
    else if (key == "residual_rows") c.residual_rows = val;
    else if (key == "threads") c.threads = static_cast<int>(detail::parse_int(key, val));
    else if (key == "E") c.E = detail::parse_double(key, val);
    else if (key == "nu") c.nu = detail::parse_double(key, val);
    else if (key == "sigma_y0") c.sigma_y0 = detail::parse_double(key, val);
    else if (key == "H") c.H = detail::parse_double(key, val);
    else if (key == "plane_mode") c.plane_mode = val;
    else if (key == "with_kappa") c.with_kappa = detail::parse_int(key, val) != 0;
    else if (key == "sweep_h") {
      for (auto& s : detail::split_list(val)) c.sweep_h.push_back(detail::parse_double(key, s));
    } else if (key == "sweep_p") {
      for (auto& s : detail::split_list(val))
        c.sweep_p.push_back(static_cast<int>(detail::parse_int(key, s)));
    } else if (key == "sweep_approach") {
      for (auto& s : detail::split_list(val)) c.sweep_approach.push_back(detail::parse_approach(key, s));
    } else if (key == "sweep_alpha_d") {
      for (auto& s : detail::split_list(val))
        c.sweep_alpha_d.push_back(detail::parse_double(key, s));
    } else if (key == "sweep_alpha_s") {
      for (auto& s : detail::split_list(val))
        c.sweep_alpha_s.push_back(detail::parse_double(key, s));
    }
  }

  if (!seen.count("case"))
    throw ConfigError("missing required key 'case' (one of timoshenko, plate_hole, annulus, "
                      "annulus_plastic, plate_hole_plastic)");

  // Validation beyond per-module checks.
  ApproachConfig ac = c.approach_config();
  ac.validate();
  if (c.alpha_d > ac.alpha_d_max()) {
    c.warnings.push_back("alpha_d = " + std::to_string(c.alpha_d) + " exceeds the admissible " +
                         std::to_string(ac.alpha_d_max()) + " for p_fd = " +
                         std::to_string(c.p_fd) + "; clamped");
    c.alpha_d = ac.alpha_d_max();
  }
  if (!(c.h > 0.0)) throw ConfigError("key 'h': spacing must be positive");
  if (!(c.e_tol > 0.0)) throw ConfigError("key 'e_tol': tolerance must be positive");
  if (c.nri_max < 1) throw ConfigError("key 'nri_max': must be at least 1");
  if (c.threads < 1) throw ConfigError("key 'threads': must be at least 1");
  if (c.residual_rows != "all" && c.residual_rows != "force")
    throw ConfigError("key 'residual_rows': expected all or force");
  if (c.plane_mode && *c.plane_mode != "plane_strain" && *c.plane_mode != "plane_stress")
    throw ConfigError("key 'plane_mode': expected plane_strain or plane_stress");

  BenchmarkCase bc = c.make_configured_case();  // also throws on bad case id / overrides
  const bool plastic = bc.material.sigma_y0() < 1e29;
  bc.material.validate(plastic);
  bc.loads.steps();
  return c;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

/// Effective configuration, parseable by parse_config (round-trip property).
inline void echo_config(std::ostream& os, const RunConfig& c) {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "case = " << c.case_id << '\n';
  os << "approach = " << to_string(c.approach) << '\n';
  os << "m = " << c.m << '\n';
  os << "p = " << c.p << '\n';
  os << "p_fd = " << c.p_fd << '\n';
  os << "alpha_d = " << num(c.alpha_d) << '\n';
  os << "alpha_s = " << num(c.alpha_s) << '\n';
  os << "h = " << num(c.h) << '\n';
  os << "seed = " << c.seed << '\n';
  if (c.p_min) os << "p_min = " << num(*c.p_min) << '\n';
  if (c.p_max) os << "p_max = " << num(*c.p_max) << '\n';
  if (c.dp) os << "dp = " << num(*c.dp) << '\n';
  os << "e_tol = " << num(c.e_tol) << '\n';
  os << "nri_max = " << c.nri_max << '\n';
  os << "residual_rows = " << c.residual_rows << '\n';
  os << "threads = " << c.threads << '\n';
  if (c.E) os << "E = " << num(*c.E) << '\n';
  if (c.nu) os << "nu = " << num(*c.nu) << '\n';
  if (c.sigma_y0) os << "sigma_y0 = " << num(*c.sigma_y0) << '\n';
  if (c.H) os << "H = " << num(*c.H) << '\n';
  if (c.plane_mode) os << "plane_mode = " << *c.plane_mode << '\n';
  auto list = [&os, &num](const char* key, const auto& v) {
    if (v.empty()) return;
    os << key << " = ";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << num(v[i]);
    os << '\n';
  };
  list("sweep_h", c.sweep_h);
  if (!c.sweep_p.empty()) {
    os << "sweep_p = ";
    for (std::size_t i = 0; i < c.sweep_p.size(); ++i) os << (i ? "," : "") << c.sweep_p[i];
    os << '\n';
  }
  if (!c.sweep_approach.empty()) {
    os << "sweep_approach = ";
    for (std::size_t i = 0; i < c.sweep_approach.size(); ++i)
      os << (i ? "," : "") << to_string(c.sweep_approach[i]);
    os << '\n';
  }
  list("sweep_alpha_d", c.sweep_alpha_d);
  list("sweep_alpha_s", c.sweep_alpha_s);
  if (c.with_kappa) os << "with_kappa = 1\n";
}

}  // namespace rbffd
