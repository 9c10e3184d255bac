#include "plap/config.hpp"

#include "plap/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <cmath>
#include <sstream>

namespace plap {

std::string_view to_string(Domain d) {
  return d == Domain::disk ? "disk" : "lshape";
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::schedule: return "schedule";
    case Mode::fixed_interval: return "fixed_interval";
    case Mode::adaptive: return "adaptive";
    case Mode::steepest_compare: return "steepest_compare";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v, int line) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'", line);
  }
  return x;
}

template <class Int>
Int to_int(std::string_view key, std::string_view v, int line) {
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'", line);
  }
  return x;
}

bool to_bool(std::string_view key, std::string_view v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'", line);
}

using Setter = std::function<void(RunConfig&, std::string_view, int)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> m;
    auto real = [&m](const char* key, auto member) {
      m[key] = [key, member](RunConfig& c, std::string_view v, int line) { member(c) = to_double(key, v, line); };
    };
    auto integer = [&m](const char* key, auto member) {
      m[key] = [key, member](RunConfig& c, std::string_view v, int line) {
        auto& ref = member(c);
        ref = to_int<std::remove_reference_t<decltype(ref)>>(key, v, line);
      };
    };
    auto boolean = [&m](const char* key, auto member) {
      m[key] = [key, member](RunConfig& c, std::string_view v, int line) { member(c) = to_bool(key, v, line); };
    };
    m["mode"] = [](RunConfig& c, std::string_view v, int line) {
      if (v == "schedule") c.mode = Mode::schedule;
      else if (v == "fixed_interval") c.mode = Mode::fixed_interval;
      else if (v == "adaptive") c.mode = Mode::adaptive;
      else if (v == "steepest_compare") c.mode = Mode::steepest_compare;
      else throw ConfigError("mode: unknown value '" + std::string(v) + "'", line);
    };
    m["domain"] = [](RunConfig& c, std::string_view v, int line) {
      if (v == "disk") c.domain = Domain::disk;
      else if (v == "lshape") c.domain = Domain::lshape;
      else throw ConfigError("domain: unknown value '" + std::string(v) + "'", line);
    };
    m["output_dir"] = [](RunConfig& c, std::string_view v, int line) {
      if (v.empty()) throw ConfigError("output_dir: empty path", line);
      c.output_dir = std::string(v);
    };
    real("p", [](RunConfig& c) -> double& { return c.p; });
    real("f", [](RunConfig& c) -> double& { return c.f; });
    integer("mesh_resolution", [](RunConfig& c) -> int& { return c.mesh_resolution; });
    integer("disk_boundary_vertices", [](RunConfig& c) -> int& { return c.disk_boundary_vertices; });
    integer("threads", [](RunConfig& c) -> int& { return c.threads; });
    integer("seed", [](RunConfig& c) -> unsigned long long& { return c.seed; });
    boolean("wall_time", [](RunConfig& c) -> bool& { return c.wall_time; });
    real("alpha", [](RunConfig& c) -> double& { return c.alpha; });
    real("beta", [](RunConfig& c) -> double& { return c.beta; });
    integer("max_iterations", [](RunConfig& c) -> int& { return c.max_iterations; });
    real("gap_tolerance", [](RunConfig& c) -> double& { return c.gap_tolerance; });
    real("eps_minus", [](RunConfig& c) -> double& { return c.eps_minus; });
    real("eps_plus", [](RunConfig& c) -> double& { return c.eps_plus; });
    real("rho", [](RunConfig& c) -> double& { return c.adaptive.rho; });
    real("theta", [](RunConfig& c) -> double& { return c.adaptive.doerfler_theta; });
    real("eps_plus_factor", [](RunConfig& c) -> double& { return c.adaptive.eps_plus_factor; });
    real("eps_minus_factor", [](RunConfig& c) -> double& { return c.adaptive.eps_minus_factor; });
    real("stop_tolerance", [](RunConfig& c) -> double& { return c.adaptive.stop_tolerance; });
    integer("max_rounds", [](RunConfig& c) -> int& { return c.adaptive.max_rounds; });
    boolean("refine_mesh", [](RunConfig& c) -> bool& { return c.adaptive.refine_mesh; });
    integer("max_ndof_accumulated", [](RunConfig& c) -> long long& { return c.adaptive.max_ndof_accumulated; });
    integer("max_vertices", [](RunConfig& c) -> int& { return c.adaptive.max_vertices; });
    real("initial_eps_minus", [](RunConfig& c) -> double& { return c.adaptive.initial_eps_minus; });
    real("initial_eps_plus", [](RunConfig& c) -> double& { return c.adaptive.initial_eps_plus; });
    integer("target_vertices", [](RunConfig& c) -> int& { return c.target_vertices; });
    real("delta", [](RunConfig& c) -> double& { return c.baseline.delta; });
    real("line_search_tol", [](RunConfig& c) -> double& { return c.baseline.line_search_tol; });
    return m;
  }();
  return table;
}

}  // namespace

void RunConfig::validate() const {
  auto check = [](bool ok, const char* key, const char* msg) {
    if (!ok) throw ConfigError(std::string(key) + ": " + msg, 0);
  };
  check(p >= 2.0 && std::isfinite(p), "p", "must satisfy 2 <= p < inf");
  check(std::isfinite(f), "f", "must be finite");
  check(mesh_resolution >= 0, "mesh_resolution", "must be >= 0");
  check(disk_boundary_vertices >= 3, "disk_boundary_vertices", "must be >= 3");
  check(threads >= 1, "threads", "must be >= 1");
  check(max_iterations >= 0, "max_iterations", "must be >= 0");
  check(gap_tolerance > 0.0, "gap_tolerance", "must be positive");
  check(eps_minus > 0.0, "eps_minus", "must be positive");
  check(eps_plus >= eps_minus && std::isfinite(eps_plus), "eps_plus", "must satisfy eps_minus <= eps_plus < inf");
  check(alpha >= 0.0, "alpha", "must be >= 0");
  check(beta >= 0.0, "beta", "must be >= 0");
  check(target_vertices >= 1, "target_vertices", "must be >= 1");
  check(adaptive.rho > 0.0 && std::isfinite(adaptive.rho), "rho", "must be positive");
  check(adaptive.doerfler_theta > 0.0 && adaptive.doerfler_theta < 1.0, "theta", "must lie in (0, 1)");
  check(adaptive.eps_plus_factor > 1.0, "eps_plus_factor", "must exceed 1");
  check(adaptive.eps_minus_factor > 0.0 && adaptive.eps_minus_factor < 1.0, "eps_minus_factor",
        "must lie in (0, 1)");
  check(adaptive.stop_tolerance >= 0.0, "stop_tolerance", "must be >= 0");
  check(adaptive.max_rounds >= 0, "max_rounds", "must be >= 0");
  check(adaptive.max_ndof_accumulated >= 0, "max_ndof_accumulated", "must be >= 0");
  check(adaptive.max_vertices >= 0, "max_vertices", "must be >= 0");
  check(adaptive.initial_eps_minus > 0.0, "initial_eps_minus", "must be positive");
  check(adaptive.initial_eps_plus >= adaptive.initial_eps_minus && std::isfinite(adaptive.initial_eps_plus),
        "initial_eps_plus", "must satisfy initial_eps_minus <= initial_eps_plus < inf");
  check(baseline.delta > 0.0 && baseline.delta < 1.0, "delta", "must lie in (0, 1)");
  check(baseline.line_search_tol > 0.0, "line_search_tol", "must be positive");
  if (mode == Mode::schedule && p > 2.0) {
    const ScheduleConfig s = schedule();
    check(s.alpha + s.beta <= (1.0 + 1e-12) / (2.0 - Exponents(p).q()), "alpha",
          "alpha + beta must not exceed 1/(2-q)");
  }
}

ScheduleConfig RunConfig::schedule() const {
  const Exponents exps(p);
  ScheduleConfig s = ScheduleConfig::balanced(exps, max_iterations);
  if (alpha > 0.0) s.alpha = alpha;
  if (beta > 0.0) s.beta = beta;
  s.gap_tolerance = 0.0;
  return s;
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::map<std::string, int, std::less<>> seen;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line);
    const std::string_view key = trim(s.substr(0, eq));
    const std::string_view value = trim(s.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + std::string(key) + "'", line);
    if (!seen.emplace(std::string(key), line).second) throw ConfigError("duplicate key '" + std::string(key) + "'", line);
    if (value.empty()) throw ConfigError(std::string(key) + ": missing value", line);
    it->second(cfg, value, line);
  }
  if (!seen.contains("mode")) throw ConfigError("missing required key 'mode'", line);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    const auto key = seen.find(std::string_view(msg).substr(0, msg.find(':')));
    throw ConfigError(msg, key == seen.end() ? 0 : key->second);
  }
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string(), 0);
  return parse_config(in);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  auto put = [&os](std::string_view key, const auto& value) { os << key << " = " << value << '\n'; };
  auto real = [&put](std::string_view key, double x) { put(key, format_double(x)); };
  auto flag = [&put](std::string_view key, bool b) { put(key, b ? "true" : "false"); };
  put("mode", to_string(c.mode));
  put("domain", to_string(c.domain));
  real("p", c.p);
  real("f", c.f);
  put("mesh_resolution", c.mesh_resolution);
  put("disk_boundary_vertices", c.disk_boundary_vertices);
  put("output_dir", c.output_dir);
  put("threads", c.threads);
  put("seed", c.seed);
  flag("wall_time", c.wall_time);
  const ScheduleConfig sched = c.schedule();
  real("alpha", sched.alpha);
  real("beta", sched.beta);
  put("max_iterations", c.max_iterations);
  real("gap_tolerance", c.gap_tolerance);
  real("eps_minus", c.eps_minus);
  real("eps_plus", c.eps_plus);
  real("rho", c.adaptive.rho);
  real("theta", c.adaptive.doerfler_theta);
  real("eps_plus_factor", c.adaptive.eps_plus_factor);
  real("eps_minus_factor", c.adaptive.eps_minus_factor);
  real("stop_tolerance", c.adaptive.stop_tolerance);
  put("max_rounds", c.adaptive.max_rounds);
  flag("refine_mesh", c.adaptive.refine_mesh);
  put("max_ndof_accumulated", c.adaptive.max_ndof_accumulated);
  put("max_vertices", c.adaptive.max_vertices);
  real("initial_eps_minus", c.adaptive.initial_eps_minus);
  real("initial_eps_plus", c.adaptive.initial_eps_plus);
  put("target_vertices", c.target_vertices);
  real("delta", c.baseline.delta);
  real("line_search_tol", c.baseline.line_search_tol);
  return os.str();
}

}  // namespace plap
