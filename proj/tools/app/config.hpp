#pragma once

// Flat key = value run configuration with dotted namespaces.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlap/errors.hpp"
#include "nlap/nonlinearity.hpp"
#include "nlap/ode.hpp"

namespace nlap::app {

struct KeySpec {
  const char* key;
  const char* fallback;
  const char* help;
};

// "auto" values are resolved per scenario.
inline const std::vector<KeySpec>& known_keys() {
  static const std::vector<KeySpec> keys = {
      {"scenario", "", "classify | explicit-check | construct | shoot | sweep | limit | analyze | report"},
      {"N", "2", "dimension"},
      {"out", ".", "output directory"},
      {"threads", "1", "worker threads"},
      {"seed", "0", "reserved; every algorithm is deterministic"},
      {"nl.kind", "auto", "power | pure-exponential | stretched-exponential | singular-exact | model-critical | constant"},
      {"nl.declared_class", "auto", "sub-exponential | super-exponential"},
      {"nl.beta", "1", "growth rate (also the barrier witness)"},
      {"nl.C", "1", "amplitude (also the barrier witness)"},
      {"nl.kappa", "auto", "monotonization constant"},
      {"nl.mu", "2", "stretch exponent"},
      {"nl.alpha", "0", "model-critical power t^{-alpha}"},
      {"nl.m", "0", "power (1+t)^m"},
      {"nl.b", "auto", "model-critical exponent b; auto = midpoint of (1/(N-1), N/(N-1))"},
      {"nl.theta", "0.5", "Hoelder exponent (metadata)"},
      {"integrator.rtol", "1e-10", ""},
      {"integrator.atol", "1e-12", ""},
      {"integrator.max_step", "1", ""},
      {"integrator.min_step", "1e-13", ""},
      {"integrator.max_steps", "2000000", ""},
      {"integrator.event_tol", "1e-10", ""},
      {"classify.t_max", "1000", ""},
      {"classify.beta_grid", "0.25,0.5,1,2,4,8", ""},
      {"explicit.r_lo", "1e-5", ""},
      {"explicit.r_hi", "0.4", ""},
      {"explicit.per_decade", "400", ""},
      {"explicit.t_start", "50", "backward integration start for the ODE check"},
      {"construct.eps", "0.05", ""},
      {"construct.tol", "1e-8", "absolute stopping tolerance on sup |u_{n+1} - u_n|"},
      {"construct.family", "0", "extra eps halvings eps_k = 2^{-k} eps"},
      {"construct.points_per_log", "1000", ""},
      {"construct.max_iter", "200", ""},
      {"shoot.gamma", "3", ""},
      {"shoot.t_floor", "-50", ""},
      {"shoot.tmax_extra", "0", ""},
      {"shoot.tail_probe", "5", "T_max shift used for the tail-consistency check"},
      {"shoot.margin", "0.5", ""},
      {"shoot.grid_span", "5", ""},
      {"shoot.grid_points", "201", ""},
      {"shoot.tol_cauchy", "0.2", ""},
      {"shoot.dump_trajectories", "false", ""},
      {"sweep.gammas", "3,5,8,12", ""},
      {"limit.gammas", "4,6,8,10,12", ""},
      {"analyze.profile", "", "profile CSV (r,u,p); empty: exact singular profile"},
      {"analyze.r_lo", "1e-12", "exact profile range when no CSV is given"},
      {"analyze.r_hi", "0.4", ""},
      {"analyze.eps_ratio", "1", ""},
      {"analyze.tol", "1e-3", ""},
      {"analyze.delta", "1e-2,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8,1e-9,1e-10", ""},
      {"analyze.threshold", "0.25", "increment ratio for divergence"},
      {"analyze.theta", "auto", "crossing exponent; auto = its lower threshold"},
      {"analyze.delta_frac", "0.5", ""},
      {"report.dir", "auto", "directory to merge; auto = out"},
  };
  return keys;
}

inline const KeySpec* find_key(const std::string& k) {
  for (const auto& s : known_keys())
    if (k == s.key) return &s;
  return nullptr;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

class Config {
 public:
  /// Sets a key; unknown keys are errors.
  void set(const std::string& key, const std::string& value) {
    if (!find_key(key)) throw PreconditionError(Failure::schema, "unknown configuration key '" + key + "'");
    values_[key] = value;
  }

  bool explicitly_set(const std::string& key) const { return values_.count(key) > 0; }

  std::string str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const auto* spec = find_key(key);
    if (!spec) throw PreconditionError(Failure::schema, "unknown configuration key '" + key + "'");
    return spec->fallback;
  }

  double num(const std::string& key) const {
    const std::string s = str(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (trim(s.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw PreconditionError(Failure::schema, "key '" + key + "' expects a number, got '" + s + "'");
  }

  long integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v)) throw PreconditionError(Failure::schema, "key '" + key + "' expects an integer");
    return static_cast<long>(v);
  }

  bool boolean(const std::string& key) const {
    const std::string s = str(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw PreconditionError(Failure::schema, "key '" + key + "' expects a boolean");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw PreconditionError(Failure::schema, "key '" + key + "' expects a comma-separated list of numbers");
      }
    }
    return out;
  }

  /// Every known key with its effective value, sorted. Keys that only affect
  /// where or how fast a run happens are left out.
  std::map<std::string, std::string> resolved() const {
    std::map<std::string, std::string> out;
    for (const auto& s : known_keys()) {
      const std::string k = s.key;
      if (k == "threads" || k == "out" || k == "report.dir") continue;
      out[k] = str(k);
    }
    return out;
  }

  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

inline void load_config_file(Config& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError(Failure::precondition, "cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw PreconditionError(Failure::schema, path + ":" + std::to_string(lineno) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash(const Config& cfg) {
  std::string canon;
  for (const auto& [k, v] : cfg.resolved()) canon += k + "=" + v + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  return buf;
}

inline NonlinearityKind default_kind(const std::string& scenario) {
  if (scenario == "construct" || scenario == "classify") return NonlinearityKind::pure_exponential;
  if (scenario == "shoot" || scenario == "sweep" || scenario == "limit") return NonlinearityKind::model_critical;
  return NonlinearityKind::singular_exact;
}

inline Nonlinearity make_nonlinearity(const Config& cfg) {
  const int N = static_cast<int>(cfg.integer("N"));
  require(N >= 2, Failure::precondition, "N must be >= 2 (got " + std::to_string(N) + ")");
  const std::string k = cfg.str("nl.kind");
  const NonlinearityKind kind = k == "auto" ? default_kind(cfg.str("scenario")) : parse_kind(k);
  NonlinearityParams p;
  p.beta = cfg.num("nl.beta");
  p.C = cfg.num("nl.C");
  if (cfg.str("nl.kappa") != "auto") p.kappa = cfg.num("nl.kappa");
  p.mu = cfg.num("nl.mu");
  p.alpha = cfg.num("nl.alpha");
  p.m = cfg.num("nl.m");
  p.b = cfg.str("nl.b") == "auto" ? (N + 1.0) / (2.0 * (N - 1)) : cfg.num("nl.b");
  p.theta = cfg.num("nl.theta");
  std::optional<GrowthClass> declared;
  if (cfg.str("nl.declared_class") != "auto") declared = parse_growth_class(cfg.str("nl.declared_class"));
  return {kind, N, p, declared};
}

inline IntegratorConfig make_integrator(const Config& cfg) {
  IntegratorConfig ic;
  ic.rtol = cfg.num("integrator.rtol");
  ic.atol = cfg.num("integrator.atol");
  ic.max_step = cfg.num("integrator.max_step");
  ic.min_step = cfg.num("integrator.min_step");
  ic.max_steps = cfg.integer("integrator.max_steps");
  ic.event_tol = cfg.num("integrator.event_tol");
  ic.validate();
  return ic;
}

}  // namespace nlap::app
