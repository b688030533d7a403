#pragma once

// Catalog of nonlinearities f, the monotone companion F(t) = f(t) + kappa t^{N-1},
// its inverse, and heuristic growth classification. Everything is evaluated in
// log space first; exponentiation happens only at the public value boundary.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlap/constants.hpp"
#include "nlap/errors.hpp"

namespace nlap {

enum class NonlinearityKind {
  power,                  // C (1+t)^m
  pure_exponential,       // C e^{beta t}
  stretched_exponential,  // C e^{t^mu}
  singular_exact,         // piecewise f for which (N log 1/r)^{1/mu} is an exact solution
  model_critical,         // t^{-alpha} (1+t)^m e^{t^{N/(N-1)} - t^b}
  constant,               // synthetic: f == C (C may be 0)
};

enum class GrowthClass { sub_exponential, super_exponential };

inline std::string_view to_string(NonlinearityKind k) {
  switch (k) {
    case NonlinearityKind::power: return "power";
    case NonlinearityKind::pure_exponential: return "pure-exponential";
    case NonlinearityKind::stretched_exponential: return "stretched-exponential";
    case NonlinearityKind::singular_exact: return "singular-exact";
    case NonlinearityKind::model_critical: return "model-critical";
    case NonlinearityKind::constant: return "constant";
  }
  return "?";
}

inline std::string_view to_string(GrowthClass c) {
  return c == GrowthClass::sub_exponential ? "sub-exponential" : "super-exponential";
}

inline NonlinearityKind parse_kind(std::string_view s) {
  for (auto k : {NonlinearityKind::power, NonlinearityKind::pure_exponential,
                 NonlinearityKind::stretched_exponential, NonlinearityKind::singular_exact,
                 NonlinearityKind::model_critical, NonlinearityKind::constant})
    if (to_string(k) == s) return k;
  throw PreconditionError(Failure::precondition, "unknown nonlinearity kind '" + std::string(s) + "'");
}

inline GrowthClass parse_growth_class(std::string_view s) {
  if (s == "sub-exponential") return GrowthClass::sub_exponential;
  if (s == "super-exponential") return GrowthClass::super_exponential;
  throw PreconditionError(Failure::precondition, "unknown growth class '" + std::string(s) + "'");
}

struct NonlinearityParams {
  double beta = 1.0;   // growth rate
  double C = 1.0;      // amplitude
  double kappa = std::numeric_limits<double>::quiet_NaN();  // NaN: per-kind default
  double mu = 2.0;     // stretch exponent
  double alpha = 0.0;
  double m = 0.0;
  double b = 1.5;
  double theta = 0.5;  // Hoelder exponent; metadata only
};

class Nonlinearity {
 public:
  Nonlinearity(NonlinearityKind kind, int N, NonlinearityParams params,
               std::optional<GrowthClass> declared = std::nullopt)
      : kind_(kind), N_(N), p_(params) {
    require(N >= 2, Failure::precondition, "dimension N must be >= 2 (got " + std::to_string(N) + ")");
    validate();
    declared_ = declared.value_or(default_class());
    if (kind_ == NonlinearityKind::singular_exact) {
      const double mu = p_.mu;
      junction_ = std::pow(N_ * std::log(2.0), 1.0 / mu);
      k_exp_ = (1.0 - mu) * (N_ - 1) - mu;
      log_amp_ = N_ * std::log(N_ / mu) + std::log(mu - 1.0) + std::log(N_ - 1.0);
    }
    if (std::isnan(p_.kappa)) p_.kappa = kind_ == NonlinearityKind::singular_exact ? singular_kappa() : 0.0;
    require(p_.kappa >= 0, Failure::precondition, "kappa must be >= 0");
  }

  /// f dips on [J, (-k/mu)^{1/mu}] above the junction; twice the largest
  /// -f'(t) / ((N-1) t^{N-2}) there (at least 1) keeps F increasing.
  double singular_kappa() const {
    const double t_dip = std::pow(std::max(-k_exp_ / p_.mu, 0.0), 1.0 / p_.mu);
    double need = 0.0;
    for (int i = 0; i <= 400 && t_dip > junction_; ++i) {
      const double t = junction_ + (t_dip - junction_) * i / 400.0;
      const double g1 = k_exp_ / t + p_.mu * std::pow(t, p_.mu - 1.0);
      const double lf = log_amp_ + k_exp_ * std::log(t) + std::pow(t, p_.mu);
      need = std::max(need, -g1 * std::exp(lf) / ((N_ - 1) * std::pow(t, N_ - 2)));
    }
    return std::max(1.0, 2.0 * need);
  }

  static Nonlinearity power(int N, double C, double m) {
    NonlinearityParams p;
    p.C = C;
    p.m = m;
    return {NonlinearityKind::power, N, p};
  }
  static Nonlinearity pure_exponential(int N, double beta, double C) {
    NonlinearityParams p;
    p.beta = beta;
    p.C = C;
    return {NonlinearityKind::pure_exponential, N, p};
  }
  static Nonlinearity stretched_exponential(int N, double mu, double C = 1.0) {
    NonlinearityParams p;
    p.mu = mu;
    p.C = C;
    return {NonlinearityKind::stretched_exponential, N, p};
  }
  static Nonlinearity singular_exact(int N, double mu) {
    NonlinearityParams p;
    p.mu = mu;
    return {NonlinearityKind::singular_exact, N, p};
  }
  static Nonlinearity model_critical(int N, double alpha, double m, double b) {
    NonlinearityParams p;
    p.alpha = alpha;
    p.m = m;
    p.b = b;
    return {NonlinearityKind::model_critical, N, p};
  }
  static Nonlinearity constant(int N, double c, GrowthClass declared = GrowthClass::super_exponential) {
    NonlinearityParams p;
    p.C = c;
    return {NonlinearityKind::constant, N, p, declared};
  }

  NonlinearityKind kind() const { return kind_; }
  int dim() const { return N_; }
  const NonlinearityParams& params() const { return p_; }
  double kappa() const { return p_.kappa; }
  GrowthClass declared_class() const { return declared_; }
  bool is_super() const { return declared_ == GrowthClass::super_exponential; }

  /// Junction point (N log 2)^{1/mu} of the singular-exact member; NaN otherwise.
  double junction() const {
    return kind_ == NonlinearityKind::singular_exact ? junction_ : std::numeric_limits<double>::quiet_NaN();
  }

  /// log f(t); -inf only for the synthetic f == 0.
  double log_f(double t) const {
    if (!(t >= 0)) throw PreconditionError(Failure::domain, "f evaluated at t = " + std::to_string(t) + " < 0");
    const double logC = std::log(p_.C);
    switch (kind_) {
      case NonlinearityKind::power: return logC + p_.m * std::log1p(t);
      case NonlinearityKind::pure_exponential: return logC + p_.beta * t;
      case NonlinearityKind::stretched_exponential: return logC + std::pow(t, p_.mu);
      case NonlinearityKind::singular_exact: {
        const double s = t <= junction_ ? junction_ : t;
        return log_amp_ + k_exp_ * std::log(s) + std::pow(s, p_.mu);
      }
      case NonlinearityKind::model_critical: {
        const double crit = static_cast<double>(N_) / (N_ - 1);
        double v = p_.m * std::log1p(t) + std::pow(t, crit) - std::pow(t, p_.b);
        if (p_.alpha > 0) v -= p_.alpha * std::log(t);  // +inf at t = 0
        return v;
      }
      case NonlinearityKind::constant: return logC;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  double f(double t) const { return checked_exp(log_f(t), "f", t); }

  /// g'(t) for g = log f.
  double dlog_f(double t) const {
    require(t >= 0, Failure::domain, "g' evaluated at negative t");
    switch (kind_) {
      case NonlinearityKind::power: return p_.m / (1.0 + t);
      case NonlinearityKind::pure_exponential: return p_.beta;
      case NonlinearityKind::stretched_exponential: return p_.mu * std::pow(t, p_.mu - 1.0);
      case NonlinearityKind::singular_exact:
        require_smooth(t);
        return k_exp_ / t + p_.mu * std::pow(t, p_.mu - 1.0);
      case NonlinearityKind::model_critical: {
        const double crit = static_cast<double>(N_) / (N_ - 1);
        double v = p_.m / (1.0 + t) + crit * std::pow(t, crit - 1.0) - p_.b * std::pow(t, p_.b - 1.0);
        if (p_.alpha > 0) v -= p_.alpha / t;
        return v;
      }
      case NonlinearityKind::constant: return 0.0;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// g''(t) for g = log f.
  double d2log_f(double t) const {
    require(t >= 0, Failure::domain, "g'' evaluated at negative t");
    switch (kind_) {
      case NonlinearityKind::power: return -p_.m / ((1.0 + t) * (1.0 + t));
      case NonlinearityKind::pure_exponential: return 0.0;
      case NonlinearityKind::stretched_exponential:
        return p_.mu * (p_.mu - 1.0) * std::pow(t, p_.mu - 2.0);
      case NonlinearityKind::singular_exact:
        require_smooth(t);
        return -k_exp_ / (t * t) + p_.mu * (p_.mu - 1.0) * std::pow(t, p_.mu - 2.0);
      case NonlinearityKind::model_critical: {
        const double crit = static_cast<double>(N_) / (N_ - 1);
        double v = -p_.m / ((1.0 + t) * (1.0 + t)) + crit * (crit - 1.0) * std::pow(t, crit - 2.0) -
                   p_.b * (p_.b - 1.0) * std::pow(t, p_.b - 2.0);
        if (p_.alpha > 0) v += p_.alpha / (t * t);
        return v;
      }
      case NonlinearityKind::constant: return 0.0;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  double log_F(double t) const {
    const double lf = log_f(t);
    if (p_.kappa == 0.0 || t == 0.0) return lf;
    return log_add_exp(lf, std::log(p_.kappa) + (N_ - 1) * std::log(t));
  }

  double F(double t) const { return checked_exp(log_F(t), "F", t); }

  /// Solves log F(t) = log_s by bracket doubling and bisection.
  double invert_log_F(double log_s, double rtol = 1e-12) const {
    const double lf0 = log_F(0.0);
    if (log_s < lf0) {
      if (lf0 - log_s > 1e-15 * std::max(1.0, std::abs(lf0)))
        throw PreconditionError(Failure::range, "F^{-1}: argument below F(0)");
      return 0.0;
    }
    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (log_F(hi) < log_s) {
      lo = hi;
      hi *= 2.0;
      if (++doublings > 1100)
        throw NumericalError(Failure::non_convergence, "F^{-1}: bracket doubling did not reach the target");
    }
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) return mid;
      const double d = log_F(mid) - log_s;
      if (std::abs(d) <= rtol * 0.5) return mid;
      (d < 0 ? lo : hi) = mid;
    }
    throw NumericalError(Failure::non_convergence, "F^{-1}: bisection did not converge");
  }

  double invert_F(double s, double rtol = 1e-12) const {
    require(s > 0, Failure::range, "F^{-1}: argument must be positive");
    return invert_log_F(std::log(s), rtol);
  }

  std::string describe() const {
    return std::string(to_string(kind_)) + " (N=" + std::to_string(N_) + ")";
  }

 private:
  GrowthClass default_class() const {
    switch (kind_) {
      case NonlinearityKind::power:
      case NonlinearityKind::pure_exponential: return GrowthClass::sub_exponential;
      default: return GrowthClass::super_exponential;
    }
  }

  void validate() const {
    using K = NonlinearityKind;
    switch (kind_) {
      case K::power:
        require(p_.C > 0 && p_.m >= 0, Failure::precondition, "power: need C > 0, m >= 0");
        break;
      case K::pure_exponential:
        require(p_.C > 0 && p_.beta > 0, Failure::precondition, "pure-exponential: need C > 0, beta > 0");
        break;
      case K::stretched_exponential:
        require(p_.C > 0 && p_.mu > 1, Failure::precondition, "stretched-exponential: need C > 0, mu > 1");
        break;
      case K::singular_exact:
        require(p_.mu > 1, Failure::precondition, "singular-exact: need mu > 1");
        break;
      case K::model_critical: {
        const double lo = 1.0 / (N_ - 1), hi = static_cast<double>(N_) / (N_ - 1);
        require(p_.alpha >= 0 && p_.m >= 0, Failure::precondition, "model-critical: need alpha >= 0, m >= 0");
        require(p_.b > lo && p_.b < hi, Failure::precondition,
                "model-critical: need 1/(N-1) < b < N/(N-1)");
        break;
      }
      case K::constant:
        require(p_.C >= 0, Failure::precondition, "constant: need C >= 0");
        break;
    }
  }

  void require_smooth(double t) const {
    require(t >= junction_, Failure::domain,
            "singular-exact: log f is not differentiable below the junction t = " + std::to_string(junction_));
  }

  static double checked_exp(double lv, const char* what, double t) {
    if (lv > kLogMaxDouble)
      throw NumericalError(Failure::overflow, std::string(what) + "(" + std::to_string(t) + ") exceeds double range");
    return std::exp(lv);
  }

  NonlinearityKind kind_;
  int N_;
  NonlinearityParams p_;
  GrowthClass declared_ = GrowthClass::sub_exponential;
  double junction_ = 0.0;
  double k_exp_ = 0.0;
  double log_amp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Growth diagnostics

enum class GrowthVerdict { likely_sub, likely_super, inconclusive };

inline std::string_view to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::likely_sub: return "likely-sub";
    case GrowthVerdict::likely_super: return "likely-super";
    case GrowthVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct GrowthProbe {
  double beta;
  double log_sup_half;  // sup over [0, t_max] of log f - beta t
  double log_sup_full;  // sup over [0, 2 t_max]
  double argmax_half;
  bool stable;
  bool growing;
};

struct GrowthReport {
  GrowthVerdict verdict;
  GrowthClass declared;
  double t_max;
  std::vector<GrowthProbe> probes;
};

inline std::vector<double> default_beta_grid() { return {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}; }

/// A sample cannot decide a tail property; the declared class stays authoritative.
inline GrowthReport classify_growth(const Nonlinearity& nl, std::span<const double> beta_grid,
                                    double t_max = 1e3, int samples_per_half = 4000) {
  require(!beta_grid.empty(), Failure::precondition, "classify_growth: empty beta grid");
  require(t_max > 0, Failure::precondition, "classify_growth: t_max must be positive");
  GrowthReport rep{GrowthVerdict::inconclusive, nl.declared_class(), t_max, {}};
  const int n = 2 * samples_per_half;
  std::vector<double> ts(n + 1), lf(n + 1);
  for (int i = 0; i <= n; ++i) {
    ts[i] = 2.0 * t_max * i / n;
    lf[i] = nl.log_f(ts[i]);
  }
  bool any_stable = false, all_growing = true;
  for (double beta : beta_grid) {
    require(beta > 0, Failure::precondition, "classify_growth: beta must be positive");
    GrowthProbe pr{beta, -INFINITY, -INFINITY, 0.0, false, false};
    int arg_half = -1;
    for (int i = 0; i <= n; ++i) {
      const double h = lf[i] - beta * ts[i];
      if (!std::isfinite(h)) continue;
      if (i <= samples_per_half && h > pr.log_sup_half) {
        pr.log_sup_half = h;
        arg_half = i;
      }
      pr.log_sup_full = std::max(pr.log_sup_full, h);
    }
    pr.argmax_half = arg_half >= 0 ? ts[arg_half] : std::numeric_limits<double>::quiet_NaN();
    const double tol = 1e-9 * std::max(1.0, std::abs(pr.log_sup_half));
    pr.growing = pr.log_sup_full > pr.log_sup_half + tol;
    pr.stable = !pr.growing && arg_half >= 0 && arg_half < samples_per_half;
    any_stable = any_stable || pr.stable;
    all_growing = all_growing && pr.growing;
    rep.probes.push_back(pr);
  }
  if (any_stable)
    rep.verdict = GrowthVerdict::likely_sub;
  else if (all_growing)
    rep.verdict = GrowthVerdict::likely_super;
  return rep;
}

struct PowerRatioReport {
  double max_log_ratio;  // max of lambda log f(t) - log f(lambda t)
  double lambda_at_max;
  double t_at_max;
  bool finite;
  double max_ratio() const { return std::exp(std::min(max_log_ratio, kLogMaxDouble)); }
};

/// Sampled probe of sup f(t)^lambda / f(lambda t) over lambda > 1, t >= 0.
inline PowerRatioReport check_power_ratio(const Nonlinearity& nl, std::span<const double> lambdas,
                                          std::span<const double> ts) {
  require(!lambdas.empty() && !ts.empty(), Failure::precondition, "check_power_ratio: empty grid");
  PowerRatioReport rep{-INFINITY, 0.0, 0.0, true};
  for (double lam : lambdas) {
    require(lam > 1, Failure::precondition, "check_power_ratio: lambda must exceed 1");
    for (double t : ts) {
      require(t >= 0, Failure::precondition, "check_power_ratio: t must be >= 0");
      const double v = lam * nl.log_f(t) - nl.log_f(lam * t);
      if (std::isnan(v) || v == INFINITY) rep.finite = false;
      if (v > rep.max_log_ratio) {
        rep.max_log_ratio = v;
        rep.lambda_at_max = lam;
        rep.t_at_max = t;
      }
    }
  }
  return rep;
}

/// Sampled sup of log f(t) - beta t on [0, t_max]; log of the witness constant C.
inline double log_exponential_witness(const Nonlinearity& nl, double beta, double t_max = 1e3, int n = 20000) {
  double best = -INFINITY;
  for (int i = 0; i <= n; ++i) {
    const double t = t_max * i / n;
    best = std::max(best, nl.log_f(t) - beta * t);
  }
  return best;
}

/// Lower-growth gate f(t) >= c e^{t^mu} for large t, tested as
/// (log f - t^mu) / t^mu >= -tol at the two largest of t = 1e3 * 2^j, j < 5.
inline bool stretched_lower_gate(const Nonlinearity& nl, double mu, double tol = 0.05) {
  bool ok = true;
  for (int j = 3; j < 5; ++j) {
    const double t = 1e3 * std::ldexp(1.0, j);
    const double tm = std::pow(t, mu);
    ok = ok && (nl.log_f(t) - tm) / tm >= -tol;
  }
  return ok;
}

/// Sampled strict monotonicity of F on an increasing grid.
inline bool F_increasing(const Nonlinearity& nl, double t_max = 50.0, int n = 5000) {
  double prev = nl.log_F(0.0);
  for (int i = 1; i <= n; ++i) {
    const double cur = nl.log_F(t_max * i / n);
    if (!(cur > prev)) return false;
    prev = cur;
  }
  return true;
}

}  // namespace nlap
