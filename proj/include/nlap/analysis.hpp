#pragma once

// Diagnostics on (possibly singular) radial profiles: upper-bound ratios,
// decay of r^N f(u), the integral lower bounds and their divergence tests,
// crossing counts against explicit graphs, and the exponential-integrability
// inequality for bounded pieces.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nlap/constants.hpp"
#include "nlap/errors.hpp"
#include "nlap/nonlinearity.hpp"
#include "nlap/quadrature.hpp"
#include "nlap/transform.hpp"

namespace nlap {

// ---------------------------------------------------------------------------
// Reference profiles

/// u(r) = (N log(1/r))^{1/mu} with its exact flux, on a log-uniform grid
/// (descending r). Solves the equation with the singular-exact f for r < 1/2.
inline RadialProfile exact_singular_profile(int N, double mu, double r_lo, double r_hi, int per_decade = 200) {
  require(r_lo > 0 && r_lo < r_hi && r_hi < 1.0, Failure::precondition, "exact profile: need 0 < r_lo < r_hi < 1");
  require(per_decade >= 2, Failure::precondition, "exact profile: per_decade must be >= 2");
  const double a = std::log10(r_hi), b = std::log10(r_lo);
  const int n = std::max(5, static_cast<int>(std::ceil((a - b) * per_decade)) + 1);
  RadialProfile pr;
  pr.N = N;
  const double amp = std::pow(N / mu, N - 1);
  const double e = (1.0 - mu) * (N - 1) / mu;
  for (int i = 0; i < n; ++i) {
    const double r = i + 1 == n ? r_lo : std::pow(10.0, a + (b - a) * i / (n - 1));
    const double L = N * std::log(1.0 / r);
    pr.r.push_back(r);
    pr.u.push_back(std::pow(L, 1.0 / mu));
    pr.p.push_back(-amp * std::pow(L, e));
  }
  return pr;
}

/// Samples an analytic profile u(r) (with flux from du) on a log-uniform grid.
template <class U, class DU>
RadialProfile sample_profile(int N, U&& u, DU&& du, double r_lo, double r_hi, int per_decade = 200) {
  require(r_lo > 0 && r_lo < r_hi, Failure::precondition, "sample_profile: need 0 < r_lo < r_hi");
  const double a = std::log10(r_hi), b = std::log10(r_lo);
  const int n = std::max(5, static_cast<int>(std::ceil((a - b) * per_decade)) + 1);
  RadialProfile pr;
  pr.N = N;
  for (int i = 0; i < n; ++i) {
    const double r = i == 0 ? r_hi : (i + 1 == n ? r_lo : std::pow(10.0, a + (b - a) * i / (n - 1)));
    pr.r.push_back(r);
    pr.u.push_back(u(r));
    pr.p.push_back(std::pow(r, N - 1) * flux_power(du(r), N));
  }
  return pr;
}

/// Powers of ten inside [r_min, r_max], descending.
inline std::vector<double> decade_points(double r_min, double r_max) {
  std::vector<double> out;
  for (int k = static_cast<int>(std::floor(std::log10(r_max) + 1e-12)); std::pow(10.0, k) >= r_min * (1 - 1e-12); --k)
    out.push_back(std::pow(10.0, k));
  return out;
}

// ---------------------------------------------------------------------------
// Ratio against F^{-1}(eps r^{-N})

struct RatioSeries {
  double eps = 1.0;
  std::vector<double> r, ratio;   // profile nodes, descending r
  std::optional<double> R_eps;   // ratio <= 1 + tol on (r_min, R_eps]
  double last_decade_max = 0.0;
  double last_decade_min = 0.0;
};

/// f^lambda / f(lambda t) bounded on sample grids; required before the ratio test.
inline bool power_ratio_gate(const Nonlinearity& nl, double max_log_ratio = 50.0) {
  const std::vector<double> lambdas{1.25, 1.5, 2.0, 3.0, 5.0};
  std::vector<double> ts;
  for (int i = 0; i <= 100; ++i) ts.push_back(0.1 * i * i);
  const auto rep = check_power_ratio(nl, lambdas, ts);
  return std::isfinite(rep.max_log_ratio) && rep.max_log_ratio <= max_log_ratio;
}

inline std::vector<RatioSeries> asymptotic_ratio(const RadialProfile& pr, const Nonlinearity& nl,
                                                 const std::vector<double>& eps_list, double tol = 1e-3) {
  pr.validate();
  require(pr.r_max() / pr.r_min() >= 1e4 * (1 - 1e-9), Failure::under_resolved,
          "asymptotic_ratio: profile must span at least 4 decades");
  require(power_ratio_gate(nl), Failure::precondition, "asymptotic_ratio: f^lambda <= c f(lambda t) gate failed");
  std::vector<RatioSeries> out;
  const int N = pr.N;
  for (double eps : eps_list) {
    require(eps > 0, Failure::precondition, "asymptotic_ratio: eps must be positive");
    RatioSeries s;
    s.eps = eps;
    for (std::size_t i = 0; i < pr.size(); ++i) {
      // eps r^{-N} below F(0) leaves the bound undefined there (NaN).
      const double log_s = std::log(eps) - N * std::log(pr.r[i]);
      double ratio = std::numeric_limits<double>::quiet_NaN();
      if (log_s >= nl.log_F(0.0)) {
        const double bound = nl.invert_log_F(log_s);
        ratio = bound > 0 ? pr.u[i] / bound : INFINITY;
      }
      s.r.push_back(pr.r[i]);
      s.ratio.push_back(ratio);
    }
    // R_eps: walk outward from the smallest radius while the bound holds.
    for (std::size_t k = s.r.size(); k-- > 0;) {
      if (!(s.ratio[k] <= 1 + tol)) break;
      s.R_eps = s.r[k];
    }
    const double edge = 10 * pr.r_min();
    s.last_decade_max = -INFINITY;
    s.last_decade_min = INFINITY;
    for (std::size_t k = 0; k < s.r.size(); ++k)
      if (s.r[k] <= edge * (1 + 1e-12)) {
        s.last_decade_max = std::max(s.last_decade_max, s.ratio[k]);
        s.last_decade_min = std::min(s.last_decade_min, s.ratio[k]);
      }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decay of r^N f(u)

enum class Verdict { consistent, inconsistent, inconclusive, divergent, convergent };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::divergent: return "divergence-consistent";
    case Verdict::convergent: return "convergent";
  }
  return "?";
}

struct DecaySeries {
  std::vector<double> r, value;  // per decade, descending r
  bool eventually_decreasing = false;
  double orders = 0.0;           // log10(first / last)
  Verdict verdict = Verdict::inconclusive;
};

inline DecaySeries decay_check(const RadialProfile& pr, const Nonlinearity& nl) {
  pr.validate();
  const ProfileInterpolant in(pr);
  DecaySeries d;
  const int N = pr.N;
  for (double r : decade_points(pr.r_min(), pr.r_max())) {
    const double rc = std::clamp(r, pr.r_min(), pr.r_max());
    d.r.push_back(r);
    d.value.push_back(std::exp(N * std::log(r) + nl.log_f(std::max(in.u(rc), 0.0))));
  }
  if (d.value.size() < 3) return d;
  const std::size_t n = d.value.size();
  d.eventually_decreasing = d.value[n - 1] < d.value[n - 2] && d.value[n - 2] < d.value[n - 3];
  d.orders = std::log10(d.value.front() / d.value.back());
  if (d.eventually_decreasing && d.value.back() < 1e-2 * d.value.front())
    d.verdict = Verdict::consistent;
  else if (d.value[n - 1] > d.value[n - 2] && d.value[n - 2] > d.value[n - 3])
    d.verdict = Verdict::inconsistent;
  return d;
}

// ---------------------------------------------------------------------------
// Integral lower bounds

struct PartialIntegrals {
  std::vector<double> delta;      // decreasing
  std::vector<double> value;      // I(delta_k)
  std::vector<double> increment;  // I(delta_{k+1}) - I(delta_k)
  std::vector<double> ratio;      // increment_{k+1} / increment_k
  double threshold = 0.25;
  double inner_closure = 0.0;     // mass inside B_{r_min} taken from the flux
  Verdict verdict = Verdict::inconclusive;
};

namespace detail {

inline Verdict increment_verdict(PartialIntegrals& out) {
  for (std::size_t k = 0; k + 1 < out.value.size(); ++k) out.increment.push_back(out.value[k + 1] - out.value[k]);
  for (std::size_t k = 0; k + 1 < out.increment.size(); ++k)
    out.ratio.push_back(out.increment[k] > 0 ? out.increment[k + 1] / out.increment[k] : 0.0);
  if (out.ratio.size() < 3) return Verdict::inconclusive;  // fewer than 4 decades
  bool increasing = true, sustained = true;
  for (double inc : out.increment) increasing = increasing && inc > 0;
  for (double q : out.ratio) sustained = sustained && q >= out.threshold;
  if (increasing && sustained) return Verdict::divergent;
  const std::size_t m = out.ratio.size();
  if (out.ratio[m - 1] < out.threshold && out.ratio[m - 2] < out.threshold) return Verdict::convergent;
  return Verdict::inconclusive;
}

/// Ball masses sigma int_0^r s^{N-1} f(u(s)) ds at the profile nodes
/// (ascending r), closed below r_min with sigma |p(r_min)|.
struct BallMass {
  std::vector<double> x;     // log r ascending
  std::vector<double> mass;
  double closure = 0.0;
};

inline BallMass ball_mass(const RadialProfile& pr, const Nonlinearity& nl, const ProfileInterpolant& in, double rtol) {
  const int N = pr.N;
  const double sigma = sphere_measure(N);
  BallMass b;
  const std::size_t n = pr.size();
  b.x.resize(n);
  b.mass.resize(n);
  for (std::size_t i = 0; i < n; ++i) b.x[i] = std::log(pr.r[n - 1 - i]);
  b.closure = sigma * std::abs(pr.p.back());
  b.mass[0] = b.closure;
  auto dens = [&](double xx) {
    const double r = std::clamp(std::exp(xx), pr.r_min(), pr.r_max());
    return sigma * std::exp(N * xx + nl.log_f(std::max(in.u(r), 0.0)));
  };
  for (std::size_t i = 1; i < n; ++i) b.mass[i] = b.mass[i - 1] + integrate(dens, b.x[i - 1], b.x[i], rtol).value;
  return b;
}

inline double mass_at(const BallMass& b, const std::function<double(double)>& dens, double xx, double rtol) {
  const std::size_t k = locate(b.x, xx);
  return b.mass[k] + integrate(dens, b.x[k], xx, rtol).value;
}

}  // namespace detail

/// I(delta) = int_delta^R [r (log(N/r))^{1/mu}]^{-1} (int_{B_r} f(u))^{1/(N-1)} dr, R = r_max.
inline PartialIntegrals integral_bound_partial(const RadialProfile& pr, const Nonlinearity& nl, double mu,
                                               const std::vector<double>& delta_list, double threshold = 0.25,
                                               double rtol = 1e-9) {
  pr.validate();
  require(mu > 1, Failure::precondition, "integral bound: mu must exceed 1");
  const int N = pr.N;
  const double R = pr.r_max();
  require(R < N, Failure::domain, "integral bound: need R < N so that log(N/r) > 0");
  const ProfileInterpolant in(pr);
  const auto bm = detail::ball_mass(pr, nl, in, rtol);
  const double sigma = sphere_measure(N);
  std::function<double(double)> dens = [&](double xx) {
    const double r = std::clamp(std::exp(xx), pr.r_min(), pr.r_max());
    return sigma * std::exp(N * xx + nl.log_f(std::max(in.u(r), 0.0)));
  };
  const double logN = std::log(static_cast<double>(N));
  auto outer = [&](double xx) {
    const double m = detail::mass_at(bm, dens, xx, rtol);
    return std::pow(m, 1.0 / (N - 1)) * std::pow(logN - xx, -1.0 / mu);
  };
  PartialIntegrals out;
  out.threshold = threshold;
  out.inner_closure = bm.closure;
  double acc = 0.0, upper = std::log(R);
  for (double d : delta_list) {
    require(d > 0 && d < R, Failure::precondition, "integral bound: delta must lie in (0, R)");
    if (d < pr.r_min() * (1 - 1e-12))
      throw PreconditionError(Failure::under_resolved,
                           "integral bound: delta below the resolved range; last resolved delta = " +
                               (out.delta.empty() ? std::string("none") : std::to_string(out.delta.back())));
    const double lo = std::log(d);
    require(lo <= upper, Failure::precondition, "integral bound: delta list must be decreasing");
    acc += integrate(outer, lo, upper, rtol, 20).value;
    upper = lo;
    out.delta.push_back(d);
    out.value.push_back(acc);
  }
  out.verdict = detail::increment_verdict(out);
  return out;
}

/// sigma int_delta^R r^{N-1} f(u) w(r) dr with the weight w built on [r, R].
inline PartialIntegrals weighted_mass(const RadialProfile& pr, const Nonlinearity& nl, double mu,
                                      const std::vector<double>& delta_list, double threshold = 0.25,
                                      double rtol = 1e-9) {
  pr.validate();
  require(mu > 1, Failure::precondition, "weighted mass: mu must exceed 1");
  const int N = pr.N;
  const double R = pr.r_max();
  require(R < N, Failure::domain, "weighted mass: need R < N");
  require(pr.r_min() <= 1e-3 * R, Failure::under_resolved, "weighted mass: profile does not resolve the window near 0");
  const ProfileInterpolant in(pr);
  const double sigma = sphere_measure(N);
  auto integrand = [&](double xx) {
    const double r = std::exp(xx);
    const double rc = std::clamp(r, pr.r_min(), pr.r_max());
    return sigma * std::exp(N * xx + nl.log_f(std::max(in.u(rc), 0.0))) * weight_w(std::min(r, R), R, N, mu, rtol);
  };
  PartialIntegrals out;
  out.threshold = threshold;
  double acc = 0.0, upper = std::log(R);
  for (double d : delta_list) {
    require(d > 0 && d < R, Failure::precondition, "weighted mass: delta must lie in (0, R)");
    if (d < pr.r_min() * (1 - 1e-12))
      throw PreconditionError(Failure::under_resolved, "weighted mass: delta below the resolved range");
    const double lo = std::log(d);
    require(lo <= upper, Failure::precondition, "weighted mass: delta list must be decreasing");
    acc += integrate(integrand, lo, upper, rtol, 20).value;
    upper = lo;
    out.delta.push_back(d);
    out.value.push_back(acc);
  }
  out.verdict = detail::increment_verdict(out);
  return out;
}

/// Two-dimensional cross-check: int_{B_R} (log(N/|x|))^{1-1/mu} f(u) dx.
inline double fubini_check_2d(const RadialProfile& pr, const Nonlinearity& nl, double mu, double delta,
                              double rtol = 1e-9) {
  require(pr.N == 2, Failure::precondition, "fubini check is specific to N = 2");
  const ProfileInterpolant in(pr);
  const double R = pr.r_max();
  auto g = [&](double xx) {
    const double r = std::clamp(std::exp(xx), pr.r_min(), R);
    return 2 * std::numbers::pi * std::exp(2 * xx + nl.log_f(std::max(in.u(r), 0.0))) *
           std::pow(std::log(2.0) - xx, 1.0 - 1.0 / mu);
  };
  return integrate(g, std::log(delta), std::log(R), rtol, 20).value;
}

// ---------------------------------------------------------------------------
// Crossings

/// Sign changes of u - bound along the samples (exact zeros are skipped).
inline std::vector<std::size_t> crossing_indices(const std::vector<double>& u, const std::vector<double>& bound) {
  std::vector<std::size_t> idx;
  int last = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - bound[i];
    const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) idx.push_back(i);
    last = s;
  }
  return idx;
}

template <class Bound>
std::size_t count_crossings(const std::vector<double>& r, const std::vector<double>& u, Bound&& bound) {
  std::vector<double> b(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) b[i] = bound(r[i]);
  return crossing_indices(u, b).size();
}

enum class Alternative { band, crossing_evidence, bounded, inconclusive };

inline const char* to_string(Alternative a) {
  switch (a) {
    case Alternative::band: return "band";
    case Alternative::crossing_evidence: return "infinitely-crossing-evidence";
    case Alternative::bounded: return "bounded";
    case Alternative::inconclusive: return "inconclusive";
  }
  return "?";
}

inline double crossing_lower_graph(double r, int N, double mu, double theta) {
  const double L = N * std::log(N / r);
  const double a = L - theta * std::log(L);
  return a > 0 ? std::pow(a, 1.0 / mu) : 0.0;
}

inline double crossing_upper_graph(double r, int N, double mu) { return std::pow(N * std::log(N / r), 1.0 / mu); }

struct CrossingReport {
  double theta = 0.0;
  double theta_min = 0.0;
  std::vector<double> crossing_radii;
  std::vector<double> range_floor;       // r_max * 10^{-j}
  std::vector<std::size_t> range_count;  // crossings on [range_floor_j, r_max]
  Alternative alternative = Alternative::inconclusive;
  double c_star_estimate = 0.0;
};

inline CrossingReport crossing_analysis(const RadialProfile& pr, const Nonlinearity& nl, double mu, double theta) {
  pr.validate();
  const int N = pr.N;
  require(mu > 1, Failure::precondition, "crossings: mu must exceed 1");
  require(nl.kind() == NonlinearityKind::stretched_exponential || nl.kind() == NonlinearityKind::singular_exact,
          Failure::precondition, "crossings: f must be of the e^{t^mu} class");
  CrossingReport rep;
  rep.theta = theta;
  rep.theta_min = (1 - 1 / mu) * (N - 1) + 1;
  require(theta >= rep.theta_min, Failure::precondition,
          "crossings: theta below the threshold (1 - 1/mu)(N - 1) + 1 = " + std::to_string(rep.theta_min));
  require(pr.r_max() < N, Failure::domain, "crossings: need r < N");
  std::vector<double> lower(pr.size()), upper(pr.size());
  for (std::size_t i = 0; i < pr.size(); ++i) {
    lower[i] = crossing_lower_graph(pr.r[i], N, mu, theta);
    upper[i] = crossing_upper_graph(pr.r[i], N, mu);
  }
  for (std::size_t i : crossing_indices(pr.u, lower)) rep.crossing_radii.push_back(pr.r[i]);

  for (double floor = pr.r_max() / 10; floor >= pr.r_min() * (1 - 1e-12); floor /= 10) {
    std::size_t c = 0;
    for (double rc : rep.crossing_radii) c += rc >= floor;
    rep.range_floor.push_back(floor);
    rep.range_count.push_back(c);
  }

  const double edge2 = 100 * pr.r_min();
  bool in_band = true, below = true;
  for (std::size_t i = 0; i < pr.size(); ++i) {
    if (pr.r[i] > edge2 * (1 + 1e-12)) continue;
    if (pr.u[i] < lower[i] || pr.u[i] > upper[i] * (1 + 1e-12)) in_band = false;
    if (pr.u[i] > lower[i]) below = false;
  }
  const std::size_t m = rep.range_count.size();
  const bool growing = m >= 3 && rep.range_count[m - 1] > rep.range_count[m - 2] &&
                       rep.range_count[m - 2] > rep.range_count[m - 3];
  if (in_band)
    rep.alternative = Alternative::band;
  else if (growing)
    rep.alternative = Alternative::crossing_evidence;
  else if (below)
    rep.alternative = Alternative::bounded;

  rep.c_star_estimate = INFINITY;
  for (std::size_t i = 0; i < pr.size(); ++i)
    if (pr.r[i] <= 10 * pr.r_min() * (1 + 1e-12))
      rep.c_star_estimate = std::min(rep.c_star_estimate, pr.u[i] / nl.invert_log_F(-N * std::log(pr.r[i])));
  return rep;
}

// ---------------------------------------------------------------------------
// Exponential integrability on a bounded piece

struct BrezisMerleSide {
  OmegaConvention convention;
  double omega = 0.0;
  double delta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct BrezisMerleReport {
  double g_norm = 0.0;   // || f(u) ||_1 over the annulus
  double volume = 0.0;   // Lebesgue measure of the annulus
  double lift_a = 0.0, lift_b = 0.0;  // u - (a + b log r) vanishes on both spheres
  std::vector<BrezisMerleSide> sides;
  bool pass = false;
};

/// The annulus r_min <= |x| <= r_max spanned by the profile plays the role of
/// the domain. The boundary values are removed with the radial N-harmonic lift
/// a + b log r (exact for N = 2; for N > 2 the lift only fixes the data).
inline BrezisMerleReport brezis_merle_check(const RadialProfile& pr, const Nonlinearity& nl, double delta_frac,
                                            double rtol = 1e-10) {
  pr.validate();
  require(delta_frac > 0 && delta_frac < 1, Failure::precondition, "brezis-merle: delta_frac must lie in (0, 1)");
  const int N = pr.N;
  const double sigma = sphere_measure(N);
  const ProfileInterpolant in(pr);
  const double xa = std::log(pr.r_min()), xb = std::log(pr.r_max());
  BrezisMerleReport rep;
  rep.lift_b = (pr.u.front() - pr.u.back()) / (xb - xa);
  rep.lift_a = pr.u.back() - rep.lift_b * xa;
  auto ux = [&](double xx) { return in.u(std::clamp(std::exp(xx), pr.r_min(), pr.r_max())); };
  rep.g_norm =
      integrate([&](double xx) { return sigma * std::exp(N * xx + nl.log_f(std::max(ux(xx), 0.0))); }, xa, xb, rtol)
          .value;
  if (!(rep.g_norm > 0)) throw PreconditionError(Failure::degenerate_input, "brezis-merle: ||g||_1 = 0");
  rep.volume = ball_volume(N) * (std::pow(pr.r_max(), N) - std::pow(pr.r_min(), N));
  const double gpow = std::pow(rep.g_norm, 1.0 / (N - 1));
  for (auto c : {OmegaConvention::ball_volume, OmegaConvention::sphere_surface}) {
    BrezisMerleSide s;
    s.convention = c;
    s.omega = omega(N, c);
    const double K = N * std::pow(s.omega, 1.0 / (N - 1));
    s.delta = delta_frac * K;
    const double a = (K - s.delta) / gpow;
    s.lhs = integrate(
                [&](double xx) {
                  const double v = ux(xx) - (rep.lift_a + rep.lift_b * xx);
                  return sigma * std::exp(N * xx + a * std::abs(v));
                },
                xa, xb, rtol)
                .value;
    s.rhs = K / s.delta * rep.volume;
    s.pass = s.lhs <= s.rhs;
    rep.pass = rep.pass || s.pass;
    rep.sides.push_back(s);
  }
  return rep;
}

/// Restricts a profile to r in [r_lo, r_hi] (node subset).
inline RadialProfile restrict_profile(const RadialProfile& pr, double r_lo, double r_hi) {
  RadialProfile out;
  out.N = pr.N;
  for (std::size_t i = 0; i < pr.size(); ++i)
    if (pr.r[i] >= r_lo && pr.r[i] <= r_hi) {
      out.r.push_back(pr.r[i]);
      out.u.push_back(pr.u[i]);
      out.p.push_back(pr.p[i]);
    }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// H_0 on the scaled trajectory

/// Trapezoid value of int H(xi) d xi over the scaled trajectory.
inline double h0_estimate(const ScaledTrajectory& st) { return trapezoid(st.xi, st.H); }

}  // namespace nlap
