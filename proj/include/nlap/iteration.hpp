#pragma once

// Explicit barriers for sub-exponential f, the monotone iteration on annuli
// between them, the eps -> 0 family and the flux (Dirac mass) estimator.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nlap/constants.hpp"
#include "nlap/errors.hpp"
#include "nlap/nonlinearity.hpp"
#include "nlap/parallel.hpp"
#include "nlap/roots.hpp"
#include "nlap/transform.hpp"

namespace nlap {

// ---------------------------------------------------------------------------
// Barriers

class BarrierPair {
 public:
  BarrierPair(double beta, double C, int N) : beta_(beta), C_(C), N_(N) {
    require(beta > 0 && C > 0, Failure::precondition, "barriers: need beta > 0 and C > 0");
    require(N >= 2, Failure::precondition, "barriers: N must be >= 2");
    mu_ = static_cast<double>(N) / (N - 1);
    M_ = C * std::pow(beta, N - 1);
    // v is strictly decreasing; r (1 + M r)^mu = 1 at the zero. Bracket in log r.
    auto h = [&](double x) { return x + mu_ * std::log1p(M_ * std::exp(x)); };
    double lo = -1.0, hi = 1.0;
    while (h(lo) > 0) lo *= 2;
    while (h(hi) < 0) hi *= 2;
    const double x = bisect(h, {lo, hi}, 1e-15);
    R_star_ = std::exp(x);
  }

  double beta() const { return beta_; }
  double C() const { return C_; }
  int dim() const { return N_; }
  double mu() const { return mu_; }
  double M() const { return M_; }
  double R_star() const { return R_star_; }

  double v(double r) const {
    require(r > 0, Failure::domain, "v: need r > 0");
    return (1.0 - N_) / beta_ * (std::log(r) + mu_ * std::log1p(M_ * r));
  }
  double w(double r, double R) const {
    require(r > 0 && R > 0, Failure::domain, "w: need r, R > 0");
    return (1.0 - N_) / beta_ * (std::log(r) + mu_ * std::log1p(M_ * R));
  }
  double w(double r) const { return w(r, R_star_); }

  double dv(double r) const { return (1.0 - N_) / beta_ * (1.0 / r + mu_ * M_ / (1.0 + M_ * r)); }

  /// Radial fluxes p = r^{N-1}|u'|^{N-2}u'.
  double flux_v(double r) const {
    const double B = (1.0 + (1.0 + mu_) * M_ * r) / (1.0 + M_ * r);
    return -std::pow((N_ - 1.0) / beta_ * B, N_ - 1);
  }
  double flux_w() const { return -std::pow((N_ - 1.0) / beta_, N_ - 1); }

  /// -Delta_N v in closed form.
  double laplacian_v(double r) const {
    const double Mr = M_ * r;
    const double B = (1.0 + (1.0 + mu_) * Mr) / (1.0 + Mr);
    return mu_ * M_ * std::pow(N_ - 1.0, N_) / std::pow(beta_, N_ - 1) / (std::pow(r, N_ - 1) * (1 + Mr) * (1 + Mr)) *
           std::pow(B, N_ - 2);
  }

  /// Total flux of -Delta_N w through any sphere: sigma ((N-1)/beta)^{N-1}.
  double dirac_weight_w() const { return sphere_measure(N_) * std::pow((N_ - 1.0) / beta_, N_ - 1); }

  /// The constant as printed for the Dirac identity of w: omega^{1/(N-1)} (N-1)/beta.
  double dirac_weight_printed(OmegaConvention c) const {
    return std::pow(omega(N_, c), 1.0 / (N_ - 1)) * (N_ - 1.0) / beta_;
  }

 private:
  double beta_, C_;
  int N_;
  double mu_ = 0, M_ = 0, R_star_ = 0;
};

inline BarrierPair make_barriers(double beta, double C, int N) { return {beta, C, N}; }

/// -Delta_N u from the slope function du(r): the flux r^{N-1}|u'|^{N-2}u' is
/// differenced with a five-point stencil in x = log r.
template <class DU>
double fd_n_laplacian(DU&& du, double r, int N, double h = 1e-2) {
  const double x = std::log(r);
  auto p = [&](double xx) {
    const double s = std::exp(xx);
    return flux_power(s * du(s), N);
  };
  const double px = (p(x - 2 * h) - 8 * p(x - h) + 8 * p(x + h) - p(x + 2 * h)) / (12 * h);
  return -px / std::pow(r, N);
}

struct SupersolutionReport {
  double max_rel_fd = 0.0;  // max |closed form - FD| / closed form
  std::size_t checked = 0;  // grid points with v >= 0 where f(v) was compared
  std::size_t violations = 0;
  std::optional<double> first_violation;  // radius
  double min_margin = INFINITY;          // min of laplacian_v - f(v) over checked points
};

inline SupersolutionReport verify_supersolution(const BarrierPair& bp, const Nonlinearity& nl,
                                                const std::vector<double>& r_grid) {
  require(nl.dim() == bp.dim(), Failure::precondition, "verify_supersolution: dimension mismatch");
  SupersolutionReport rep;
  const int N = bp.dim();
  for (double r : r_grid) {
    const double exact = bp.laplacian_v(r);
    const double fd = fd_n_laplacian([&](double s) { return bp.dv(s); }, r, N);
    rep.max_rel_fd = std::max(rep.max_rel_fd, std::abs(fd - exact) / exact);
    const double vr = bp.v(r);
    if (vr < 0) continue;  // f lives on [0, inf)
    ++rep.checked;
    const double fv = nl.f(vr);
    rep.min_margin = std::min(rep.min_margin, exact - fv);
    if (exact < fv) {
      ++rep.violations;
      if (!rep.first_violation) rep.first_violation = r;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Radial two-point problems on annuli

struct AnnulusConfig {
  double points_per_log = 1000.0;  // grid density in x = log r
  int min_points = 33;
  double tol_abs = 1e-8;
  double tol_rel = 0.0;
  int max_iter = 200;
  double sandwich_tol = 1e-8;
};

/// Log-uniform grid on [log eps, log R], ascending.
inline std::vector<double> annulus_grid(double eps, double R, const AnnulusConfig& cfg) {
  require(eps > 0 && eps < R, Failure::precondition, "annulus: need 0 < eps < R");
  const double a = std::log(eps), b = std::log(R);
  const int n = std::max(cfg.min_points, static_cast<int>(std::ceil(cfg.points_per_log * (b - a))) + 1);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  x.back() = b;
  return x;
}

struct BvpSolution {
  std::vector<double> u;  // on the ascending x grid
  std::vector<double> p;
  double slope = 0.0;     // p at the inner radius
  int shots = 0;
};

/// Solves -Delta_N u + kappa |u|^{N-2} u = g on the annulus with u = ua at
/// the inner and ub at the outer radius. g is given at the grid nodes; RK4 in x
/// on (u, p) with du/dx = phi(p), dp/dx = r^N (kappa |u|^{N-2}u - g), shooting
/// on p at the inner radius.
inline BvpSolution solve_radial_bvp(int N, const std::vector<double>& x, const std::vector<double>& g, double kappa,
                                    double ua, double ub, std::optional<double> warm = std::nullopt) {
  require(x.size() >= 5 && g.size() == x.size(), Failure::precondition, "bvp: grid/source size mismatch");
  const std::size_t n = x.size();
  // g at interval midpoints: four-point cubic inside, three-point quadratic at the ends.
  std::vector<double> gm(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (i == 0)
      gm[i] = (3 * g[0] + 6 * g[1] - g[2]) / 8;
    else if (i + 2 == n)
      gm[i] = (3 * g[n - 1] + 6 * g[n - 2] - g[n - 3]) / 8;
    else
      gm[i] = (-g[i - 1] + 9 * g[i] + 9 * g[i + 1] - g[i + 2]) / 16;
  }
  auto rhs = [&](double xx, double u, double p, double gv) {
    const double src = kappa == 0.0 ? -gv : kappa * flux_power(u, N) - gv;
    return std::pair{flux_root(p, N), std::exp(N * xx) * src};
  };
  BvpSolution sol;
  auto march = [&](double s, std::vector<double>* us, std::vector<double>* ps) {
    double u = ua, p = s;
    if (us) {
      us->assign(n, 0.0);
      ps->assign(n, 0.0);
      (*us)[0] = u;
      (*ps)[0] = p;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = x[i + 1] - x[i], xm = x[i] + 0.5 * h;
      const auto [k1u, k1p] = rhs(x[i], u, p, g[i]);
      const auto [k2u, k2p] = rhs(xm, u + 0.5 * h * k1u, p + 0.5 * h * k1p, gm[i]);
      const auto [k3u, k3p] = rhs(xm, u + 0.5 * h * k2u, p + 0.5 * h * k2p, gm[i]);
      const auto [k4u, k4p] = rhs(x[i + 1], u + h * k3u, p + h * k3p, g[i + 1]);
      u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
      p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
      if (us) {
        (*us)[i + 1] = u;
        (*ps)[i + 1] = p;
      }
    }
    return u;
  };
  auto miss = [&](double s) {
    ++sol.shots;
    return march(s, nullptr, nullptr) - ub;
  };
  // N-harmonic slope as the default starting guess.
  const double s0 = warm.value_or(flux_power((ub - ua) / (x.back() - x.front()), N));
  const double step = std::max(1e-3, 0.05 * std::abs(s0));
  const auto br = expand_bracket(miss, s0, step);
  if (!br)
    throw NumericalError(Failure::bracket, "bvp: no sign change of the shooting miss around slope " +
                                               std::to_string(s0));
  const double scale = std::max({1.0, std::abs(ua), std::abs(ub)});
  sol.slope = illinois(miss, *br, 1e-15 * std::max(1.0, std::abs(s0)), 1e-13 * scale);
  march(sol.slope, &sol.u, &sol.p);
  return sol;
}

/// One step of the monotone scheme: source f(prev) + kappa |prev|^{N-2} prev.
inline BvpSolution solve_annulus_step(const Nonlinearity& nl, const std::vector<double>& x,
                                      const std::vector<double>& prev, double ua, double ub,
                                      std::optional<double> warm = std::nullopt) {
  require(prev.size() == x.size(), Failure::precondition, "annulus step: previous iterate has wrong size");
  const int N = nl.dim();
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = std::max(prev[i], 0.0);
    g[i] = nl.f(u) + nl.kappa() * flux_power(u, N);
  }
  return solve_radial_bvp(N, x, g, nl.kappa(), ua, ub, warm);
}

struct IterationRecord {
  int n = 0;
  double sup_diff = 0.0;
  bool sandwich = true;     // w <= u_n <= v
  bool monotone = true;     // u_{n-1} <= u_n
  double min_gap_w = 0.0;   // min (u_n - w)
  double min_gap_v = 0.0;   // min (v - u_n)
  double min_increment = 0.0;
  int shots = 0;
};

struct MonotoneResult {
  double eps = 0.0;
  BarrierPair barriers{1, 1, 2};
  RadialProfile profile;  // descending r
  std::vector<IterationRecord> history;
  bool converged = false;
  bool sandwich_all = true;
  bool monotone_all = true;
};

/// Checks f(t) <= C e^{beta t} on a sample of [0, 60].
inline bool witnesses_hold(const Nonlinearity& nl, double beta, double C) {
  for (int i = 0; i <= 600; ++i) {
    const double t = 0.1 * i;
    if (nl.log_f(t) > std::log(C) + beta * t + 1e-12) return false;
  }
  return true;
}

inline MonotoneResult monotone_iterate(const Nonlinearity& nl, double beta, double C, double eps,
                                       const AnnulusConfig& cfg = {}) {
  require(!nl.is_super(), Failure::precondition, "monotone_iterate: nonlinearity must be sub-exponential");
  require(witnesses_hold(nl, beta, C), Failure::precondition,
          "monotone_iterate: f(t) <= C e^{beta t} fails for the given witnesses");
  const int N = nl.dim();
  MonotoneResult res;
  res.eps = eps;
  res.barriers = make_barriers(beta, C, N);
  const auto& bp = res.barriers;
  const double R = bp.R_star();
  require(eps > 0 && eps < R, Failure::precondition, "monotone_iterate: need 0 < eps < R_star");

  const auto x = annulus_grid(eps, R, cfg);
  const std::size_t n = x.size();
  std::vector<double> wv(n), vv(n), u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::exp(x[i]);
    wv[i] = bp.w(r);
    vv[i] = bp.v(r);
  }
  wv.back() = 0.0;  // w(R_star) = v(R_star) = 0 up to the root tolerance
  const double ua = wv.front(), ub = wv.back();
  u = wv;
  std::vector<double> p(n, bp.flux_w());
  std::optional<double> warm;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const auto step = solve_annulus_step(nl, x, u, ua, ub, warm);
    warm = step.slope;
    IterationRecord rec;
    rec.n = it;
    rec.shots = step.shots;
    rec.min_gap_w = rec.min_gap_v = rec.min_increment = INFINITY;
    double sup_u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double un = step.u[i];
      rec.sup_diff = std::max(rec.sup_diff, std::abs(un - u[i]));
      rec.min_gap_w = std::min(rec.min_gap_w, un - wv[i]);
      rec.min_gap_v = std::min(rec.min_gap_v, vv[i] - un);
      rec.min_increment = std::min(rec.min_increment, un - u[i]);
      sup_u = std::max(sup_u, std::abs(un));
    }
    rec.sandwich = rec.min_gap_w >= -cfg.sandwich_tol && rec.min_gap_v >= -cfg.sandwich_tol;
    rec.monotone = rec.min_increment >= -cfg.sandwich_tol;
    res.sandwich_all = res.sandwich_all && rec.sandwich;
    res.monotone_all = res.monotone_all && rec.monotone;
    res.history.push_back(rec);
    u = step.u;
    p = step.p;
    if (rec.sup_diff < cfg.tol_abs + cfg.tol_rel * sup_u) {
      res.converged = true;
      break;
    }
  }
  res.profile.N = N;
  for (std::size_t k = n; k-- > 0;) {
    res.profile.r.push_back(std::exp(x[k]));
    res.profile.u.push_back(u[k]);
    res.profile.p.push_back(p[k]);
  }
  return res;
}

struct EpsFamily {
  std::vector<MonotoneResult> runs;  // eps_k = 2^{-k} eps0, k = 0..K
  std::vector<double> cauchy;        // sup |u_{k+1} - u_k| on [eps0, R_star]
};

inline EpsFamily eps_family(const Nonlinearity& nl, double beta, double C, double eps0, int K,
                            const AnnulusConfig& cfg = {}, unsigned threads = 1) {
  require(K >= 0, Failure::precondition, "eps_family: K must be >= 0");
  EpsFamily fam;
  fam.runs.resize(static_cast<std::size_t>(K) + 1);
  parallel_for(fam.runs.size(), threads,
               [&](std::size_t k) { fam.runs[k] = monotone_iterate(nl, beta, C, std::ldexp(eps0, -int(k)), cfg); });
  const auto& base = fam.runs.front().profile;
  for (std::size_t k = 0; k + 1 < fam.runs.size(); ++k) {
    const ProfileInterpolant a(fam.runs[k].profile), b(fam.runs[k + 1].profile);
    double d = 0.0;
    for (double r : base.r) d = std::max(d, std::abs(a.u(r) - b.u(r)));
    fam.cauchy.push_back(d);
  }
  return fam;
}

// ---------------------------------------------------------------------------
// Flux through spheres

struct FluxRow {
  double r;
  double phi;  // sigma * (-p(r))
};

struct DiracFlux {
  std::vector<FluxRow> table;  // r descending
  double alpha = 0.0;          // extrapolated r -> 0 limit of phi
  double alpha_printed_ball = 0.0;     // (omega |p0|)^{1/(N-1)}, omega = unit-ball volume
  double alpha_printed_sphere = 0.0;   // same with omega = unit-sphere surface
  bool positive = true;
  bool nonincreasing_inward = true;  // phi(r) non-increasing as r decreases
};

/// Flux table on radii r_hi, r_hi/10, ... down to r_lo (always included).
inline DiracFlux dirac_flux(const RadialProfile& pr, double r_lo, double r_hi) {
  pr.validate();
  require(r_lo > 0 && r_hi > r_lo, Failure::precondition, "dirac_flux: need 0 < r_lo < r_hi");
  require(r_hi / r_lo >= 4.0, Failure::window_too_narrow, "dirac_flux: window narrower than a factor 4");
  require(r_lo >= pr.r_min() * (1 - 1e-12) && r_hi <= pr.r_max() * (1 + 1e-12), Failure::under_resolved,
          "dirac_flux: window not covered by the profile");
  const int N = pr.N;
  const double sigma = sphere_measure(N);
  const ProfileInterpolant in(pr);
  DiracFlux out;
  std::vector<double> radii;
  for (double r = r_hi; r > r_lo * (1 + 1e-9); r /= 10) radii.push_back(r);
  radii.push_back(r_lo);
  for (double r : radii) {
    const double rc = std::clamp(r, pr.r_min(), pr.r_max());
    out.table.push_back({r, -sigma * in.p(rc)});
  }
  for (std::size_t k = 0; k < out.table.size(); ++k) {
    if (!(out.table[k].phi > 0)) out.positive = false;
    if (k > 0 && out.table[k].phi > out.table[k - 1].phi * (1 + 1e-10) + 1e-300) out.nonincreasing_inward = false;
  }
  const auto& a = out.table[out.table.size() - 1];
  const auto& b = out.table[out.table.size() - 2];
  out.alpha = a.phi - a.r * (b.phi - a.phi) / (b.r - a.r);
  const double p0 = out.alpha / sigma;
  auto printed = [&](OmegaConvention c) { return std::pow(omega(N, c) * std::max(p0, 0.0), 1.0 / (N - 1)); };
  out.alpha_printed_ball = printed(OmegaConvention::ball_volume);
  out.alpha_printed_sphere = printed(OmegaConvention::sphere_surface);
  return out;
}

}  // namespace nlap
