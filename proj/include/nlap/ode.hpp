#pragma once

// Adaptive integration of the transformed equation in flux form
//   y' = sgn(q) |q|^{1/(N-1)},   q' = -e^{-t} f(y)
// with the Dormand-Prince 5(4) pair and its fourth-order continuous extension.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <optional>
#include <vector>

#include "nlap/constants.hpp"
#include "nlap/errors.hpp"
#include "nlap/nonlinearity.hpp"
#include "nlap/transform.hpp"

namespace nlap {

struct IntegratorConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = 1.0;
  double min_step = 1e-13;
  long max_steps = 2'000'000;
  double event_tol = 1e-10;
  double fixed_step = 0.0;  // > 0 disables error control (order studies)
  double max_dlogf = 0.5;   // cap on |log f(y_{n+1}) - log f(y_n)| per step

  void validate() const {
    require(rtol > 0 && atol > 0 && event_tol > 0, Failure::precondition, "integrator: tolerances must be positive");
    require(min_step > 0 && max_step > 0 && min_step < max_step, Failure::precondition,
            "integrator: need 0 < min_step < max_step");
    require(max_steps > 0, Failure::precondition, "integrator: max_steps must be positive");
    require(fixed_step >= 0, Failure::precondition, "integrator: fixed_step must be >= 0");
  }
};

/// Anything that provides log f on [0, inf).
template <class S>
concept SourceTerm = requires(const S& s, double y) {
  { s.log_f(y) } -> std::convertible_to<double>;
};

struct EfRun {
  EFTrajectory trajectory;  // ascending in t regardless of integration direction
  bool hit_zero = false;
  std::optional<double> zero;
  long accepted = 0;
  long rejected = 0;
};

namespace detail {

using State = std::array<double, 2>;

struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

struct StepResult {
  State y1;
  State k7;  // FSAL derivative at the new point
  double err;
  std::array<State, 5> rcont;
};

template <class Rhs>
StepResult dopri_step(Rhs&& rhs, double t, const State& y, const State& k1, double h, double rtol, double atol) {
  using D = Dopri5;
  auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
    State s = y;
    for (auto [a, k] : terms)
      for (int j = 0; j < 2; ++j) s[j] += h * a * (*k)[j];
    return s;
  };
  const State k2 = rhs(t + D::c2 * h, comb({{D::a21, &k1}}));
  const State k3 = rhs(t + D::c3 * h, comb({{D::a31, &k1}, {D::a32, &k2}}));
  const State k4 = rhs(t + D::c4 * h, comb({{D::a41, &k1}, {D::a42, &k2}, {D::a43, &k3}}));
  const State k5 = rhs(t + D::c5 * h, comb({{D::a51, &k1}, {D::a52, &k2}, {D::a53, &k3}, {D::a54, &k4}}));
  const State k6 =
      rhs(t + h, comb({{D::a61, &k1}, {D::a62, &k2}, {D::a63, &k3}, {D::a64, &k4}, {D::a65, &k5}}));
  StepResult r;
  r.y1 = comb({{D::a71, &k1}, {D::a73, &k3}, {D::a74, &k4}, {D::a75, &k5}, {D::a76, &k6}});
  r.k7 = rhs(t + h, r.y1);
  double acc = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double e =
        h * (D::e1 * k1[j] + D::e3 * k3[j] + D::e4 * k4[j] + D::e5 * k5[j] + D::e6 * k6[j] + D::e7 * r.k7[j]);
    const double sc = atol + rtol * std::max(std::abs(y[j]), std::abs(r.y1[j]));
    acc += (e / sc) * (e / sc);
  }
  r.err = std::sqrt(acc / 2.0);
  for (int j = 0; j < 2; ++j) {
    const double dy = r.y1[j] - y[j];
    const double bspl = h * k1[j] - dy;
    r.rcont[0][j] = y[j];
    r.rcont[1][j] = dy;
    r.rcont[2][j] = bspl;
    r.rcont[3][j] = dy - h * r.k7[j] - bspl;
    r.rcont[4][j] = h * (D::d1 * k1[j] + D::d3 * k3[j] + D::d4 * k4[j] + D::d5 * k5[j] + D::d6 * k6[j] +
                         D::d7 * r.k7[j]);
  }
  return r;
}

inline double dense(const std::array<State, 5>& rc, int j, double theta) {
  const double th1 = 1.0 - theta;
  return rc[0][j] + theta * (rc[1][j] + th1 * (rc[2][j] + theta * (rc[3][j] + th1 * rc[4][j])));
}

}  // namespace detail

/// Integrates from t_start towards t_end (either direction), stopping early at
/// the first crossing of y = 0.
template <SourceTerm Source>
EfRun integrate_ef(const Source& src, int N, double t_start, double t_end, double y0, double q0,
                   const IntegratorConfig& cfg) {
  using detail::State;
  cfg.validate();
  require(N >= 2, Failure::precondition, "integrate_ef: N must be >= 2");
  require(t_start != t_end, Failure::precondition, "integrate_ef: empty interval");
  require(y0 >= 0, Failure::precondition, "integrate_ef: y0 must be >= 0");

  auto log_f = [&](double yv) { return static_cast<double>(src.log_f(std::max(yv, 0.0))); };
  auto rhs = [&](double t, const State& s) -> State {
    const double lf = log_f(s[0]);
    const double dq = lf == -INFINITY ? 0.0 : -std::exp(lf - t);
    if (!std::isfinite(dq)) throw NumericalError(Failure::overflow, "integrate_ef: e^{-t} f(y) overflowed");
    return {flux_root(s[1], N), dq};
  };

  const double dir = t_end > t_start ? 1.0 : -1.0;
  EfRun run;
  std::vector<double> ts{t_start}, ys{y0}, qs{q0};
  double t = t_start;
  State y{y0, q0};
  State k1 = rhs(t, y);
  double h = cfg.fixed_step > 0 ? cfg.fixed_step : std::min(cfg.max_step, 1e-2 * std::abs(t_end - t_start));
  h = std::max(h, 10 * cfg.min_step);
  const bool watch_zero = y0 > 0;

  while (dir * (t_end - t) > 0) {
    if (run.accepted + run.rejected >= cfg.max_steps)
      throw NumericalError(Failure::max_steps, "integrate_ef: max_steps exceeded at t = " + std::to_string(t));
    const double remaining = std::abs(t_end - t);
    const bool last = h >= remaining;
    const double hs = last ? remaining : h;
    const auto st = detail::dopri_step(rhs, t, y, k1, dir * hs, cfg.rtol, cfg.atol);

    const double lf0 = log_f(y[0]), lf1 = log_f(st.y1[0]);
    const double dlogf = std::isfinite(lf0) && std::isfinite(lf1) ? std::abs(lf1 - lf0) : 0.0;
    const bool fixed = cfg.fixed_step > 0;
    const bool accept = fixed || (st.err <= 1.0 && dlogf <= cfg.max_dlogf);
    if (!accept) {
      ++run.rejected;
      double fac = st.err > 1.0 ? std::max(0.2, 0.9 * std::pow(st.err, -0.2)) : 1.0;
      if (dlogf > cfg.max_dlogf) fac = std::min(fac, std::max(0.1, 0.9 * cfg.max_dlogf / dlogf));
      h = hs * fac;
      if (h < cfg.min_step)
        throw NumericalError(Failure::step_underflow, "integrate_ef: step size underflow at t = " + std::to_string(t));
      continue;
    }
    ++run.accepted;
    const double t1 = last ? t_end : t + dir * hs;

    if (watch_zero && st.y1[0] <= 0.0) {
      // Locate the crossing on the continuous extension.
      auto yth = [&](double th) { return detail::dense(st.rcont, 0, th); };
      double lo = 0.0, hi = 1.0;
      while ((hi - lo) * hs > cfg.event_tol) {
        const double mid = 0.5 * (lo + hi);
        (yth(mid) > 0 ? lo : hi) = mid;
      }
      const double th = 0.5 * (lo + hi);
      const double te = t + dir * th * hs;
      ts.push_back(te);
      ys.push_back(0.0);
      qs.push_back(detail::dense(st.rcont, 1, th));
      run.hit_zero = true;
      run.zero = te;
      break;
    }

    t = t1;
    y = st.y1;
    k1 = st.k7;
    ts.push_back(t);
    ys.push_back(y[0]);
    qs.push_back(y[1]);
    if (!fixed) {
      const double fac = st.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(st.err, -0.2), 0.2, 5.0);
      h = std::min(hs * fac, cfg.max_step);
      if (dlogf > 0) h = std::min(h, hs * std::max(1.0, 0.9 * cfg.max_dlogf / dlogf));
    }
  }

  if (dir < 0) {
    std::reverse(ts.begin(), ts.end());
    std::reverse(ys.begin(), ys.end());
    std::reverse(qs.begin(), qs.end());
  }
  run.trajectory.N = N;
  run.trajectory.t = std::move(ts);
  run.trajectory.y = std::move(ys);
  run.trajectory.q = std::move(qs);
  return run;
}

/// Largest t at which the (interpolated) trajectory reaches y = 0.
inline std::optional<double> first_zero(const EFTrajectory& tr, double event_tol = 1e-10) {
  tr.validate();
  const std::size_t n = tr.size();
  if (tr.y[n - 1] == 0.0) return tr.t[n - 1];
  const EfInterpolant in(tr);
  for (std::size_t k = n - 1; k-- > 0;) {
    if (tr.y[k] == 0.0) return tr.t[k];
    if ((tr.y[k] < 0) != (tr.y[k + 1] < 0)) {
      double lo = tr.t[k], hi = tr.t[k + 1];
      const bool up = tr.y[k + 1] > tr.y[k];
      while (hi - lo > event_tol) {
        const double mid = 0.5 * (lo + hi);
        const double v = in.y(mid);
        ((v > 0) == up ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Residuals by differencing the flux variable

/// Fornberg weights for the first derivative at z on arbitrary nodes.
inline std::vector<double> first_derivative_weights(std::span<const double> x, double z) {
  const std::size_t n = x.size();
  std::vector<std::array<double, 2>> c(n, {0.0, 0.0});
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

/// d/dx of samples v on grid x with five-point stencils (centred where possible).
inline std::vector<double> stencil_derivative(std::span<const double> x, std::span<const double> v) {
  const std::size_t n = x.size();
  require(n >= 5, Failure::grid_too_coarse, "residual: need at least 5 grid points");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = std::min(i < 2 ? 0 : i - 2, n - 5);
    const auto w = first_derivative_weights(x.subspan(lo, 5), x[i]);
    double s = 0.0;
    for (std::size_t j = 0; j < 5; ++j) s += w[j] * v[lo + j];
    d[i] = s;
  }
  return d;
}

struct ResidualReport {
  std::vector<double> defect;    // pointwise (signed) defect
  std::vector<double> relative;  // |defect| / |rhs| (|defect| where rhs == 0)
  double max_abs = 0.0;
  double max_rel = 0.0;
};

namespace detail {
inline ResidualReport finish_residual(std::vector<double> defect, const std::vector<double>& rhs) {
  ResidualReport rep;
  rep.relative.resize(defect.size());
  for (std::size_t i = 0; i < defect.size(); ++i) {
    const double a = std::abs(defect[i]);
    rep.relative[i] = rhs[i] != 0.0 ? a / std::abs(rhs[i]) : a;
    rep.max_abs = std::max(rep.max_abs, a);
    rep.max_rel = std::max(rep.max_rel, rep.relative[i]);
  }
  rep.defect = std::move(defect);
  return rep;
}
}  // namespace detail

/// Defect of -q' = rhs(t, y) where rhs defaults to e^{-t} f(y).
template <class Rhs>
  requires std::invocable<Rhs, double, double>
ResidualReport trajectory_residual(const EFTrajectory& tr, Rhs&& rhs) {
  tr.validate();
  const auto dq = stencil_derivative(tr.t, tr.q);
  std::vector<double> defect(tr.size()), r(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    r[i] = rhs(tr.t[i], tr.y[i]);
    defect[i] = -dq[i] - r[i];
  }
  return detail::finish_residual(std::move(defect), r);
}

inline ResidualReport trajectory_residual(const EFTrajectory& tr, const Nonlinearity& nl) {
  return trajectory_residual(tr, [&](double t, double y) { return std::exp(nl.log_f(std::max(y, 0.0)) - t); });
}

/// Defect of -r^{1-N} p'(r) = rhs(r, u); the flux is differenced in log r.
template <class Rhs>
  requires std::invocable<Rhs, double, double>
ResidualReport profile_residual(const RadialProfile& pr, Rhs&& rhs) {
  pr.validate();
  std::vector<double> x(pr.size()), p(pr.size());
  // ascending log r for the stencil
  for (std::size_t i = 0; i < pr.size(); ++i) {
    x[i] = std::log(pr.r[pr.size() - 1 - i]);
    p[i] = pr.p[pr.size() - 1 - i];
  }
  const auto dpdx = stencil_derivative(x, p);
  std::vector<double> defect(pr.size()), r(pr.size());
  for (std::size_t i = 0; i < pr.size(); ++i) {
    const std::size_t k = pr.size() - 1 - i;  // ascending index
    const double rr = pr.r[i];
    r[i] = rhs(rr, pr.u[i]);
    defect[i] = -dpdx[k] / std::pow(rr, pr.N) - r[i];
  }
  return detail::finish_residual(std::move(defect), r);
}

inline ResidualReport profile_residual(const RadialProfile& pr, const Nonlinearity& nl) {
  return profile_residual(pr, [&](double, double u) { return nl.f(u); });
}

}  // namespace nlap
