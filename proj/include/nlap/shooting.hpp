#pragma once

// Shooting from infinity: y(inf) = gamma, y'(inf) = 0, integrated backward to
// the first zero T(gamma), plus the energy diagnostics along the trajectory.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlap/errors.hpp"
#include "nlap/nonlinearity.hpp"
#include "nlap/ode.hpp"
#include "nlap/parallel.hpp"
#include "nlap/transform.hpp"

namespace nlap {

struct ShootingConfig {
  IntegratorConfig integrator;
  double t_floor = -50.0;    // give up looking for a zero below this t
  double tmax_extra = 0.0;   // added to the automatic T_max (tail-consistency probes)
  double margin = 0.5;       // common grid starts at max T(gamma) + margin
  double grid_span = 5.0;
  int grid_points = 201;
  double tol_cauchy = 0.2;
  double energy_tol = 1e-8;
  double bound_tol = 1e-6;
};

struct ShootingChecks {
  bool positive_slope = true;
  bool concave = true;
  bool energy_nonnegative = true;
  bool energy_monotone = true;
  bool bound_ok = true;
  bool all() const { return positive_slope && concave && energy_nonnegative && energy_monotone && bound_ok; }
};

struct ShootingRecord {
  double gamma = 0.0;
  double t_max = 0.0;
  double tail_correction = 0.0;  // gamma - y(T_max)
  bool tail_adjusted = false;
  std::optional<double> T;
  EFTrajectory trajectory;
  std::optional<double> s0;
  std::optional<double> t0;
  std::vector<double> energy;  // NaN where g' is undefined
  double energy_min = std::numeric_limits<double>::quiet_NaN();
  double bound_max = std::numeric_limits<double>::quiet_NaN();
  ShootingChecks checks;
  long steps = 0;
};

/// Smallest point s of a log grid on [1e-6, 1e3] beyond which g' and g'' stay
/// positive, doubled. None when no such point exists on the grid.
inline std::optional<double> convexity_threshold(const Nonlinearity& nl) {
  constexpr int n = 600;
  const double a = std::log(1e-6), b = std::log(1e3);
  std::optional<double> s;
  for (int i = n - 1; i >= 0; --i) {
    const double x = std::exp(a + (b - a) * i / (n - 1));
    bool ok = false;
    try {
      ok = nl.dlog_f(x) > 0 && nl.d2log_f(x) > 0;
    } catch (const PreconditionError&) {
      ok = false;
    }
    if (!ok) break;
    s = x;
  }
  if (!s) return std::nullopt;
  return 2.0 * *s;
}

/// E(t) = (y')^{N-1} - ((N-1)/N) (y')^N g'(y) - e^{g(y) - t} at every grid point.
inline std::vector<double> energy(const EFTrajectory& tr, const Nonlinearity& nl) {
  tr.validate();
  const int N = tr.N;
  std::vector<double> E(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double yv = std::max(tr.y[i], 0.0);
    const double dy = tr.dy(i);
    E[i] = flux_power(dy, N) - (N - 1.0) / N * std::pow(std::abs(dy), N) * nl.dlog_f(yv) -
           std::exp(nl.log_f(yv) - tr.t[i]);
  }
  return E;
}

/// Automatic starting time: the frozen-coefficient correction
/// (N-1) f(gamma)^{1/(N-1)} e^{-T/(N-1)} equals rtol * gamma.
inline double shooting_t_max(const Nonlinearity& nl, int N, double gamma, double rtol) {
  const double lf = nl.log_f(gamma);
  require(std::isfinite(lf), Failure::overflow, "shoot: log f(gamma) is not finite");
  return (N - 1) * std::log(N - 1.0) + lf - (N - 1) * std::log(rtol * gamma);
}

inline ShootingRecord shoot(const Nonlinearity& nl, int N, double gamma, const ShootingConfig& cfg = {}) {
  require(gamma > 0 && std::isfinite(gamma), Failure::precondition, "shoot: gamma must be positive");
  require(N == nl.dim(), Failure::precondition, "shoot: N does not match the nonlinearity");
  require(nl.is_super(), Failure::precondition, "shoot: nonlinearity must be declared super-exponential");
  const auto& ic = cfg.integrator;
  ic.validate();

  ShootingRecord rec;
  rec.gamma = gamma;
  const double lf = nl.log_f(gamma);
  double T = shooting_t_max(nl, N, gamma, ic.rtol) + cfg.tmax_extra;
  auto correction = [&](double t) { return (N - 1) * std::exp((lf - t) / (N - 1)); };
  if (correction(T) > 0.01 * gamma) {
    rec.tail_adjusted = true;
    while (correction(T) > 0.01 * gamma) {
      T += 1.0;
      if (T > 1e6) throw NumericalError(Failure::tail_inconsistency, "shoot: tail correction never fell below 1%");
    }
  }
  rec.t_max = T;
  rec.tail_correction = correction(T);
  const double y0 = gamma - rec.tail_correction;
  const double q0 = std::exp(lf - T);

  const EfRun run = integrate_ef(nl, N, T, cfg.t_floor, y0, q0, ic);
  rec.trajectory = run.trajectory;
  rec.T = run.zero;
  rec.steps = run.accepted;

  const EFTrajectory& tr = rec.trajectory;
  const std::size_t n = tr.size();

  // Shape: y' > 0 (away from the zero itself, where q > 0 still holds) and concavity.
  const double qtol = 10 * ic.atol;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(tr.q[i] > 0)) rec.checks.positive_slope = false;
    if (i + 1 < n && tr.q[i + 1] > tr.q[i] + qtol) rec.checks.concave = false;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double w = (tr.t[i] - tr.t[i - 1]) / (tr.t[i + 1] - tr.t[i - 1]);
    const double chord = (1 - w) * tr.y[i - 1] + w * tr.y[i + 1];
    if (chord > tr.y[i] + 1e-9 * std::max(1.0, std::abs(tr.y[i]))) rec.checks.concave = false;
  }

  rec.s0 = convexity_threshold(nl);
  if (rec.s0 && *rec.s0 < tr.y.back()) {
    const double s0 = *rec.s0;
    std::size_t k = 0;
    while (tr.y[k] < s0) ++k;
    if (k == 0) {
      rec.t0 = tr.t[0];
    } else {
      const EfInterpolant in(tr);
      double lo = tr.t[k - 1], hi = tr.t[k];
      while (hi - lo > ic.event_tol) {
        const double mid = 0.5 * (lo + hi);
        (in.y(mid) < s0 ? lo : hi) = mid;
      }
      rec.t0 = hi;
    }
  }

  rec.energy.assign(n, std::numeric_limits<double>::quiet_NaN());
  const double crit = static_cast<double>(N) / (N - 1);
  double prev_E = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const double yv = std::max(tr.y[i], 0.0);
    double g1;
    try {
      g1 = nl.dlog_f(yv);
    } catch (const PreconditionError&) {
      continue;
    }
    const double dy = tr.dy(i);
    const double E = tr.q[i] - (N - 1.0) / N * std::pow(std::abs(dy), N) * g1 - std::exp(nl.log_f(yv) - tr.t[i]);
    rec.energy[i] = E;
    if (!rec.t0 || tr.t[i] < *rec.t0) continue;
    rec.energy_min = std::isnan(rec.energy_min) ? E : std::min(rec.energy_min, E);
    const double bound = dy * g1;
    rec.bound_max = std::isnan(rec.bound_max) ? bound : std::max(rec.bound_max, bound);
    if (E < -cfg.energy_tol) rec.checks.energy_nonnegative = false;
    if (!std::isnan(prev_E) && E > prev_E + cfg.energy_tol) rec.checks.energy_monotone = false;
    prev_E = E;
  }
  if (!std::isnan(rec.bound_max) && rec.bound_max > crit + cfg.bound_tol) rec.checks.bound_ok = false;
  return rec;
}

/// |T(gamma)| shift when T_max is pushed out by `extra`.
inline double tail_shift(const Nonlinearity& nl, int N, double gamma, double extra, const ShootingConfig& cfg = {}) {
  const auto a = shoot(nl, N, gamma, cfg);
  ShootingConfig c2 = cfg;
  c2.tmax_extra += extra;
  const auto b = shoot(nl, N, gamma, c2);
  if (!a.T || !b.T) throw NumericalError(Failure::non_convergence, "tail_shift: no zero found");
  return std::abs(*a.T - *b.T);
}

/// Removability probe on a shooting trajectory: y' decreasing for
/// t >= t0 and y'(t_end) < ratio * y'(t0).
struct RemovabilityProbe {
  bool slope_decreasing = true;
  double slope_t0 = 0.0;
  double slope_end = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

inline RemovabilityProbe removability(const ShootingRecord& rec, double threshold = 1e-3) {
  RemovabilityProbe pr;
  const auto& tr = rec.trajectory;
  const double t0 = rec.t0.value_or(tr.t.front());
  const EfInterpolant in(tr);
  pr.slope_t0 = in.dy(t0);
  pr.slope_end = tr.dy(tr.size() - 1);
  for (std::size_t i = 0; i + 1 < tr.size(); ++i)
    if (tr.t[i] >= t0 && tr.dy(i + 1) > tr.dy(i)) pr.slope_decreasing = false;
  pr.ratio = pr.slope_end / pr.slope_t0;
  pr.pass = pr.slope_decreasing && pr.ratio < threshold;
  return pr;
}

// ---------------------------------------------------------------------------
// Sweeps over gamma

struct LocusEntry {
  double gamma;
  std::optional<ShootingRecord> record;
  std::string error;
};

struct ZeroLocus {
  std::vector<LocusEntry> entries;  // ordered as the input gamma list
  std::optional<double> empirical_sup;
  double modulus = 0.0;  // max |T_{i+1} - T_i| over successful neighbours
};

inline ZeroLocus zero_locus(const Nonlinearity& nl, int N, const std::vector<double>& gammas,
                            const ShootingConfig& cfg = {}, unsigned threads = 1) {
  require(!gammas.empty(), Failure::precondition, "zero_locus: empty gamma list");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    require(gammas[i] > 0, Failure::precondition, "zero_locus: gamma values must be positive");
    require(i == 0 || gammas[i] >= gammas[i - 1], Failure::precondition, "zero_locus: gamma list must be sorted");
  }
  ZeroLocus out;
  out.entries.resize(gammas.size());
  parallel_for(gammas.size(), threads, [&](std::size_t i) {
    auto& e = out.entries[i];
    e.gamma = gammas[i];
    try {
      e.record = shoot(nl, N, gammas[i], cfg);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  });
  std::optional<double> prev;
  for (const auto& e : out.entries) {
    if (!e.record || !e.record->T) {
      prev.reset();
      continue;
    }
    const double Tg = *e.record->T;
    out.empirical_sup = out.empirical_sup ? std::max(*out.empirical_sup, Tg) : Tg;
    if (prev) out.modulus = std::max(out.modulus, std::abs(Tg - *prev));
    prev = Tg;
  }
  return out;
}

struct SingularLimit {
  std::vector<double> gammas;
  std::vector<double> T;  // T(gamma_n)
  double T_star = 0.0;    // estimate: T of the last gamma
  double max_T = 0.0;
  std::vector<double> grid;
  std::vector<double> y_star;     // last trajectory on the common grid
  std::vector<double> sup_diff;   // sup |y_{n+1} - y_n| on the grid
  bool differences_decreasing = false;
  bool converged = false;
  double floor_value = 0.0;       // y_star at the first grid point
  std::string note;
};

inline SingularLimit singular_limit(const Nonlinearity& nl, int N, const std::vector<double>& gammas,
                                    const ShootingConfig& cfg = {}, unsigned threads = 1) {
  require(gammas.size() >= 4, Failure::precondition, "singular_limit: need at least 4 gamma values");
  for (std::size_t i = 1; i < gammas.size(); ++i)
    require(gammas[i] >= gammas[i - 1], Failure::precondition, "singular_limit: gamma sequence must be increasing");
  require(nl.is_super(), Failure::precondition, "singular_limit: nonlinearity must be super-exponential");
  require(cfg.grid_points >= 2 && cfg.grid_span > 0, Failure::precondition, "singular_limit: bad common grid");

  const auto locus = zero_locus(nl, N, gammas, cfg, threads);
  SingularLimit out;
  out.gammas = gammas;
  double t_hi = std::numeric_limits<double>::infinity();
  for (const auto& e : locus.entries) {
    if (!e.record || !e.record->T) {
      out.note = "no zero for gamma = " + std::to_string(e.gamma) + (e.error.empty() ? "" : ": " + e.error);
      return out;
    }
    out.T.push_back(*e.record->T);
    t_hi = std::min(t_hi, e.record->trajectory.t.back());
  }
  out.max_T = *std::max_element(out.T.begin(), out.T.end());
  out.T_star = out.T.back();
  const double lo = out.max_T + cfg.margin;
  const double hi = std::min(lo + cfg.grid_span, t_hi);
  if (!(hi > lo)) {
    out.note = "common grid is empty";
    return out;
  }
  out.grid.resize(static_cast<std::size_t>(cfg.grid_points));
  for (int k = 0; k < cfg.grid_points; ++k) out.grid[k] = lo + (hi - lo) * k / (cfg.grid_points - 1);

  std::vector<std::vector<double>> ys;
  for (const auto& e : locus.entries) {
    const EfInterpolant in(e.record->trajectory);
    std::vector<double> v(out.grid.size());
    for (std::size_t k = 0; k < out.grid.size(); ++k) v[k] = in.y(out.grid[k]);
    ys.push_back(std::move(v));
  }
  for (std::size_t n = 0; n + 1 < ys.size(); ++n) {
    double d = 0.0;
    for (std::size_t k = 0; k < out.grid.size(); ++k) d = std::max(d, std::abs(ys[n + 1][k] - ys[n][k]));
    out.sup_diff.push_back(d);
  }
  out.differences_decreasing = true;
  for (std::size_t k = 0; k + 1 < out.sup_diff.size(); ++k) {
    const double a = out.sup_diff[k], b = out.sup_diff[k + 1];
    if (!(b < a || (a == 0.0 && b == 0.0))) out.differences_decreasing = false;
  }
  out.y_star = ys.back();
  out.floor_value = out.y_star.front();
  out.converged = out.differences_decreasing && out.sup_diff.back() < cfg.tol_cauchy;
  if (!out.converged) out.note = "Cauchy test failed; see sup_diff";
  return out;
}

}  // namespace nlap
