#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "app/artifacts.hpp"
#include "app/config.hpp"
#include "nlap/nlap.hpp"

namespace nlap::app {

inline std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

inline std::string fmt_exact(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

inline ShootingConfig make_shooting(const Config& cfg) {
  ShootingConfig sc;
  sc.integrator = make_integrator(cfg);
  sc.t_floor = cfg.num("shoot.t_floor");
  sc.tmax_extra = cfg.num("shoot.tmax_extra");
  sc.margin = cfg.num("shoot.margin");
  sc.grid_span = cfg.num("shoot.grid_span");
  sc.grid_points = static_cast<int>(cfg.integer("shoot.grid_points"));
  sc.tol_cauchy = cfg.num("shoot.tol_cauchy");
  return sc;
}

inline std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = std::exp(std::log(a) + (std::log(b) - std::log(a)) * i / (n - 1));
  return g;
}

// ---------------------------------------------------------------------------

inline void run_classify(const Config& cfg, unsigned threads, std::ostream& out) {
  const auto nl = make_nonlinearity(cfg);
  const int N = nl.dim();
  ArtifactWriter aw(cfg, "classify");
  const auto betas = cfg.list("classify.beta_grid");
  require(!betas.empty(), Failure::precondition, "classify: empty beta grid");
  const auto growth = classify_growth(nl, betas, cfg.num("classify.t_max"));
  const std::vector<double> lambdas{1.25, 1.5, 2.0, 3.0, 5.0};
  std::vector<double> ts;
  for (int i = 0; i <= 100; ++i) ts.push_back(0.1 * i * i);
  const auto pw = check_power_ratio(nl, lambdas, ts);
  const bool mono = F_increasing(nl);

  std::vector<Check> checks;
  const bool declared_super = nl.is_super();
  std::string st = "inconclusive";
  if (growth.verdict == GrowthVerdict::likely_super) st = pass_fail(declared_super);
  if (growth.verdict == GrowthVerdict::likely_sub) st = pass_fail(!declared_super);
  checks.push_back({"growth class matches declaration", st, std::string(to_string(growth.verdict))});
  checks.push_back({"F strictly increasing on [0, 50]", pass_fail(mono), "kappa = " + fmt(nl.kappa())});
  checks.push_back({"f^lambda <= c f(lambda t) sampled", pass_fail(pw.finite && pw.max_log_ratio <= 50.0),
                    "max log ratio " + fmt(pw.max_log_ratio)});
  if (nl.kind() == NonlinearityKind::singular_exact) {
    const double J = nl.junction();
    const double jump = std::abs(nl.log_f(std::nextafter(J, 0.0)) - nl.log_f(std::nextafter(J, INFINITY)));
    checks.push_back({"continuity at the junction", pass_fail(jump < 1e-12), "log-jump " + fmt(jump)});
  }

  json probes = json::array();
  std::vector<std::vector<double>> rows;
  for (const auto& p : growth.probes) {
    probes.push_back({{"beta", p.beta},
                      {"log_sup_half", num(p.log_sup_half)},
                      {"log_sup_full", num(p.log_sup_full)},
                      {"argmax_half", num(p.argmax_half)},
                      {"stable", p.stable},
                      {"growing", p.growing}});
    rows.push_back({p.beta, p.log_sup_half, p.log_sup_full, p.argmax_half});
  }
  aw.csv("classify_probes.csv", {"beta", "log_sup_half", "log_sup_full", "argmax_half"}, rows, N);
  json res{{"nonlinearity", std::string(to_string(nl.kind()))},
           {"declared_class", std::string(to_string(nl.declared_class()))},
           {"verdict", std::string(to_string(growth.verdict))},
           {"t_max", growth.t_max},
           {"probes", probes},
           {"power_ratio", {{"max_log_ratio", num(pw.max_log_ratio)}, {"lambda", pw.lambda_at_max}, {"t", pw.t_at_max}}},
           {"stretched_lower_gate", stretched_lower_gate(nl, nl.params().mu)}};
  aw.report(N, checks, res, threads);
  out << "classify: " << to_string(nl.kind()) << " -> " << to_string(growth.verdict) << " (declared "
      << to_string(nl.declared_class()) << ")\n";
}

// ---------------------------------------------------------------------------

inline void run_explicit_check(const Config& cfg, unsigned threads, std::ostream& out) {
  Config c2 = cfg;
  if (cfg.str("nl.kind") == "auto") c2.set("nl.kind", "singular-exact");
  const auto nl = make_nonlinearity(c2);
  require(nl.kind() == NonlinearityKind::singular_exact, Failure::precondition,
          "explicit-check needs the singular-exact nonlinearity");
  const int N = nl.dim();
  const double mu = nl.params().mu;
  ArtifactWriter aw(cfg, "explicit-check");

  const auto pr = exact_singular_profile(N, mu, cfg.num("explicit.r_lo"), cfg.num("explicit.r_hi"),
                                         static_cast<int>(cfg.integer("explicit.per_decade")));
  const auto res = profile_residual(pr, nl);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < pr.size(); ++i) rows.push_back({pr.r[i], pr.u[i], pr.p[i], res.relative[i]});
  aw.csv("explicit_residual.csv", {"r", "u", "p", "relative_residual"}, rows, N);

  // Backward integration from the exact data down to r = 1/2.
  const double ts = cfg.num("explicit.t_start");
  const double shift = N * std::log(static_cast<double>(N));
  auto ystar = [&](double t) { return std::pow(t - shift, 1.0 / mu); };
  const double dys = std::pow(ts - shift, 1.0 / mu - 1.0) / mu;
  const double t_end = N * std::log(2.0 * N);
  const auto run = integrate_ef(nl, N, ts, t_end, ystar(ts), flux_power(dys, N), make_integrator(cfg));
  double err = 0.0;
  std::vector<std::vector<double>> trows;
  const auto& tr = run.trajectory;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    err = std::max(err, std::abs(tr.y[i] - ystar(tr.t[i])));
    trows.push_back({tr.t[i], tr.y[i], tr.dy(i), tr.q[i], ystar(tr.t[i])});
  }
  aw.csv("explicit_trajectory.csv", {"t", "y", "dy", "q", "y_exact"}, trows, N);

  std::vector<Check> checks{
      {"exact profile residual <= 1e-6", pass_fail(res.max_rel <= 1e-6), "max relative " + fmt(res.max_rel)},
      {"backward integration matches exact solution to 1e-7", pass_fail(err <= 1e-7), "max abs error " + fmt(err)}};
  json js{{"mu", mu},
          {"r_range", {pr.r_min(), pr.r_max()}},
          {"grid_points", pr.size()},
          {"max_relative_residual", res.max_rel},
          {"max_abs_residual", res.max_abs},
          {"integration", {{"t_start", ts}, {"t_end", t_end}, {"steps", run.accepted}, {"max_abs_error", err}}}};
  aw.report(N, checks, js, threads);
  out << "explicit-check: max relative residual " << fmt(res.max_rel) << ", integration error " << fmt(err) << "\n";
}

// ---------------------------------------------------------------------------

inline void run_construct(const Config& cfg, unsigned threads, std::ostream& out) {
  const auto nl = make_nonlinearity(cfg);
  const int N = nl.dim();
  const double beta = nl.params().beta, C = nl.params().C;
  ArtifactWriter aw(cfg, "construct");
  const auto bp = make_barriers(beta, C, N);
  const double R = bp.R_star();

  std::vector<Check> checks;
  const auto sup = verify_supersolution(bp, nl, log_grid(1e-6, 10.0, 1000));
  checks.push_back({"closed-form N-Laplacian of v matches finite differences", pass_fail(sup.max_rel_fd <= 1e-6),
                    "max relative " + fmt(sup.max_rel_fd)});
  checks.push_back({"-Delta_N v >= f(v)", pass_fail(sup.violations == 0),
                    std::to_string(sup.violations) + " violations in " + std::to_string(sup.checked) + " points"});
  bool order = true, nonneg = true;
  for (double r : log_grid(1e-8 * R, R, 1000)) {
    order = order && bp.w(r) <= bp.v(r) + 1e-12;
    nonneg = nonneg && bp.w(r) >= -1e-12;
  }
  const double gap = std::abs(bp.w(R) - bp.v(R));
  checks.push_back({"w <= v on (0, R*]", pass_fail(order), ""});
  checks.push_back({"w >= 0 on (0, R*]", pass_fail(nonneg), ""});
  checks.push_back({"w(R*) = v(R*)", pass_fail(gap <= 1e-10), "gap " + fmt(gap)});

  AnnulusConfig ac;
  ac.tol_abs = cfg.num("construct.tol");
  ac.points_per_log = cfg.num("construct.points_per_log");
  ac.max_iter = static_cast<int>(cfg.integer("construct.max_iter"));
  const double eps = cfg.num("construct.eps");
  const int K = static_cast<int>(cfg.integer("construct.family"));
  const auto fam = eps_family(nl, beta, C, eps, K, ac, threads);

  json runs = json::array();
  std::vector<std::vector<double>> hist, flux;
  bool all_conv = true, all_sand = true, all_mono = true;
  for (std::size_t k = 0; k < fam.runs.size(); ++k) {
    const auto& mr = fam.runs[k];
    all_conv = all_conv && mr.converged;
    all_sand = all_sand && mr.sandwich_all;
    all_mono = all_mono && mr.monotone_all;
    for (const auto& h : mr.history) hist.push_back({mr.eps, double(h.n), h.sup_diff});
    const auto df = dirac_flux(mr.profile, mr.eps, R / 2);
    for (const auto& row : df.table) flux.push_back({mr.eps, row.r, row.phi});
    runs.push_back({{"eps", mr.eps},
                    {"iterations", mr.history.size()},
                    {"converged", mr.converged},
                    {"sandwich", mr.sandwich_all},
                    {"monotone", mr.monotone_all},
                    {"final_sup_diff", mr.history.empty() ? 0.0 : mr.history.back().sup_diff},
                    {"alpha_flux", df.alpha},
                    {"alpha_printed_normalization",
                     {{"omega=ball-volume", df.alpha_printed_ball}, {"omega=sphere-surface", df.alpha_printed_sphere}}},
                    {"phi_at_R_star_half", df.table.front().phi},
                    {"flux_positive", df.positive}});
  }
  aw.profile_csv("construct_profile.csv", fam.runs.front().profile);
  if (fam.runs.size() > 1) aw.profile_csv("construct_profile_smallest_eps.csv", fam.runs.back().profile);
  aw.csv("construct_history.csv", {"eps", "n", "sup_diff"}, hist, N);
  aw.csv("construct_flux.csv", {"eps", "r", "phi"}, flux, N);

  const auto& last = fam.runs.back();
  const auto df = dirac_flux(last.profile, last.eps, R / 2);
  checks.push_back({"iterations converge", pass_fail(all_conv), ""});
  checks.push_back({"sandwich w <= u_n <= v", pass_fail(all_sand), ""});
  checks.push_back({"u_n <= u_{n+1}", pass_fail(all_mono), ""});
  checks.push_back({"flux positive on [eps, R*/2]", pass_fail(df.positive), ""});
  checks.push_back({"alpha > 0.1 Phi(R*/2)", pass_fail(df.alpha > 0.1 * df.table.front().phi),
                    "alpha " + fmt(df.alpha) + ", Phi(R*/2) " + fmt(df.table.front().phi)});

  json js{{"beta", beta},
          {"C", C},
          {"M", bp.M()},
          {"mu", bp.mu()},
          {"R_star", R},
          {"supersolution", {{"max_rel_fd", sup.max_rel_fd}, {"checked", sup.checked}, {"violations", sup.violations},
                             {"min_margin", num(sup.min_margin)}}},
          {"runs", runs},
          {"cauchy", num_array(fam.cauchy)},
          {"alpha",
           {{"eps", last.eps},
            {"flux_sigma_convention", df.alpha},
            {"printed_normalization", {{"omega=ball-volume", df.alpha_printed_ball},
                                       {"omega=sphere-surface", df.alpha_printed_sphere}}}}},
          {"barrier_w_dirac_weight",
           {{"flux_sigma_convention", bp.dirac_weight_w()},
            {"printed_constant", {{"omega=ball-volume", bp.dirac_weight_printed(OmegaConvention::ball_volume)},
                                  {"omega=sphere-surface", bp.dirac_weight_printed(OmegaConvention::sphere_surface)}}},
            {"note", "direct flux of w differs from the printed constant; both are reported"}}}};
  aw.report(N, checks, js, threads);
  out << "construct: R* = " << fmt(R) << ", alpha = " << fmt(df.alpha) << " (eps = " << fmt(last.eps) << ")\n";
}

// ---------------------------------------------------------------------------

inline json record_json(const ShootingRecord& r) {
  return json{{"gamma", r.gamma},
              {"T_gamma", r.T ? json(*r.T) : json(nullptr)},
              {"t_max", r.t_max},
              {"tail_correction", r.tail_correction},
              {"tail_adjusted", r.tail_adjusted},
              {"s0", r.s0 ? json(*r.s0) : json(nullptr)},
              {"t0", r.t0 ? json(*r.t0) : json(nullptr)},
              {"energy_min", num(r.energy_min)},
              {"bound_max", num(r.bound_max)},
              {"steps", r.steps},
              {"checks",
               {{"positive_slope", r.checks.positive_slope},
                {"concave", r.checks.concave},
                {"energy_nonnegative", r.checks.energy_nonnegative},
                {"energy_monotone", r.checks.energy_monotone},
                {"bound", r.checks.bound_ok}}}};
}

inline void shooting_checks(const ShootingRecord& r, double tail, double event_tol, std::vector<Check>& checks) {
  const std::string g = " (gamma = " + fmt(r.gamma) + ")";
  checks.push_back({"first zero found" + g, pass_fail(r.T.has_value()), r.T ? fmt(*r.T) : "none"});
  checks.push_back({"y' > 0 and concave" + g, pass_fail(r.checks.positive_slope && r.checks.concave), ""});
  checks.push_back({"energy >= 0 and non-increasing past t0" + g,
                    pass_fail(r.checks.energy_nonnegative && r.checks.energy_monotone), "min " + fmt(r.energy_min)});
  checks.push_back({"sup y' g'(y) <= N/(N-1)" + g, pass_fail(r.checks.bound_ok), "max " + fmt(r.bound_max)});
  checks.push_back({"tail consistency" + g, pass_fail(tail < 10 * event_tol), "|dT| " + fmt(tail)});
  const auto rm = removability(r);
  checks.push_back({"y' -> 0 (removability probe)" + g, pass_fail(rm.pass), "ratio " + fmt(rm.ratio)});
}

inline void run_shoot(const Config& cfg, unsigned threads, std::ostream& out) {
  const auto nl = make_nonlinearity(cfg);
  const int N = nl.dim();
  const auto sc = make_shooting(cfg);
  ArtifactWriter aw(cfg, "shoot");
  const double gamma = cfg.num("shoot.gamma");
  const auto rec = shoot(nl, N, gamma, sc);
  const double tail = tail_shift(nl, N, gamma, cfg.num("shoot.tail_probe"), sc);
  std::vector<Check> checks;
  shooting_checks(rec, tail, sc.integrator.event_tol, checks);
  const auto& tr = rec.trajectory;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < tr.size(); ++i) rows.push_back({tr.t[i], tr.y[i], tr.dy(i), tr.q[i]});
  aw.csv("shoot_trajectory.csv", {"t", "y", "dy", "q"}, rows, N);
  std::vector<std::vector<double>> erows;
  for (std::size_t i = 0; i < tr.size(); ++i) erows.push_back({tr.t[i], rec.energy[i]});
  aw.csv("shoot_energy.csv", {"t", "E"}, erows, N);
  const auto rm = removability(rec);
  json js = record_json(rec);
  js["tail_shift"] = tail;
  js["removability"] = {{"slope_t0", rm.slope_t0}, {"slope_end", rm.slope_end}, {"ratio", rm.ratio},
                        {"slope_decreasing", rm.slope_decreasing}};
  aw.report(N, checks, js, threads);
  out << "shoot: gamma = " << fmt(gamma) << ", T = " << (rec.T ? fmt(*rec.T) : "none") << "\n";
}

inline void run_sweep(const Config& cfg, unsigned threads, std::ostream& out) {
  const auto nl = make_nonlinearity(cfg);
  const int N = nl.dim();
  const auto sc = make_shooting(cfg);
  ArtifactWriter aw(cfg, "sweep");
  const auto gammas = cfg.list("sweep.gammas");
  const auto locus = zero_locus(nl, N, gammas, sc, threads);
  std::vector<double> tails(gammas.size(), NAN);
  const double probe = cfg.num("shoot.tail_probe");
  parallel_for(gammas.size(), threads, [&](std::size_t i) {
    if (!locus.entries[i].record || !locus.entries[i].record->T) return;
    try {
      tails[i] = tail_shift(nl, N, gammas[i], probe, sc);
    } catch (const NumericalError&) {
    }
  });
  std::vector<Check> checks;
  json entries = json::array();
  std::vector<std::vector<double>> rows;
  const bool dump = cfg.boolean("shoot.dump_trajectories");
  for (std::size_t i = 0; i < locus.entries.size(); ++i) {
    const auto& e = locus.entries[i];
    if (!e.record) {
      entries.push_back({{"gamma", e.gamma}, {"error", e.error}});
      checks.push_back({"shoot (gamma = " + fmt(e.gamma) + ")", "fail", e.error});
      continue;
    }
    const auto& r = *e.record;
    shooting_checks(r, tails[i], sc.integrator.event_tol, checks);
    json j = record_json(r);
    j["tail_shift"] = num(tails[i]);
    entries.push_back(j);
    rows.push_back({r.gamma, r.T.value_or(NAN), r.t0.value_or(NAN), r.bound_max, r.energy_min});
    if (dump) aw.trajectory_csv("sweep_trajectory_" + std::to_string(i) + ".csv", r.trajectory);
  }
  aw.csv("sweep.csv", {"gamma", "T_gamma", "t0", "bound_max", "energy_min"}, rows, N);
  json js{{"entries", entries},
          {"empirical_sup_T", locus.empirical_sup ? json(*locus.empirical_sup) : json(nullptr)},
          {"modulus", locus.modulus}};
  aw.report(N, checks, js, threads);
  out << "sweep: " << gammas.size() << " values, sup T = "
      << (locus.empirical_sup ? fmt(*locus.empirical_sup) : "none") << "\n";
}

inline void run_limit(const Config& cfg, unsigned threads, std::ostream& out) {
  const auto nl = make_nonlinearity(cfg);
  const int N = nl.dim();
  const auto sc = make_shooting(cfg);
  ArtifactWriter aw(cfg, "limit");
  const auto gammas = cfg.list("limit.gammas");
  const auto sl = singular_limit(nl, N, gammas, sc, threads);
  std::vector<Check> checks;
  const bool have = !sl.sup_diff.empty();
  checks.push_back({"successive sup-differences strictly decreasing", pass_fail(have && sl.differences_decreasing),
                    sl.note});
  const bool scale = have && sl.sup_diff.back() < 10 * std::sqrt(sl.sup_diff.front());
  checks.push_back({"last difference < 10 sqrt(first)", pass_fail(scale), ""});
  checks.push_back({"Cauchy test below tol_cauchy", pass_fail(sl.converged), ""});
  checks.push_back({"limit at the grid floor < 0.05", pass_fail(have && sl.floor_value < 0.05),
                    "y*(floor) = " + fmt(sl.floor_value)});
  std::vector<std::vector<double>> grid, diff;
  for (std::size_t k = 0; k < sl.grid.size(); ++k) grid.push_back({sl.grid[k], sl.y_star[k]});
  for (std::size_t n = 0; n < sl.sup_diff.size(); ++n)
    diff.push_back({double(n), sl.gammas[n], sl.gammas[n + 1], sl.sup_diff[n]});
  aw.csv("limit_grid.csv", {"t", "y_star"}, grid, N);
  aw.csv("limit_diff.csv", {"n", "gamma_a", "gamma_b", "sup_diff"}, diff, N);
  json js{{"gammas", sl.gammas},
          {"T", num_array(sl.T)},
          {"T_star_estimate", sl.T_star},
          {"max_T", sl.max_T},
          {"grid_floor", sl.grid.empty() ? json(nullptr) : json(sl.grid.front())},
          {"floor_value", sl.floor_value},
          {"sup_diff", num_array(sl.sup_diff)},
          {"converged", sl.converged},
          {"note", sl.note}};
  aw.report(N, checks, js, threads);
  out << "limit: converged = " << (sl.converged ? "yes" : "no") << ", T* ~ " << fmt(sl.T_star) << "\n";
}

// ---------------------------------------------------------------------------

inline void run_analyze(const Config& cfg, unsigned threads, std::ostream& out) {
  const auto nl = make_nonlinearity(cfg);
  const int N = nl.dim();
  const double mu = nl.params().mu;
  ArtifactWriter aw(cfg, "analyze");
  const std::string path = cfg.str("analyze.profile");
  const RadialProfile pr = path.empty()
                               ? exact_singular_profile(N, mu, cfg.num("analyze.r_lo"), cfg.num("analyze.r_hi"))
                               : read_profile_csv(path, N);
  std::vector<Check> checks;
  json js;
  js["profile"] = {{"source", path.empty() ? "exact singular solution" : path},
                   {"r_min", pr.r_min()},
                   {"r_max", pr.r_max()},
                   {"points", pr.size()}};

  const auto ratios = asymptotic_ratio(pr, nl, cfg.list("analyze.eps_ratio"), cfg.num("analyze.tol"));
  json rj = json::array();
  std::vector<std::vector<double>> rrows;
  for (const auto& s : ratios) {
    for (std::size_t i = 0; i < s.r.size(); ++i) rrows.push_back({s.eps, s.r[i], s.ratio[i]});
    rj.push_back({{"eps", s.eps},
                  {"R_eps", s.R_eps ? json(*s.R_eps) : json(nullptr)},
                  {"last_decade_max", num(s.last_decade_max)},
                  {"last_decade_min", num(s.last_decade_min)}});
    checks.push_back({"u <= F^{-1}(eps r^{-N}) near 0 (eps = " + fmt(s.eps) + ")",
                      pass_fail(s.R_eps && *s.R_eps >= 10 * pr.r_min()),
                      "R_eps = " + (s.R_eps ? fmt(*s.R_eps) : std::string("none"))});
    checks.push_back({"last-decade ratio max >= 0.9 (eps = " + fmt(s.eps) + ")",
                      pass_fail(s.last_decade_max >= 0.9), fmt(s.last_decade_max)});
  }
  aw.csv("analyze_ratio.csv", {"eps", "r", "ratio"}, rrows, N);
  js["ratio"] = rj;

  const auto dc = decay_check(pr, nl);
  std::vector<std::vector<double>> drows;
  for (std::size_t i = 0; i < dc.r.size(); ++i) drows.push_back({dc.r[i], dc.value[i]});
  aw.csv("analyze_decay.csv", {"r", "rN_f_u"}, drows, N);
  js["decay"] = {{"verdict", to_string(dc.verdict)}, {"orders", dc.orders}, {"eventually_decreasing", dc.eventually_decreasing}};
  checks.push_back({"r^N f(u) decay", dc.verdict == Verdict::consistent ? "pass"
                                      : dc.verdict == Verdict::inconsistent ? "fail" : "inconclusive",
                    fmt(dc.orders) + " orders"});

  // Radii below the profile's reach are dropped here rather than aborting the
  // whole scenario; the library call itself still refuses them.
  std::vector<double> deltas, dropped;
  for (double d : cfg.list("analyze.delta")) (d >= pr.r_min() * (1 - 1e-12) ? deltas : dropped).push_back(d);
  if (!dropped.empty()) js["delta_dropped_below_r_min"] = dropped;
  const double thr = cfg.num("analyze.threshold");
  std::vector<std::vector<double>> irows;
  auto integ_json = [&](const PartialIntegrals& pi, double kind) {
    for (std::size_t i = 0; i < pi.delta.size(); ++i) irows.push_back({kind, pi.delta[i], pi.value[i]});
    return json{{"delta", pi.delta}, {"value", num_array(pi.value)}, {"increment_ratio", num_array(pi.ratio)},
                {"threshold", pi.threshold}, {"verdict", to_string(pi.verdict)}};
  };
  if (pr.r_min() > 1e-3 * pr.r_max() || deltas.empty()) {
    checks.push_back({"integral bound verdict", "inconclusive", "profile does not reach small enough radii"});
  } else if (pr.r_max() < N) {
    const auto ib = integral_bound_partial(pr, nl, mu, deltas, thr);
    const auto wm = weighted_mass(pr, nl, mu, deltas, thr);
    js["integral_bound"] = integ_json(ib, 0);
    js["integral_bound"]["inner_closure"] = ib.inner_closure;
    js["weighted_mass"] = integ_json(wm, 1);
    checks.push_back({"integral bound verdict", ib.verdict == Verdict::inconclusive ? "inconclusive" : "pass",
                      to_string(ib.verdict)});
    checks.push_back({"weighted mass agrees with integral bound", pass_fail(ib.verdict == wm.verdict),
                      std::string(to_string(ib.verdict)) + " / " + to_string(wm.verdict)});
    if (N == 2) js["fubini_2d"] = fubini_check_2d(pr, nl, mu, deltas.back());
  }
  aw.csv("analyze_integrals.csv", {"kind", "delta", "value"}, irows, N);

  std::vector<std::vector<double>> crows;
  if (nl.kind() == NonlinearityKind::stretched_exponential || nl.kind() == NonlinearityKind::singular_exact) {
    const double theta_min = (1 - 1 / mu) * (N - 1) + 1;
    const double theta = cfg.str("analyze.theta") == "auto" ? theta_min : cfg.num("analyze.theta");
    const auto cr = crossing_analysis(pr, nl, mu, theta);
    for (double r : cr.crossing_radii) crows.push_back({r});
    js["crossings"] = {{"theta", theta}, {"count", cr.crossing_radii.size()}, {"alternative", to_string(cr.alternative)},
                       {"c_star_estimate", num(cr.c_star_estimate)}, {"range_floor", cr.range_floor},
                       {"range_count", cr.range_count}};
  }
  aw.csv("analyze_crossings.csv", {"r"}, crows, N);

  if (pr.r_max() / 2 / pr.r_min() >= 4) {
    const auto df = dirac_flux(pr, pr.r_min(), pr.r_max() / 2);
    json t = json::array();
    for (const auto& row : df.table) t.push_back({{"r", row.r}, {"phi", row.phi}});
    js["flux"] = {{"table", t}, {"alpha", df.alpha},
                  {"printed_normalization", {{"omega=ball-volume", df.alpha_printed_ball},
                                             {"omega=sphere-surface", df.alpha_printed_sphere}}}};
  }
  try {
    const auto bm = brezis_merle_check(pr, nl, cfg.num("analyze.delta_frac"));
    json sides = json::array();
    for (const auto& s : bm.sides)
      sides.push_back({{"omega", to_string(s.convention)}, {"lhs", num(s.lhs)}, {"rhs", s.rhs}, {"pass", s.pass}});
    js["brezis_merle"] = {{"g_norm", bm.g_norm}, {"volume", bm.volume}, {"sides", sides}, {"pass", bm.pass}};
  } catch (const PreconditionError& e) {
    js["brezis_merle"] = {{"error", e.what()}};
  }
  const auto tr = profile_to_trajectory(pr);
  if (tr.t.front() >= 1.0) {
    const auto st = scale_to_rho(tr, nl, mu);
    js["scaled"] = {{"H0_partial", h0_estimate(st)}, {"truncation_xi", st.truncation_xi},
                    {"rho_last", st.rho.back()}};
  }
  aw.report(N, checks, js, threads);
  out << "analyze: decay " << to_string(dc.verdict) << "\n";
}

// ---------------------------------------------------------------------------

inline void run_report(const Config& cfg, unsigned threads, std::ostream& out) {
  namespace fs = std::filesystem;
  const std::string dir = cfg.str("report.dir") == "auto" ? cfg.str("out") : cfg.str("report.dir");
  require(fs::is_directory(dir), Failure::precondition, "report: '" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    if (name.size() > 10 && name.substr(name.size() - 10) == ".meta.json") continue;
    if (name == "report.json") continue;
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  json merged = json::object();
  std::string summary;
  std::optional<int> N;
  std::string N_file;
  int counts[3] = {0, 0, 0};
  for (const auto& f : files) {
    std::ifstream in(f);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const std::exception& e) {
      throw PreconditionError(Failure::schema, "report: cannot parse '" + f.string() + "'");
    }
    if (!doc.contains("schema_version") || doc["schema_version"] != kSchemaVersion)
      throw PreconditionError(Failure::schema, "report: schema version mismatch in '" + f.string() + "'");
    const int n = doc.at("N").get<int>();
    if (N && *N != n)
      throw PreconditionError(Failure::precondition, "report: conflicting N between '" + N_file + "' (N = " +
                                                         std::to_string(*N) + ") and '" + f.string() +
                                                         "' (N = " + std::to_string(n) + ")");
    if (!N) {
      N = n;
      N_file = f.string();
    }
    const std::string sc = doc.at("scenario").get<std::string>();
    summary += "[" + sc + "]\n";
    for (const auto& c : doc.at("checks")) {
      const std::string st = c.at("status").get<std::string>();
      counts[st == "pass" ? 0 : st == "fail" ? 1 : 2]++;
      summary += "  " + st + "  " + c.at("name").get<std::string>();
      const std::string d = c.at("detail").get<std::string>();
      if (!d.empty()) summary += "  (" + d + ")";
      summary += "\n";
    }
    merged[sc] = doc;
  }
  json doc{{"schema_version", kSchemaVersion},
           {"tool_version", kVersion},
           {"N", N ? json(*N) : json(nullptr)},
           {"scenarios", merged},
           {"totals", {{"pass", counts[0]}, {"fail", counts[1]}, {"inconclusive", counts[2]}}}};
  std::ofstream(fs::path(dir) / "report.json") << doc.dump(2) << "\n";
  summary += "totals: " + std::to_string(counts[0]) + " pass, " + std::to_string(counts[1]) + " fail, " +
             std::to_string(counts[2]) + " inconclusive\n";
  std::ofstream(fs::path(dir) / "report_summary.txt") << summary;
  out << summary;
  (void)threads;
}

}  // namespace nlap::app
