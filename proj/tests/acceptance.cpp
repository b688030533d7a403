// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "app/run.hpp"
#include "nlap/nlap.hpp"
#include "oracles.hpp"

using namespace nlap;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string g(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> x;
  for (int i = 0; i < n; ++i) x.push_back(a * std::pow(b / a, i / double(n - 1)));
  return x;
}

struct Outcome {
  bool pass;
  std::string detail;
};

// ---------------------------------------------------------------------------

Outcome c1() {
  const auto t0 = Clock::now();
  double worst = 0;
  for (int N : {2, 3})
    for (double mu : {1.5, 2.0, 3.0}) {
      const auto pr = exact_singular_profile(N, mu, 1e-5, 0.4, 400);
      worst = std::max(worst, profile_residual(pr, Nonlinearity::singular_exact(N, mu)).max_rel);
    }
  const double s = seconds_since(t0);
  return {worst <= 1e-6 && s < 5, "max relative residual " + g(worst) + " in " + g(s) + " s"};
}

Outcome c2() {
  double worst = 0;
  std::size_t violations = 0;
  const auto grid = log_grid(1e-6, 10, 1000);
  for (double beta : {0.5, 1.0, 2.0})
    for (double C : {0.5, 1.0, 2.0})
      for (int N : {2, 3}) {
        const auto bp = make_barriers(beta, C, N);
        const auto rep = verify_supersolution(bp, Nonlinearity::pure_exponential(N, beta, C), grid);
        worst = std::max(worst, rep.max_rel_fd);
        violations += rep.violations;
      }
  return {worst <= 1e-6 && violations == 0,
          "closed form vs FD max relative " + g(worst) + ", " + std::to_string(violations) + " violations"};
}

Outcome c3() {
  bool order = true, nonneg = true;
  double gap = 0;
  for (double beta : {0.5, 1.0, 2.0})
    for (double C : {0.5, 1.0, 2.0})
      for (int N : {2, 3}) {
        const auto bp = make_barriers(beta, C, N);
        const double R = bp.R_star();
        for (double r : log_grid(1e-8 * R, R, 1000)) {
          order = order && bp.w(r) <= bp.v(r) + 1e-12;
          nonneg = nonneg && bp.w(r) >= -1e-12;
        }
        gap = std::max(gap, std::abs(bp.w(R) - bp.v(R)));
      }
  return {order && nonneg && gap <= 1e-10, std::string("w <= v ") + (order ? "yes" : "no") + ", w >= 0 " +
                                               (nonneg ? "yes" : "no") + ", max gap at R* " + g(gap)};
}

Outcome c4() {
  const auto t0 = Clock::now();
  const auto res = monotone_iterate(Nonlinearity::pure_exponential(2, 1, 1), 1, 1, 0.05);
  const double s = seconds_since(t0);
  const double last = res.history.empty() ? 0.0 : res.history.back().sup_diff;
  const bool ok = res.converged && res.sandwich_all && res.monotone_all && res.history.size() <= 50 && last < 1e-8 &&
                  s < 60;
  return {ok, std::to_string(res.history.size()) + " iterations, final sup-diff " + g(last) + ", sandwich " +
                  (res.sandwich_all ? "yes" : "no") + ", monotone " + (res.monotone_all ? "yes" : "no") + ", " +
                  g(s) + " s"};
}

Outcome c5() {
  const auto nl = Nonlinearity::pure_exponential(2, 1, 1);
  const auto fam = eps_family(nl, 1, 1, 0.05, 4);
  const double R = fam.runs.front().barriers.R_star();
  const auto& last = fam.runs.back();
  const auto df = dirac_flux(last.profile, last.eps, R / 2);
  const double phi_half = df.table.front().phi;

  const auto lp = sample_profile(
      2, [](double r) { return std::log(1 / r); }, [](double r) { return -1 / r; }, 1e-6, 0.5, 50);
  const auto lf = dirac_flux(lp, 1e-6, 0.25);
  double spread = 0;
  for (const auto& row : lf.table) spread = std::max(spread, std::abs(row.phi / (2 * std::numbers::pi) - 1));

  const bool ok = df.positive && df.alpha > 0.1 * phi_half && spread <= 1e-10;
  return {ok, "eps " + g(last.eps) + ", alpha " + g(df.alpha) + ", Phi(R*/2) " + g(phi_half) + ", flux positive " +
                  (df.positive ? "yes" : "no") + ", pure-log relative spread " + g(spread)};
}

const Nonlinearity& critical() {
  static const Nonlinearity nl = Nonlinearity::model_critical(2, 0, 0, 1.5);
  return nl;
}

Outcome c6() {
  bool ok = true;
  double worst = 0;
  for (double gamma : {3.0, 5.0, 8.0, 12.0}) {
    const auto rm = removability(shoot(critical(), 2, gamma));
    ok = ok && rm.slope_decreasing && rm.ratio < 1e-3;
    worst = std::max(worst, rm.ratio);
  }
  return {ok, "max y'(end) / y'(t0) " + g(worst)};
}

Outcome c7() {
  const ShootingConfig sc;
  bool ok = true;
  double worst_time = 0, worst_tail = 0, worst_bound = 0, min_energy = INFINITY;
  for (double gamma : {3.0, 5.0, 8.0, 12.0}) {
    const auto t0 = Clock::now();
    const auto rec = shoot(critical(), 2, gamma, sc);
    const double tail = tail_shift(critical(), 2, gamma, 5.0, sc);
    worst_time = std::max(worst_time, seconds_since(t0));
    ok = ok && rec.T && rec.checks.all() && rec.bound_max <= 2.0 + 1e-6 && tail < 10 * sc.integrator.event_tol;
    worst_tail = std::max(worst_tail, tail);
    worst_bound = std::max(worst_bound, rec.bound_max);
    min_energy = std::min(min_energy, rec.energy_min);
  }
  ok = ok && worst_time < 30;
  return {ok, "min energy " + g(min_energy) + ", max sup y' g'(y) " + g(worst_bound) + ", max tail shift " +
                  g(worst_tail) + ", slowest gamma " + g(worst_time) + " s"};
}

Outcome c8() {
  const auto sl = singular_limit(critical(), 2, {4, 6, 8, 10, 12});
  bool strictly = true;
  for (std::size_t i = 1; i < sl.sup_diff.size(); ++i) strictly = strictly && sl.sup_diff[i] < sl.sup_diff[i - 1];
  const double first = sl.sup_diff.front(), last = sl.sup_diff.back();
  const bool cauchy = last < 10 * std::sqrt(first);
  const bool floor = sl.floor_value < 0.05;
  std::string d = "sup-diffs";
  for (double v : sl.sup_diff) d += " " + g(v);
  d += std::string(", decreasing ") + (strictly ? "yes" : "no") + ", last < 10 sqrt(first) " + (cauchy ? "yes" : "no") +
       ", value at grid floor " + g(sl.floor_value);
  return {strictly && cauchy && floor, d};
}

Outcome c9() {
  const auto nl = Nonlinearity::singular_exact(2, 2);
  const auto pr = exact_singular_profile(2, 2, 1e-12, 0.4);
  const auto rs = asymptotic_ratio(pr, nl, {1.0}).front();
  double ratio_max = 0;
  for (std::size_t i = 0; i < rs.r.size(); ++i)
    if (rs.r[i] <= 1e-4 && std::isfinite(rs.ratio[i])) ratio_max = std::max(ratio_max, rs.ratio[i]);
  const ProfileInterpolant in(pr);
  auto dec = [&](double r) { return std::exp(2 * std::log(r) + nl.log_f(in.u(r))); };
  const double orders = std::log10(dec(1e-2) / dec(1e-10));
  const bool ok = ratio_max <= 1 + 1e-3 && rs.last_decade_max >= 0.9 && orders >= 2;
  return {ok, "ratio max on r <= 1e-4 " + g(ratio_max) + ", last-decade max " + g(rs.last_decade_max) +
                  ", decay of r^N f(u) from 1e-2 to 1e-10 " + g(orders) + " orders"};
}

Outcome c10() {
  const auto nl = Nonlinearity::singular_exact(2, 2);
  std::vector<double> deltas;
  for (int k = 2; k <= 10; ++k) deltas.push_back(std::pow(10.0, -k));
  const auto exact = exact_singular_profile(2, 2, 1e-12, 0.4);
  const auto flat = sample_profile(
      2, [](double) { return 1.0; }, [](double) { return 0.0; }, 1e-12, 0.4, 100);
  const auto ib = integral_bound_partial(exact, nl, 2, deltas);
  bool increasing = true;
  for (std::size_t k = 1; k < ib.value.size(); ++k) increasing = increasing && ib.value[k] > ib.value[k - 1];
  double min_ratio = INFINITY;
  for (double q : ib.ratio) min_ratio = std::min(min_ratio, q);
  const auto ic = integral_bound_partial(flat, nl, 2, deltas);
  const auto wd = weighted_mass(exact, nl, 2, deltas);
  const auto wc = weighted_mass(flat, nl, 2, deltas);
  const bool ok = increasing && min_ratio >= 0.25 && ib.verdict == Verdict::divergent &&
                  ic.verdict == Verdict::convergent && wd.verdict == ib.verdict && wc.verdict == ic.verdict;
  return {ok, std::string("exact: ") + to_string(ib.verdict) + " (min increment ratio " + g(min_ratio) +
                  "), weighted " + to_string(wd.verdict) + "; u = 1: " + to_string(ic.verdict) + ", weighted " +
                  to_string(wc.verdict)};
}

Outcome c11() {
  std::vector<double> r, u;
  for (int i = 0; i < 1001; ++i) {
    r.push_back(1 - i * 1e-3 * 0.999);
    u.push_back(r.back());
  }
  bool counts = count_crossings(r, u, [](double) { return 2.0; }) == 0 &&
                count_crossings(r, u, [](double) { return 0.5; }) == 1;
  for (int k : {2, 5, 17}) {
    std::vector<double> v;
    for (double s : r) v.push_back(std::sin(k * std::numbers::pi * s - 1e-3));
    counts = counts && count_crossings(r, v, [](double) { return 0.0; }) == std::size_t(k - 1);
  }
  const auto nl = Nonlinearity::singular_exact(2, 2);
  const auto bm = brezis_merle_check(exact_singular_profile(2, 2, 1e-12, 0.4), nl, 0.5);
  std::string d = std::string("synthetic counts ") + (counts ? "match" : "mismatch") + ";";
  for (const auto& s : bm.sides)
    d += std::string(" ") + to_string(s.convention) + " lhs " + g(s.lhs) + " <= rhs " + g(s.rhs) + " " +
         (s.pass ? "pass" : "fail") + ";";
  return {counts && bm.pass, d};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome c12(const fs::path& base) {
  const std::vector<std::vector<std::string>> scenarios{
      {"classify"},
      {"explicit-check"},
      {"construct", "--set", "construct.family=2"},
      {"sweep", "--dump-trajectories"},
      {"limit"},
      {"analyze"}};
  for (const char* th : {"1", "8"}) {
    const auto dir = base / ("threads_" + std::string(th));
    fs::remove_all(dir);
    for (auto args : scenarios) {
      args.insert(args.end(), {"--threads", th, "--out", dir.string()});
      std::ostringstream o, e;
      const int code = app::run(args, o, e);
      if (code != 0) return {false, args.front() + " exited " + std::to_string(code) + ": " + e.str()};
    }
  }
  std::size_t compared = 0;
  for (const auto& ent : fs::directory_iterator(base / "threads_1")) {
    const auto name = ent.path().filename().string();
    if (name.ends_with(".meta.json")) continue;
    const auto other = base / "threads_8" / name;
    if (!fs::exists(other) || slurp(ent.path()) != slurp(other)) return {false, name + " differs"};
    ++compared;
  }
  return {compared > 0, std::to_string(compared) + " artifacts byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path base = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "nlap_acceptance";
  const std::vector<std::function<Outcome()>> criteria{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11,
                                                       [&] { return c12(base); }};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", k + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
