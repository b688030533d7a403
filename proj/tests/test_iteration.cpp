#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "nlap/analysis.hpp"
#include "nlap/iteration.hpp"
#include "oracles.hpp"

using namespace nlap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("barrier zero and values, beta = C = 1, N = 2") {
  const auto bp = make_barriers(1, 1, 2);
  // r (1 + r)^2 = 1  <=>  r^3 + 2 r^2 + r - 1 = 0
  CHECK_THAT(bp.R_star(), WithinRel(oracle::cardano_single_real(2, 1, -1), 1e-13));
  CHECK_THAT(bp.R_star(), WithinAbs(0.46557, 1e-5));
  CHECK_THAT(bp.v(1), WithinAbs(-2 * std::log(2.0), 1e-14));
  CHECK_THAT(bp.v(bp.R_star()), WithinAbs(0.0, 1e-12));
  CHECK_THAT(bp.w(bp.R_star()), WithinAbs(0.0, 1e-12));
}

TEST_CASE("barrier zero on the parameter grid") {
  for (double beta : {0.5, 1.0, 2.0})
    for (double C : {0.5, 1.0, 2.0})
      for (int N : {2, 3}) {
        const auto bp = make_barriers(beta, C, N);
        const double M = C * std::pow(beta, N - 1);
        CHECK_THAT(bp.R_star(), WithinRel(oracle::barrier_zero_newton(M, double(N) / (N - 1)), 1e-12));
        for (double R : {0.1, bp.R_star(), 3.0}) CHECK(bp.w(R, R) == bp.v(R));
      }
}

TEST_CASE("closed-form N-Laplacian of v against nested differences") {
  for (double beta : {0.5, 2.0})
    for (double C : {0.5, 2.0})
      for (int N : {2, 3}) {
        const auto bp = make_barriers(beta, C, N);
        const double mu = double(N) / (N - 1), M = C * std::pow(beta, N - 1);
        auto v = [&](long double r) {
          return (1.0L - N) / beta * (std::log(r) + mu * std::log1p(static_cast<long double>(M) * r));
        };
        for (double r : {1e-5, 1e-3, 0.1, 0.7, 4.0}) {
          const double ref = oracle::nested_fd_laplacian(v, r, N);
          // The oracle differences a nearly constant flux at small r; ~1e-8 is its
          // rounding floor.
          CHECK_THAT(bp.laplacian_v(r), WithinRel(ref, 1e-7));
          CHECK_THAT(fd_n_laplacian([&](double s) { return bp.dv(s); }, r, N), WithinRel(ref, 1e-6));
        }
        // M r = 1, N = 2: mu M (N-1)^N / beta^{N-1} / (4 r).
        if (N == 2) {
          const double r = 1 / M;
          CHECK_THAT(bp.laplacian_v(r), WithinRel(2 * M / beta / (4 * r), 1e-14));
        }
      }
}

TEST_CASE("supersolution inequality") {
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back(1e-6 * std::pow(1e7, i / 999.0));
  const auto bp = make_barriers(1, 1, 2);
  const auto rep = verify_supersolution(bp, Nonlinearity::pure_exponential(2, 1, 1), grid);
  CHECK(rep.violations == 0);
  CHECK(rep.checked > 0);
  CHECK(rep.max_rel_fd <= 1e-6);
  const auto half = verify_supersolution(bp, Nonlinearity::pure_exponential(2, 1, 0.5), grid);
  CHECK(half.violations == 0);
  CHECK(half.min_margin >= rep.min_margin);
}

TEST_CASE("radial BVP: constants and the 2-harmonic log") {
  AnnulusConfig cfg;
  const double eps = 0.05, R = 0.5;
  const auto x = annulus_grid(eps, R, cfg);
  const std::vector<double> g(x.size(), 0.0);
  const auto c = solve_radial_bvp(2, x, g, 0.0, 1.5, 1.5);
  for (double u : c.u) CHECK_THAT(u, WithinAbs(1.5, 1e-12));
  const double a = 2, b = -1;
  const auto lg = solve_radial_bvp(2, x, g, 0.0, a, b);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK_THAT(lg.u[i], WithinAbs(a + (b - a) * (x[i] - x.front()) / (x.back() - x.front()), 1e-11));
  // Constant flux forces u linear in log r for every N.
  const auto l3 = solve_radial_bvp(3, x, g, 0.0, a, b);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK_THAT(l3.u[i], WithinAbs(a + (b - a) * (x[i] - x.front()) / (x.back() - x.front()), 1e-11));
}

TEST_CASE("one step and the full iteration, f = e^t") {
  const auto nl = Nonlinearity::pure_exponential(2, 1, 1);
  const auto bp = make_barriers(1, 1, 2);
  AnnulusConfig cfg;
  const auto x = annulus_grid(0.05, bp.R_star(), cfg);
  std::vector<double> w(x.size()), v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    w[i] = bp.w(std::exp(x[i]));
    v[i] = bp.v(std::exp(x[i]));
  }
  w.back() = 0;
  const auto step = solve_annulus_step(nl, x, w, w.front(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(step.u[i] >= w[i] - 1e-8);
    CHECK(step.u[i] <= v[i] + 1e-8);
  }

  const auto res = monotone_iterate(nl, 1, 1, 0.05, cfg);
  CHECK(res.converged);
  CHECK(res.sandwich_all);
  CHECK(res.monotone_all);
  CHECK(res.history.size() <= 50);
  CHECK(res.history.back().sup_diff < 1e-8);
}

TEST_CASE("thin annulus converges at once") {
  const auto nl = Nonlinearity::pure_exponential(2, 1, 1);
  const auto bp = make_barriers(1, 1, 2);
  AnnulusConfig cfg;
  const auto res = monotone_iterate(nl, 1, 1, 0.98 * bp.R_star(), cfg);
  CHECK(res.converged);
  CHECK(res.history.size() <= 3);
  for (std::size_t i = 0; i < res.profile.size(); ++i)
    CHECK_THAT(res.profile.u[i], WithinAbs(bp.w(res.profile.r[i]), 1e-3));
}

TEST_CASE("iteration gates") {
  CHECK_THROWS_AS(monotone_iterate(Nonlinearity::stretched_exponential(2, 2), 1, 1, 0.05), PreconditionError);
  CHECK_THROWS_AS(monotone_iterate(Nonlinearity::pure_exponential(2, 2, 1), 1, 1, 0.05), PreconditionError);
}

TEST_CASE("Dirac flux of the pure log profile") {
  // u = ((N-1)/beta) log(1/r), N = 2, beta = 1: -Delta_2 u = 2 pi delta_0.
  const auto pr = sample_profile(
      2, [](double r) { return std::log(1 / r); }, [](double r) { return -1 / r; }, 1e-6, 0.5, 50);
  const auto df = dirac_flux(pr, 1e-6, 0.25);
  for (const auto& row : df.table) CHECK_THAT(row.phi, WithinRel(2 * std::numbers::pi, 1e-10));
  CHECK_THAT(df.alpha, WithinRel(2 * std::numbers::pi, 1e-10));
  // Weak pairing against a bump agrees with the flux-based alpha.
  CHECK_THAT(oracle::bump_pairing([](double) { return -1.0; }, 2, 0.25), WithinRel(df.alpha, 1e-8));
}

TEST_CASE("Dirac flux of a bounded profile vanishes") {
  const auto pr = sample_profile(
      2, [](double r) { return 1 - r * r; }, [](double r) { return -2 * r; }, 1e-8, 0.5, 50);
  const auto df = dirac_flux(pr, 1e-8, 0.25);
  CHECK(std::abs(df.alpha) < 1e-12);
  CHECK(df.table.back().phi < 1e-10 * df.table.front().phi);
  CHECK_THROWS_AS(dirac_flux(pr, 0.1, 0.25), PreconditionError);
}

TEST_CASE("Dirac flux of the constructed profile") {
  const auto nl = Nonlinearity::pure_exponential(2, 1, 1);
  const auto res = monotone_iterate(nl, 1, 1, 0.05);
  const auto df = dirac_flux(res.profile, 0.05, res.barriers.R_star() / 2);
  CHECK(df.positive);
  CHECK(df.alpha > 0.1 * df.table.front().phi);
  // Phi is non-increasing inward here, so the extrapolation sits below the
  // innermost sample.
  CHECK(df.alpha <= df.table.back().phi);
}
