#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "nlap/analysis.hpp"
#include "nlap/iteration.hpp"
#include "nlap/ode.hpp"
#include "oracles.hpp"

using namespace nlap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Zero {
  double log_f(double) const { return -std::numeric_limits<double>::infinity(); }
};
struct One {
  double log_f(double) const { return 0.0; }
};

}  // namespace

TEST_CASE("f = 0 keeps the constant solution") {
  const auto run = integrate_ef(Zero{}, 2, 10.0, 0.0, 1.0, 0.0, IntegratorConfig{});
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    CHECK(run.trajectory.y[i] == 1.0);
    CHECK(run.trajectory.q[i] == 0.0);
  }
  CHECK_FALSE(run.hit_zero);
}

TEST_CASE("f = 1, N = 2: closed form") {
  const double ts = 20, y0 = 3;
  const auto run = integrate_ef(One{}, 2, ts, -1.0, y0, std::exp(-ts), IntegratorConfig{});
  const auto& tr = run.trajectory;
  REQUIRE(tr.t.front() == Catch::Approx(-1.0));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK_THAT(tr.q[i], WithinAbs(std::exp(-tr.t[i]), 1e-9 * std::exp(-tr.t[i]) + 1e-11));
    CHECK_THAT(tr.y[i], WithinAbs(y0 - (std::exp(-tr.t[i]) - std::exp(-ts)), 1e-9 * std::exp(-tr.t[i]) + 1e-12));
  }
}

TEST_CASE("singular-exact data integrated down to r = 1/2") {
  for (int N : {2, 3})
    for (double mu : {1.5, 2.0, 3.0}) {
      const auto nl = Nonlinearity::singular_exact(N, mu);
      const double shift = N * std::log(double(N));
      auto ystar = [&](double t) { return std::pow(t - shift, 1 / mu); };
      const double ts = 50, te = N * std::log(2.0 * N);
      const double q0 = std::pow(std::pow(ts - shift, 1 / mu - 1) / mu, N - 1);
      const auto run = integrate_ef(nl, N, ts, te, ystar(ts), q0, IntegratorConfig{});
      double err = 0;
      for (std::size_t i = 0; i < run.trajectory.size(); ++i)
        err = std::max(err, std::abs(run.trajectory.y[i] - ystar(run.trajectory.t[i])));
      CHECK(err <= 1e-7);
    }
}

TEST_CASE("agreement with a fixed-step RK4 reference") {
  const auto nl = Nonlinearity::model_critical(2, 0, 0, 1.5);
  const double ts = 25, y0 = 2, q0 = std::exp(nl.log_f(y0) - ts);
  IntegratorConfig cfg;
  const auto run = integrate_ef(nl, 2, ts, 4.0, y0, q0, cfg);
  const auto ref = oracle::rk4_ef([&](double y) { return nl.log_f(y); }, 2, ts, 4.0, y0, q0, 1e-3);
  CHECK_THAT(run.trajectory.y.front(), WithinAbs(ref.y.back(), 1e-8));
  CHECK_THAT(run.trajectory.q.front(), WithinRel(ref.q.back(), 1e-8));
}

TEST_CASE("first zero") {
  EFTrajectory tr;
  for (int i = 0; i <= 20; ++i) {
    const double t = 0.5 * i;
    tr.t.push_back(t);
    tr.y.push_back(t - 5);
    tr.q.push_back(1);
  }
  const auto z = first_zero(tr);
  REQUIRE(z);
  CHECK_THAT(*z, WithinAbs(5.0, 1e-10));
  for (auto& v : tr.y) v = 1 + std::abs(v);
  CHECK_FALSE(first_zero(tr));
}

TEST_CASE("integrator event lands on the zero") {
  // f = 1, N = 2, y(inf) = 1: y = 1 - e^{-t}, zero at t = 0.
  const auto run = integrate_ef(One{}, 2, 30.0, -5.0, 1 - std::exp(-30.0), std::exp(-30.0), IntegratorConfig{});
  REQUIRE(run.hit_zero);
  CHECK_THAT(*run.zero, WithinAbs(0.0, 1e-9));
  CHECK(run.trajectory.y.front() == 0.0);
}

TEST_CASE("fixed-step mode converges at fifth order") {
  const double ts = 6, y0 = 3;
  auto err = [&](double h) {
    IntegratorConfig cfg;
    cfg.fixed_step = h;
    const auto run = integrate_ef(One{}, 2, ts, 0.0, y0, std::exp(-ts), cfg);
    return std::abs(run.trajectory.y.front() - (y0 - (1 - std::exp(-ts))));
  };
  const double e1 = err(0.2), e2 = err(0.1);
  CHECK(std::log2(e1 / e2) > 4.5);
}

TEST_CASE("integrator gates") {
  IntegratorConfig bad;
  bad.rtol = -1;
  CHECK_THROWS_AS(integrate_ef(One{}, 2, 1.0, 0.0, 1.0, 0.0, bad), PreconditionError);
  CHECK_THROWS_AS(integrate_ef(One{}, 2, 1.0, 1.0, 1.0, 0.0, IntegratorConfig{}), PreconditionError);
  IntegratorConfig tiny;
  tiny.max_steps = 3;
  CHECK_THROWS_AS(integrate_ef(One{}, 2, 30.0, 0.0, 5.0, 0.0, tiny), NumericalError);
}

TEST_CASE("stencil derivative") {
  std::vector<double> x, v;
  for (int i = 0; i < 30; ++i) {
    const double xi = 0.02 * i + 0.001 * i * i;
    x.push_back(xi);
    v.push_back(std::sin(xi));
  }
  const auto d = stencil_derivative(x, v);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK_THAT(d[i], WithinAbs(std::cos(x[i]), 1e-5));
  const std::vector<double> three{0, 1, 2};
  CHECK_THROWS_AS(stencil_derivative(three, three), PreconditionError);
}

TEST_CASE("residuals") {
  SECTION("exact singular solution") {
    const auto nl = Nonlinearity::singular_exact(2, 2);
    const auto pr = exact_singular_profile(2, 2, 1e-5, 0.4, 400);
    CHECK(profile_residual(pr, nl).max_rel <= 1e-6);
    CHECK(trajectory_residual(profile_to_trajectory(pr), nl).max_rel <= 1e-6);
  }
  SECTION("barrier v against its own closed-form right side") {
    const auto bp = make_barriers(1, 1, 2);
    const auto pr = sample_profile(
        2, [&](double r) { return bp.v(r); }, [&](double r) { return bp.dv(r); }, 1e-4, 10.0, 400);
    const auto rep = profile_residual(pr, [&](double r, double) { return bp.laplacian_v(r); });
    CHECK(rep.max_rel <= 1e-6);
  }
  SECTION("constant profile, f = 0") {
    RadialProfile pr;
    pr.N = 2;
    for (int i = 0; i < 20; ++i) {
      pr.r.push_back(std::pow(0.7, i));
      pr.u.push_back(1);
      pr.p.push_back(0);
    }
    CHECK(profile_residual(pr, [](double, double) { return 0.0; }).max_abs == 0.0);
  }
}
