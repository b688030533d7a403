#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nlap/nonlinearity.hpp"

using namespace nlap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("f at catalogue points") {
  CHECK(Nonlinearity::pure_exponential(2, 1, 1).f(0) == 1.0);

  // singular-exact, N = 2, mu = 2: t = 0 sits below the junction.
  const auto s = Nonlinearity::singular_exact(2, 2.0);
  CHECK_THAT(s.f(0), WithinRel(4 * std::pow(2 * std::log(2.0), -1.5), 1e-14));

  CHECK_THAT(Nonlinearity::model_critical(2, 0, 1, 1.5).f(1), WithinRel(2.0, 1e-15));
  CHECK_THAT(Nonlinearity::power(2, 1, 5).f(1), WithinRel(32.0, 1e-14));
  CHECK_THAT(Nonlinearity::stretched_exponential(3, 2).f(2), WithinRel(std::exp(4.0), 1e-14));
}

TEST_CASE("f is positive on every member") {
  const std::vector<Nonlinearity> all{
      Nonlinearity::power(2, 1, 3),           Nonlinearity::pure_exponential(3, 2, 0.5),
      Nonlinearity::stretched_exponential(2, 1.5), Nonlinearity::singular_exact(3, 3),
      Nonlinearity::model_critical(2, 0.5, 1, 1.5), Nonlinearity::constant(2, 1)};
  for (const auto& nl : all)
    for (double t : {0.0, 1e-3, 0.5, 1.0, 3.0, 7.5})
      if (!(nl.kind() == NonlinearityKind::model_critical && t == 0)) CHECK(nl.f(t) > 0);
}

TEST_CASE("F = f + kappa t^{N-1}") {
  NonlinearityParams p;
  p.kappa = 0;
  CHECK_THAT(Nonlinearity(NonlinearityKind::pure_exponential, 2, p).F(1), WithinRel(std::exp(1.0), 1e-15));
  p.kappa = 2;
  const Nonlinearity k2(NonlinearityKind::pure_exponential, 3, p);
  CHECK_THAT(k2.F(2), WithinRel(std::exp(2.0) + 8, 1e-14));
  CHECK(k2.F(0) == k2.f(0));
}

TEST_CASE("F inverse") {
  NonlinearityParams p;
  p.kappa = 0;
  const Nonlinearity e(NonlinearityKind::pure_exponential, 2, p);
  CHECK_THAT(e.invert_F(std::exp(1.0)), WithinRel(1.0, 1e-12));
  const auto sq = Nonlinearity::stretched_exponential(2, 2);
  CHECK_THAT(sq.invert_F(std::exp(4.0)), WithinRel(2.0, 1e-12));
  p.kappa = 1;
  const Nonlinearity k1(NonlinearityKind::pure_exponential, 2, p);
  CHECK_THAT(k1.invert_F(std::exp(3.0) + 3), WithinRel(3.0, 1e-12));
  // Far in the tail, through the log form.
  CHECK_THAT(sq.invert_log_F(1e4), WithinRel(100.0, 1e-12));
  CHECK_THROWS_AS(e.invert_F(0.5), PreconditionError);
}

TEST_CASE("F strictly increasing, junction continuity") {
  for (int N : {2, 3})
    for (double mu : {1.5, 2.0, 3.0}) {
      const auto nl = Nonlinearity::singular_exact(N, mu);
      CHECK(F_increasing(nl));
      const double J = nl.junction();
      CHECK_THAT(J, WithinRel(std::pow(N * std::log(2.0), 1 / mu), 1e-15));
      CHECK_THAT(nl.log_f(std::nextafter(J, 0.0)), WithinAbs(nl.log_f(std::nextafter(J, 10.0)), 1e-12));
      // Smooth only above the junction.
      CHECK_THROWS_AS(nl.dlog_f(0.5 * J), PreconditionError);
      CHECK(std::isfinite(nl.dlog_f(2 * J)));
    }
  CHECK(F_increasing(Nonlinearity::model_critical(2, 0, 1, 1.5)));
}

TEST_CASE("derivatives of log f against differences") {
  const std::vector<Nonlinearity> all{Nonlinearity::power(2, 1, 3), Nonlinearity::stretched_exponential(2, 1.5),
                                      Nonlinearity::singular_exact(3, 2), Nonlinearity::model_critical(2, 0.5, 1, 1.5)};
  for (const auto& nl : all)
    for (double t : {2.0, 3.5, 6.0}) {
      const double h = 1e-4;
      const double d1 = (nl.log_f(t + h) - nl.log_f(t - h)) / (2 * h);
      const double d2 = (nl.log_f(t + h) - 2 * nl.log_f(t) + nl.log_f(t - h)) / (h * h);
      CHECK_THAT(nl.dlog_f(t), WithinRel(d1, 1e-7));
      CHECK_THAT(nl.d2log_f(t), WithinRel(d2, 1e-4));
    }
}

TEST_CASE("growth classification") {
  const auto grid = default_beta_grid();
  CHECK(classify_growth(Nonlinearity::power(2, 1, 5), grid).verdict == GrowthVerdict::likely_sub);
  CHECK(classify_growth(Nonlinearity::stretched_exponential(2, 2), grid).verdict == GrowthVerdict::likely_super);
  CHECK(classify_growth(Nonlinearity::pure_exponential(2, 1, 1), grid).verdict == GrowthVerdict::likely_sub);
  CHECK(Nonlinearity::pure_exponential(2, 1, 1).declared_class() == GrowthClass::sub_exponential);
  CHECK(Nonlinearity::model_critical(2, 0, 0, 1.5).is_super());
  CHECK_THAT(log_exponential_witness(Nonlinearity::pure_exponential(2, 1, 1), 1.0), WithinAbs(0.0, 1e-15));
}

TEST_CASE("power-ratio probe") {
  const std::vector<double> lam{1.5, 2.0, 4.0}, ts{0.0, 0.5, 1.0, 3.0, 10.0};
  const auto sq = check_power_ratio(Nonlinearity::stretched_exponential(2, 2), lam, ts);
  CHECK(sq.finite);
  CHECK(sq.max_log_ratio <= 1e-12);  // lambda t^2 - (lambda t)^2 <= 0

  const std::vector<double> two{2.0}, three{3.0}, one{1.0};
  CHECK_THAT(check_power_ratio(Nonlinearity::pure_exponential(2, 1, 1), two, three).max_ratio(), WithinRel(1.0, 1e-14));
  CHECK_THAT(check_power_ratio(Nonlinearity::power(2, 1, 2), two, one).max_ratio(), WithinRel(16.0 / 9.0, 1e-14));
}

TEST_CASE("stretched lower gate") {
  CHECK(stretched_lower_gate(Nonlinearity::stretched_exponential(2, 2), 2));
  CHECK(stretched_lower_gate(Nonlinearity::singular_exact(2, 2), 2));
  CHECK_FALSE(stretched_lower_gate(Nonlinearity::stretched_exponential(2, 1.5), 2));
}

TEST_CASE("parameter gates") {
  CHECK_THROWS_AS(Nonlinearity::pure_exponential(1, 1, 1), PreconditionError);
  CHECK_THROWS_AS(Nonlinearity::singular_exact(2, 1.0), PreconditionError);
  CHECK_THROWS_AS(Nonlinearity::model_critical(2, 0, 0, 2.5), PreconditionError);
  CHECK_THROWS_AS(Nonlinearity::pure_exponential(2, 1, 1).f(-1), PreconditionError);
  CHECK_THROWS_AS(parse_kind("quadratic"), PreconditionError);
  CHECK(parse_kind("singular-exact") == NonlinearityKind::singular_exact);
  try {
    Nonlinearity::stretched_exponential(2, 2).f(40);
    FAIL("expected overflow");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == Failure::overflow);
  }
}
