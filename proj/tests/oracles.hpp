#pragma once

// Reference computations for the tests. Nothing here calls the library's
// integrators, root finders or quadrature, so agreement is a real cross-check.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

namespace oracle {

inline double sphere_measure(int N) {
  return 2 * std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0);
}

/// Real root of r^3 + a r^2 + b r + c = 0 when there is exactly one (Cardano).
inline double cardano_single_real(double a, double b, double c) {
  const double p = b - a * a / 3, q = 2 * a * a * a / 27 - a * b / 3 + c;
  const double disc = q * q / 4 + p * p * p / 27;
  const double s = std::sqrt(disc);
  return std::cbrt(-q / 2 + s) + std::cbrt(-q / 2 - s) - a / 3;
}

/// Zero of r (1 + M r)^mu - 1 by plain Newton in log r from r = 1.
inline double barrier_zero_newton(double M, double mu) {
  long double x = 0;
  for (int i = 0; i < 200; ++i) {
    const long double r = std::exp(x);
    const long double h = x + mu * std::log1p(M * r);
    const long double dh = 1 + mu * M * r / (1 + M * r);
    x -= h / dh;
    if (std::fabs(h) < 1e-18L) break;
  }
  return static_cast<double>(std::exp(x));
}

/// -Delta_N u by nested fourth-order central differences of u in x = log r,
/// carried out in long double.
inline double nested_fd_laplacian(const std::function<long double(long double)>& u, double r, int N,
                                  long double h = 2e-3L) {
  auto du_dx = [&](long double x) {
    return (u(std::exp(x - 2 * h)) - 8 * u(std::exp(x - h)) + 8 * u(std::exp(x + h)) - u(std::exp(x + 2 * h))) /
           (12 * h);
  };
  // p = r^{N-1}|u'|^{N-2}u' = |du/dx|^{N-2} du/dx since u' = (du/dx)/r.
  auto p = [&](long double x) {
    const long double d = du_dx(x);
    return std::pow(std::fabs(d), static_cast<long double>(N - 2)) * d;
  };
  const long double x = std::log(static_cast<long double>(r));
  const long double px = (p(x - 2 * h) - 8 * p(x - h) + 8 * p(x + h) - p(x + 2 * h)) / (12 * h);
  return static_cast<double>(-px / std::pow(static_cast<long double>(r), N));
}

struct RefRun {
  std::vector<double> t, y, q;
  std::optional<double> zero;
};

/// Classic RK4 with a fixed step on y' = |q|^{1/(N-1)} sgn q, q' = -e^{-t} f(y),
/// from t0 towards t1; the first sign change of y is located on the step's cubic
/// Hermite interpolant.
inline RefRun rk4_ef(const std::function<double(double)>& log_f, int N, double t0, double t1, double y0, double q0,
                     double h) {
  const double dir = t1 < t0 ? -1.0 : 1.0;
  h = std::abs(h) * dir;
  auto rhs = [&](double t, double y, double q) {
    const double yd = std::copysign(std::pow(std::abs(q), 1.0 / (N - 1)), q);
    return std::pair{yd, -std::exp(log_f(std::max(y, 0.0)) - t)};
  };
  RefRun out;
  double t = t0, y = y0, q = q0;
  out.t.push_back(t);
  out.y.push_back(y);
  out.q.push_back(q);
  while ((t1 - t) * dir > 1e-15) {
    const double step = (t1 - t) * dir < std::abs(h) ? t1 - t : h;
    const auto [a1, b1] = rhs(t, y, q);
    const auto [a2, b2] = rhs(t + step / 2, y + step / 2 * a1, q + step / 2 * b1);
    const auto [a3, b3] = rhs(t + step / 2, y + step / 2 * a2, q + step / 2 * b2);
    const auto [a4, b4] = rhs(t + step, y + step * a3, q + step * b3);
    const double yn = y + step / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    const double qn = q + step / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
    if (yn <= 0 && y > 0) {
      // Cubic Hermite root between the two samples, refined by bisection.
      const double ya = y, yb = yn, da = a1, db = rhs(t + step, yn, qn).first;
      auto H = [&](double s) {
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * ya + (s3 - 2 * s2 + s) * step * da + (-2 * s3 + 3 * s2) * yb +
               (s3 - s2) * step * db;
      };
      double lo = 0, hi = 1;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (H(mid) > 0 ? lo : hi) = mid;
      }
      out.zero = t + 0.5 * (lo + hi) * step;
      return out;
    }
    t += step;
    y = yn;
    q = qn;
    out.t.push_back(t);
    out.y.push_back(y);
    out.q.push_back(q);
  }
  return out;
}

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

/// Weak pairing sigma int_0^inf p(r) phi'(r) dr of a radial flux against the
/// bump phi(r) = exp(1 - 1/(1 - (r/a)^2)) (phi(0) = 1). For -Delta_N u = alpha
/// delta_0 + (smooth) this equals alpha plus the smooth part's mass.
inline double bump_pairing(const std::function<double(double)>& p, int N, double a, int n = 20000) {
  auto dphi = [&](double r) {
    const double s = r / a;
    if (s >= 1) return 0.0;
    const double d = 1 - s * s;
    return std::exp(1 - 1 / d) * (-2 * s / (d * d)) / a;
  };
  // u has a singular flux near 0 only through p, which stays bounded in the
  // cases tested, so a plain Simpson rule on (0, a) suffices.
  return sphere_measure(N) * simpson([&](double r) { return r == 0 ? 0.0 : p(r) * dphi(r); }, 0.0, a, n);
}

}  // namespace oracle
