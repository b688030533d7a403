#pragma once

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nlap {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on a finite interval.
template <class Fn>
QuadResult integrate(Fn&& fn, double a, double b, double rtol = 1e-10, unsigned max_depth = 18) {
  QuadResult r;
  if (a == b) return r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(fn, a, b, max_depth, rtol, &r.error,
                                                                         &r.l1);
  return r;
}

/// Composite trapezoid on tabulated values; used only for cheap cross-checks.
template <class Xs, class Ys>
double trapezoid(const Xs& x, const Ys& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace nlap
