#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "nlap/errors.hpp"

namespace nlap {

struct Bracket {
  double lo;
  double hi;
};

/// Bisection on a bracket where fn(lo) and fn(hi) have opposite signs (or one
/// vanishes). Stops when the bracket shrinks below xtol or |fn| <= ftol.
template <class Fn>
double bisect(Fn&& fn, Bracket b, double xtol, double ftol = 0.0, int max_iter = 400) {
  double flo = fn(b.lo);
  double fhi = fn(b.hi);
  if (flo == 0.0) return b.lo;
  if (fhi == 0.0) return b.hi;
  if ((flo < 0) == (fhi < 0))
    throw NumericalError(Failure::bracket, "bisect: endpoints do not bracket a root");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (b.lo + b.hi);
    if (mid == b.lo || mid == b.hi) return mid;
    const double fm = fn(mid);
    if (fm == 0.0 || std::abs(fm) <= ftol) return mid;
    if ((fm < 0) == (flo < 0)) {
      b.lo = mid;
      flo = fm;
    } else {
      b.hi = mid;
    }
    if (std::abs(b.hi - b.lo) <= xtol) return 0.5 * (b.lo + b.hi);
  }
  return 0.5 * (b.lo + b.hi);
}

/// Illinois-modified regula falsi. Same contract as bisect, faster on smooth
/// monotone functions; falls back to a bisection step when the secant stalls.
template <class Fn>
double illinois(Fn&& fn, Bracket b, double xtol, double ftol = 0.0, int max_iter = 200) {
  double a = b.lo, c = b.hi;
  double fa = fn(a), fc = fn(c);
  if (fa == 0.0) return a;
  if (fc == 0.0) return c;
  if ((fa < 0) == (fc < 0))
    throw NumericalError(Failure::bracket, "illinois: endpoints do not bracket a root");
  int side = 0;
  for (int it = 0; it < max_iter; ++it) {
    double x = (a * fc - c * fa) / (fc - fa);
    if (!(x > std::min(a, c) && x < std::max(a, c))) x = 0.5 * (a + c);
    const double fx = fn(x);
    if (fx == 0.0 || std::abs(fx) <= ftol) return x;
    if ((fx < 0) == (fc < 0)) {
      c = x;
      fc = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = fx;
      if (side == 1) fc *= 0.5;
      side = 1;
    }
    if (std::abs(c - a) <= xtol) return 0.5 * (a + c);
  }
  return 0.5 * (a + c);
}

/// Expands [x0 - step, x0 + step] geometrically until fn changes sign.
template <class Fn>
std::optional<Bracket> expand_bracket(Fn&& fn, double x0, double step, int max_expand = 60) {
  double lo = x0 - step, hi = x0 + step;
  double flo = fn(lo), fhi = fn(hi);
  for (int k = 0; k < max_expand; ++k) {
    if (std::isfinite(flo) && std::isfinite(fhi) && ((flo <= 0) != (fhi <= 0)))
      return Bracket{lo, hi};
    step *= 2.0;
    lo = x0 - step;
    hi = x0 + step;
    flo = fn(lo);
    fhi = fn(hi);
  }
  return std::nullopt;
}

}  // namespace nlap
