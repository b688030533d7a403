#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlap {

/// Surface measure of the unit sphere S^{N-1}: N pi^{N/2} / Gamma(N/2 + 1).
inline double sphere_measure(int N) {
  const double n = N;
  return n * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

/// Lebesgue measure of the unit ball in R^N.
inline double ball_volume(int N) {
  const double n = N;
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

/// Which constant a quantity labelled omega_N stands for.
enum class OmegaConvention { ball_volume, sphere_surface };

inline double omega(int N, OmegaConvention c) {
  return c == OmegaConvention::ball_volume ? ball_volume(N) : sphere_measure(N);
}

inline const char* to_string(OmegaConvention c) {
  return c == OmegaConvention::ball_volume ? "ball-volume" : "sphere-surface";
}

/// sgn(v)|v|^{1/(N-1)}: inverse of s -> |s|^{N-2}s.
inline double flux_root(double v, int N) {
  if (N == 2) return v;
  const double a = std::pow(std::abs(v), 1.0 / (N - 1));
  return v < 0 ? -a : a;
}

/// |s|^{N-2}s.
inline double flux_power(double s, int N) {
  if (N == 2) return s;
  const double a = std::pow(std::abs(s), N - 1);
  return s < 0 ? -a : a;
}

/// log(exp(a) + exp(b)) without overflow; tolerates -inf arguments.
inline double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline constexpr double kLogMaxDouble = 709.782712893384;

}  // namespace nlap
