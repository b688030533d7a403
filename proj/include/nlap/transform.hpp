#pragma once

// Emden-Fowler coordinates t = N log(N/r), y(t) = u(r), and the flux variables
//   q = |y'|^{N-2} y'            (trajectory)
//   p = r^{N-1} |u'|^{N-2} u'    (profile)
// related by q = -N^{1-N} p. Profiles are stored with r descending so that
// index order matches the ascending t order of the corresponding trajectory.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "nlap/constants.hpp"
#include "nlap/errors.hpp"
#include "nlap/nonlinearity.hpp"
#include "nlap/quadrature.hpp"

namespace nlap {

struct EFTrajectory {
  int N = 2;
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> q;

  std::size_t size() const { return t.size(); }
  double dy(std::size_t i) const { return flux_root(q[i], N); }

  void validate() const {
    require(N >= 2, Failure::precondition, "trajectory: N must be >= 2");
    require(t.size() == y.size() && t.size() == q.size(), Failure::precondition,
            "trajectory: t, y, q lengths differ");
    require(t.size() >= 2, Failure::precondition, "trajectory: need at least two points");
    for (std::size_t i = 1; i < t.size(); ++i)
      require(t[i] > t[i - 1], Failure::precondition, "trajectory: grid not strictly increasing");
  }
};

struct RadialProfile {
  int N = 2;
  std::vector<double> r;  // strictly decreasing, positive
  std::vector<double> u;
  std::vector<double> p;

  std::size_t size() const { return r.size(); }
  double r_max() const { return r.front(); }
  double r_min() const { return r.back(); }

  /// u'(r) recovered from the flux: sgn(p) (|p| / r^{N-1})^{1/(N-1)}.
  double du(std::size_t i) const { return flux_root(p[i], N) / r[i]; }

  void validate() const {
    require(N >= 2, Failure::precondition, "profile: N must be >= 2");
    require(r.size() == u.size() && r.size() == p.size(), Failure::precondition,
            "profile: r, u, p lengths differ");
    require(r.size() >= 2, Failure::precondition, "profile: need at least two points");
    require(r.back() > 0, Failure::precondition, "profile: radii must be positive");
    for (std::size_t i = 1; i < r.size(); ++i)
      require(r[i] < r[i - 1], Failure::precondition, "profile: radii not strictly decreasing");
  }
};

struct ScaledTrajectory {
  double mu = 2.0;
  std::vector<double> xi;   // log t
  std::vector<double> rho;  // y / t^{1/mu}
  std::vector<double> H;
  double truncation_xi = 0.0;  // where the tail integrand dropped below 1e-300
};

inline double ef_forward(double r, int N) {
  require(r > 0 && std::isfinite(r), Failure::domain, "Emden-Fowler map needs r > 0");
  return N * std::log(N / r);
}

inline double ef_inverse(double t, int N) { return N * std::exp(-t / N); }

inline EFTrajectory profile_to_trajectory(const RadialProfile& pr) {
  pr.validate();
  EFTrajectory tr;
  tr.N = pr.N;
  const double scale = -std::pow(static_cast<double>(pr.N), 1 - pr.N);
  tr.t.reserve(pr.size());
  for (std::size_t i = 0; i < pr.size(); ++i) {
    tr.t.push_back(ef_forward(pr.r[i], pr.N));
    tr.y.push_back(pr.u[i]);
    tr.q.push_back(scale * pr.p[i]);
  }
  return tr;
}

inline RadialProfile trajectory_to_profile(const EFTrajectory& tr) {
  tr.validate();
  RadialProfile pr;
  pr.N = tr.N;
  const double scale = -std::pow(static_cast<double>(tr.N), tr.N - 1);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    pr.r.push_back(ef_inverse(tr.t[i], tr.N));
    pr.u.push_back(tr.y[i]);
    pr.p.push_back(scale * tr.q[i]);
  }
  return pr;
}

/// Index i with grid[i] <= x <= grid[i+1] on an ascending grid (clamped).
inline std::size_t locate(std::span<const double> grid, double x) {
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  return std::min(i, grid.size() - 2);
}

/// Cubic Hermite for y (slopes taken from the flux), linear for q.
class EfInterpolant {
 public:
  explicit EfInterpolant(const EFTrajectory& tr) : tr_(tr) {
    tr_.validate();
    d_.resize(tr_.size());
    for (std::size_t i = 0; i < tr_.size(); ++i) d_[i] = tr_.dy(i);
    limit_slopes();
  }

  double t_min() const { return tr_.t.front(); }
  double t_max() const { return tr_.t.back(); }
  bool contains(double t) const { return t >= t_min() && t <= t_max(); }
  const EFTrajectory& trajectory() const { return tr_; }

  double y(double t) const {
    const std::size_t i = locate(tr_.t, t);
    const double h = tr_.t[i + 1] - tr_.t[i];
    const double s = (t - tr_.t[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * tr_.y[i] + h10 * h * d_[i] + h01 * tr_.y[i + 1] + h11 * h * d_[i + 1];
  }

  double q(double t) const {
    const std::size_t i = locate(tr_.t, t);
    const double s = (t - tr_.t[i]) / (tr_.t[i + 1] - tr_.t[i]);
    return (1 - s) * tr_.q[i] + s * tr_.q[i + 1];
  }

  double dy(double t) const { return flux_root(q(t), tr_.N); }

 private:
  // Fritsch-Carlson limiter, active only on intervals where the data and both
  // slopes share a sign.
  void limit_slopes() {
    for (std::size_t i = 0; i + 1 < tr_.size(); ++i) {
      const double delta = (tr_.y[i + 1] - tr_.y[i]) / (tr_.t[i + 1] - tr_.t[i]);
      if (delta == 0.0) continue;
      const double a = d_[i] / delta, b = d_[i + 1] / delta;
      if (a <= 0 || b <= 0) continue;
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        d_[i] = tau * a * delta;
        d_[i + 1] = tau * b * delta;
      }
    }
  }

  EFTrajectory tr_;
  std::vector<double> d_;
};

/// Radius-indexed view of a profile through its Emden-Fowler trajectory.
class ProfileInterpolant {
 public:
  explicit ProfileInterpolant(const RadialProfile& pr)
      : N_(pr.N), interp_(profile_to_trajectory(pr)), r_min_(pr.r_min()), r_max_(pr.r_max()) {}

  double u(double r) const { return interp_.y(ef_forward(r, N_)); }
  double p(double r) const { return -std::pow(static_cast<double>(N_), N_ - 1) * interp_.q(ef_forward(r, N_)); }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  int dim() const { return N_; }

 private:
  int N_;
  EfInterpolant interp_;
  double r_min_, r_max_;
};

/// rho = y / t^{1/mu} on xi = log t together with
///   H(xi) = e^{(mu-1) xi / mu} ( int_xi^inf f(rho e^{zeta/mu}) e^{-e^zeta} e^zeta dzeta )^{1/(N-1)}.
/// Beyond the last grid point y is frozen at its final value.
inline ScaledTrajectory scale_to_rho(const EFTrajectory& tr, const Nonlinearity& nl, double mu) {
  tr.validate();
  require(mu > 1, Failure::precondition, "scale_to_rho: mu must exceed 1");
  require(tr.t.front() >= 1.0, Failure::precondition, "scale_to_rho: every t_i must be >= 1");
  const int N = tr.N;
  const EfInterpolant in(tr);
  const std::size_t n = tr.size();

  auto log_integrand = [&](double zeta, double yv) { return nl.log_f(std::max(yv, 0.0)) - std::exp(zeta) + zeta; };

  ScaledTrajectory out;
  out.mu = mu;
  out.xi.resize(n);
  out.rho.resize(n);
  out.H.resize(n);

  // Frozen tail past the grid, truncated where the integrand falls below 1e-300.
  const double y_end = tr.y.back();
  const double xi_end = std::log(tr.t.back());
  const double log_cut = std::log(1e-300);
  double zeta_cut = xi_end;
  while (log_integrand(zeta_cut, y_end) > log_cut) zeta_cut += 0.05;
  out.truncation_xi = zeta_cut;
  double tail = integrate([&](double z) { return std::exp(log_integrand(z, y_end)); }, xi_end, zeta_cut, 1e-12).value;

  std::vector<double> J(n);
  J[n - 1] = tail;
  for (std::size_t k = n - 1; k-- > 0;) {
    const double a = std::log(tr.t[k]), b = std::log(tr.t[k + 1]);
    const double seg =
        integrate([&](double z) { return std::exp(log_integrand(z, in.y(std::exp(z)))); }, a, b, 1e-12, 4).value;
    J[k] = J[k + 1] + seg;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = std::log(tr.t[i]);
    out.xi[i] = xi;
    out.rho[i] = tr.y[i] / std::pow(tr.t[i], 1.0 / mu);
    out.H[i] = std::exp((mu - 1.0) / mu * xi) * std::pow(J[i], 1.0 / (N - 1));
  }
  return out;
}

/// w(r) = int_r^R s^{1-N} |log(N/s)|^{(1-N)/mu} ds, integrated in log s.
inline double weight_w(double r, double R, int N, double mu, double rtol = 1e-10) {
  require(r > 0 && r <= R, Failure::domain, "weight_w: need 0 < r <= R");
  require(R < N, Failure::domain, "weight_w: need R < N so that log(N/s) > 0");
  if (r == R) return 0.0;
  const double logN = std::log(static_cast<double>(N));
  const double expo = (1.0 - N) / mu;
  auto g = [&](double x) { return std::exp((2.0 - N) * x + expo * std::log(logN - x)); };
  return integrate(g, std::log(r), std::log(R), rtol).value;
}

}  // namespace nlap
