#pragma once

#include <cmath>
#include <limits>

#include "moments.hpp"
#include "spinspace.hpp"

namespace qmetro {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// base^exponent for integer exponent >= 0 as sign^e * exp(e ln|base|); 0^e = 0 for e > 0.
inline double signed_pow(double base, int exponent) {
  if (exponent == 0) return 1.0;
  if (base == 0.0) return 0.0;
  const double mag = std::exp(exponent * std::log(std::abs(base)));
  return (base < 0.0 && (exponent % 2) != 0) ? -mag : mag;
}

/// One-axis twisting exp(-i tau Jz^2): c_mu -> c_mu exp(-i tau mu^2).
inline DickeState evolve_oat(const DickeState& state, double tau) {
  VectorXcd v = state.amplitudes();
  const Spin& s = state.spin();
  for (int i = 0; i < s.dim(); ++i) {
    const double m = s.mu(i);
    v(i) *= std::polar(1.0, -tau * m * m);
  }
  return DickeState::normalized(s, std::move(v));
}

/// exp(-i tau Jz^2) applied to the coherent spin state along x.
inline DickeState twisted_state(const Spin& spin, double tau) {
  return evolve_oat(coherent_spin_state(spin, Direction::unit_x()), tau);
}

namespace detail {
inline void require_particles(int n, int min_n, const char* what) {
  if (n < min_n) throw ValidationError(std::string(what) + ": N must be >= " + std::to_string(min_n));
}

// (cos 2 tau)^(N-2) with 1 - (cos 2 tau)^(N-2) kept accurate at small tau
struct CosPower {
  double power;
  double one_minus;
};

inline CosPower cos2tau_power(int exponent, double tau) {
  const double c2 = std::cos(2.0 * tau);
  if (exponent == 0) return {1.0, 0.0};
  if (c2 > 0.0) {
    const double s = std::sin(tau);
    const double log_c2 = std::log1p(-2.0 * s * s);
    const double x = exponent * log_c2;
    return {std::exp(x), -std::expm1(x)};
  }
  const double p = signed_pow(c2, exponent);
  return {p, 1.0 - p};
}

inline bool at_cos_zero(double tau) { return std::abs(std::remainder(tau - 0.5 * pi, pi)) < 1e-12; }
}  // namespace detail

/// chi^2 = 2 / [(N+1) - (N-1)(cos 2 tau)^(N-2)] for the twisted coherent state, axis y.
inline double chi2_oat_analytic(int n, double tau) {
  detail::require_particles(n, 2, "chi2_oat_analytic");
  const double p = signed_pow(std::cos(2.0 * tau), n - 2);
  return 2.0 / ((n + 1.0) - (n - 1.0) * p);
}

/// xi^2 = (cos tau)^(-2(N-1)) in the fixed (x, y, z) frame; +inf where cos tau = 0.
inline double xi2_oat_analytic(int n, double tau) {
  detail::require_particles(n, 2, "xi2_oat_analytic");
  if (detail::at_cos_zero(tau)) return kInf;
  return std::exp(-2.0 * (n - 1) * std::log(std::abs(std::cos(tau))));
}

struct SqueezingCoefficients {
  double a;
  double b;
};

/// A = 1 - (cos 2 tau)^(N-2), B = 4 sin tau (cos tau)^(N-2).
inline SqueezingCoefficients squeezing_coefficients(int n, double tau) {
  detail::require_particles(n, 3, "squeezing_coefficients");
  if (!(tau >= 0.0 && tau < 0.5 * pi)) throw ValidationError("squeezing: tau must lie in [0, pi/2)");
  const auto cp = detail::cos2tau_power(n - 2, tau);
  return {cp.one_minus, 4.0 * std::sin(tau) * signed_pow(std::cos(tau), n - 2)};
}

/// Optimal squeezing rotation delta = atan(B/A)/2; delta(tau = 0) = 0 by continuity.
inline double delta_opt(int n, double tau) {
  const auto [a, b] = squeezing_coefficients(n, tau);
  if (a == 0.0 && b == 0.0) return 0.0;
  return 0.5 * std::atan2(b, a);
}

/// Squeezing parameter of exp(i delta Jx)|psi(tau)>, closed form.
inline double xi2_rotated_analytic(int n, double tau) {
  const auto [a, b] = squeezing_coefficients(n, tau);
  const double r = std::hypot(a, b);
  // A - sqrt(A^2 + B^2) without cancellation
  const double diff = (r == 0.0) ? 0.0 : -(b * b) / (a + r);
  const double numer = 4.0 + (n - 1.0) * diff;
  return 0.25 * numer * std::exp(-(2.0 * n - 2.0) * std::log(std::cos(tau)));
}

inline constexpr int kDirectSqueezingMaxN = 200;

/// Squeezing parameter of |psi(tau)> with the variance minimized numerically over the plane
/// orthogonal to the mean spin. Independent of the closed-form delta.
inline double xi2_rotated_direct(int n, double tau) {
  detail::require_particles(n, 2, "xi2_rotated_direct");
  if (n > kDirectSqueezingMaxN) {
    throw ValidationError("xi2_rotated_direct: N must be <= " + std::to_string(kDirectSqueezingMaxN));
  }
  const Spin spin = Spin::from_particles(n);
  const DickeState psi = twisted_state(spin, tau);
  const SpinMatrices j = spin_matrices(spin);
  const Eigen::Vector3d m = mean_spin(psi, j);
  const double m2 = m.squaredNorm();
  if (m2 == 0.0) return kInf;

  // orthonormal basis of the plane orthogonal to m
  const Eigen::Vector3d u = m.normalized();
  Eigen::Vector3d helper = std::abs(u.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d e1 = (helper - helper.dot(u) * u).normalized();
  const Eigen::Vector3d e2 = u.cross(e1);
  const MatrixXcd j1 = e1.x() * j.jx + e1.y() * j.jy + e1.z() * j.jz;
  const MatrixXcd j2 = e2.x() * j.jx + e2.y() * j.jy + e2.z() * j.jz;
  const auto var_at = [&](double phi) { return variance(psi, std::cos(phi) * j1 + std::sin(phi) * j2); };

  // Var(phi) is a sinusoid in 2 phi: coarse scan for the basin, then golden section.
  constexpr int kScan = 64;
  int best = 0;
  double best_v = var_at(0.0);
  for (int k = 1; k < kScan; ++k) {
    const double v = var_at(pi * k / kScan);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  double lo = pi * (best - 1) / kScan;
  double hi = pi * (best + 1) / kScan;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = var_at(x1);
  double f2 = var_at(x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = var_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = var_at(x2);
    }
  }
  const double vmin = std::min({f1, f2, best_v});
  return n * vmin / m2;
}

struct SqueezingOptimum {
  double tau;
  double xi2;
};

/// Minimum of xi2_rotated_analytic over tau in (0, min(3/sqrt N, pi/2)).
inline SqueezingOptimum squeezing_optimum(int n) {
  detail::require_particles(n, 3, "squeezing_optimum");
  const double hi = std::min(3.0 / std::sqrt(static_cast<double>(n)), 0.5 * pi - 1e-9);
  const double lo = 1e-4 * hi;
  constexpr int kScan = 4000;
  const double ratio = std::log(hi / lo);
  int best = 0;
  double best_v = kInf;
  std::vector<double> taus(kScan);
  for (int k = 0; k < kScan; ++k) {
    taus[k] = lo * std::exp(ratio * k / (kScan - 1));
    const double v = xi2_rotated_analytic(n, taus[k]);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  double a = taus[std::max(0, best - 1)];
  double b = taus[std::min(kScan - 1, best + 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = xi2_rotated_analytic(n, x1), f2 = xi2_rotated_analytic(n, x2);
  for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = xi2_rotated_analytic(n, x1);
    } else {
      a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = xi2_rotated_analytic(n, x2);
    }
  }
  return f1 < f2 ? SqueezingOptimum{x1, f1} : SqueezingOptimum{x2, f2};
}

/// Smallest tau above the optimum where the rotated squeezing parameter returns to 1.
inline double squeezing_crossing(int n) {
  const SqueezingOptimum opt = squeezing_optimum(n);
  double lo = opt.tau;
  double hi = opt.tau;
  const double step = 0.05 / std::sqrt(static_cast<double>(n));
  while (xi2_rotated_analytic(n, hi) < 1.0) {
    lo = hi;
    hi = std::min(hi + step, 0.5 * pi - 1e-12);
    if (hi >= 0.5 * pi - 1e-12) break;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (xi2_rotated_analytic(n, mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qmetro
