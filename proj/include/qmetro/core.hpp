#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qmetro {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

/// Input rejected because it violates a documented invariant or precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Filesystem failure; the message names the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double structural = 1e-10;
inline constexpr double normalization = 1e-12;
inline constexpr double hermitian = 1e-12;
inline constexpr double psd_floor = -1e-10;
inline constexpr double orthogonality = 1e-10;
inline constexpr double direction_norm = 1e-12;
// SLD null-space cutoff, relative to the largest eigenvalue of rho.
inline constexpr double sld_cutoff = 1e-12;
// Tr[rho^2] above 1 - purity_gap is treated as a pure state.
inline constexpr double purity_gap = 1e-10;
// QFI values below this are reported as zero (chi2 = inf).
inline constexpr double qfi_zero = 1e-12;
}  // namespace tol

/// Spin quantum number j stored as the integer 2j (= particle count N).
class Spin {
 public:
  explicit Spin(int two_j) : two_j_(two_j) {
    if (two_j < 0) throw ValidationError("spin: 2j must be non-negative, got " + std::to_string(two_j));
  }

  static Spin from_j(double j) {
    const double twice = 2.0 * j;
    const double rounded = std::round(twice);
    if (!std::isfinite(j) || j < 0.0 || std::abs(twice - rounded) > 1e-12) {
      throw ValidationError("spin: j must be a non-negative half-integer, got " + std::to_string(j));
    }
    return Spin(static_cast<int>(rounded));
  }

  static Spin from_particles(int n) {
    if (n < 1) throw ValidationError("particle number N must be >= 1, got " + std::to_string(n));
    return Spin(n);
  }

  int two_j() const { return two_j_; }
  int particles() const { return two_j_; }
  double j() const { return 0.5 * two_j_; }
  int dim() const { return two_j_ + 1; }

  // Basis order is mu = +j, +j-1, ..., -j; index i <-> mu = j - i.
  double mu(int index) const { return j() - index; }

  int index_of(double mu) const {
    const double i = j() - mu;
    const double r = std::round(i);
    if (std::abs(i - r) > 1e-9 || r < 0 || r > two_j_) {
      throw ValidationError("mu = " + std::to_string(mu) + " is not a level of spin j = " + std::to_string(j()));
    }
    return static_cast<int>(r);
  }

  friend bool operator==(const Spin&, const Spin&) = default;

 private:
  int two_j_;
};

/// Unit vector in the pseudo-angular-momentum space.
class Direction {
 public:
  Direction(double x, double y, double z) : v_(x, y, z) {
    if (!v_.allFinite() || std::abs(v_.norm() - 1.0) > tol::direction_norm) {
      throw ValidationError("direction must be a unit vector (|n| = " + std::to_string(v_.norm()) + ")");
    }
  }

  static Direction unit_x() { return {1.0, 0.0, 0.0}; }
  static Direction unit_y() { return {0.0, 1.0, 0.0}; }
  static Direction unit_z() { return {0.0, 0.0, 1.0}; }

  static Direction normalized(double x, double y, double z) {
    const double n = std::sqrt(x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("cannot normalize a zero or non-finite vector");
    return {x / n, y / n, z / n};
  }
  static Direction normalized(const Eigen::Vector3d& v) { return normalized(v.x(), v.y(), v.z()); }

  // polar angle from +z, azimuth from +x
  static Direction from_angles(double polar, double azimuth) {
    return normalized(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar));
  }

  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  const Eigen::Vector3d& vec() const { return v_; }

  double polar() const { return std::acos(std::clamp(v_.z(), -1.0, 1.0)); }
  double azimuth() const { return std::atan2(v_.y(), v_.x()); }

  double dot(const Direction& o) const { return v_.dot(o.v_); }

  bool approx_equal(const Direction& o, double eps = 1e-14) const { return (v_ - o.v_).cwiseAbs().maxCoeff() <= eps; }

 private:
  Eigen::Vector3d v_;
};

/// Three mutually orthogonal unit vectors (n1, n2, n3) as used by the squeezing parameter.
struct Frame {
  Direction n1 = Direction::unit_x();
  Direction n2 = Direction::unit_y();
  Direction n3 = Direction::unit_z();

  void validate() const {
    if (std::abs(n1.dot(n2)) > tol::orthogonality || std::abs(n1.dot(n3)) > tol::orthogonality ||
        std::abs(n2.dot(n3)) > tol::orthogonality) {
      throw ValidationError("frame directions are not mutually orthogonal");
    }
  }
};

}  // namespace qmetro
