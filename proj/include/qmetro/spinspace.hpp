#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "core.hpp"
#include "random.hpp"
#include "wigner.hpp"

namespace qmetro {

/// Pure state of N qubits in the symmetric subspace, amplitudes ordered mu = +j ... -j.
class DickeState {
 public:
  DickeState(Spin spin, VectorXcd amplitudes) : spin_(spin), amps_(std::move(amplitudes)) {
    if (amps_.size() != spin_.dim()) {
      throw ValidationError("state: expected " + std::to_string(spin_.dim()) + " amplitudes, got " +
                            std::to_string(amps_.size()));
    }
    if (!amps_.allFinite()) throw ValidationError("state: non-finite amplitude");
    const double n2 = amps_.squaredNorm();
    if (std::abs(n2 - 1.0) > tol::normalization) {
      throw ValidationError("state: not normalized (sum |c|^2 = " + std::to_string(n2) + ")");
    }
  }

  static DickeState basis(Spin spin, double mu) {
    VectorXcd v = VectorXcd::Zero(spin.dim());
    v(spin.index_of(mu)) = 1.0;
    return {spin, std::move(v)};
  }

  /// Normalizes the given amplitudes first; rejects the zero vector.
  static DickeState normalized(Spin spin, VectorXcd amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0)) throw ValidationError("state: cannot normalize the zero vector");
    amplitudes /= n;
    return {spin, std::move(amplitudes)};
  }

  const Spin& spin() const { return spin_; }
  int particles() const { return spin_.particles(); }
  const VectorXcd& amplitudes() const { return amps_; }
  cplx amplitude(double mu) const { return amps_(spin_.index_of(mu)); }
  VectorXd probabilities() const { return amps_.cwiseAbs2(); }

 private:
  Spin spin_;
  VectorXcd amps_;
};

/// Hermitian, positive semidefinite, unit-trace operator on the symmetric subspace.
class DensityOperator {
 public:
  DensityOperator(Spin spin, MatrixXcd matrix) : spin_(spin), m_(std::move(matrix)) { validate(); }

  static DensityOperator from_pure(const DickeState& psi) {
    return {psi.spin(), psi.amplitudes() * psi.amplitudes().adjoint()};
  }

  static DensityOperator maximally_mixed(Spin spin) {
    return {spin, MatrixXcd::Identity(spin.dim(), spin.dim()) / static_cast<double>(spin.dim())};
  }

  const Spin& spin() const { return spin_; }
  int particles() const { return spin_.particles(); }
  const MatrixXcd& matrix() const { return m_; }

  double purity() const { return (m_ * m_).trace().real(); }

  VectorXd eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

 private:
  void validate() const {
    const int d = spin_.dim();
    if (m_.rows() != d || m_.cols() != d) {
      throw ValidationError("density: expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
    }
    if (!m_.allFinite()) throw ValidationError("density: non-finite entry");
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol::hermitian) {
      throw ValidationError("density: not Hermitian (max |rho - rho^dagger| = " + std::to_string(herm) + ")");
    }
    const cplx tr = m_.trace();
    if (std::abs(tr - 1.0) > tol::normalization) {
      throw ValidationError("density: trace is not 1 (trace = " + std::to_string(tr.real()) + ")");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < tol::psd_floor) {
      throw ValidationError("density: not positive semidefinite (min eigenvalue = " + std::to_string(lmin) + ")");
    }
  }

  Spin spin_;
  MatrixXcd m_;
};

struct SpinMatrices {
  MatrixXcd jx, jy, jz;
};

/// Jx, Jy, Jz on the (2j+1)-dimensional space: Jz diagonal descending,
/// J+|j,mu> = sqrt(j(j+1) - mu(mu+1)) |j,mu+1>.
inline SpinMatrices spin_matrices(const Spin& spin) {
  const int d = spin.dim();
  const double j = spin.j();
  MatrixXd jp = MatrixXd::Zero(d, d);
  // index i-1 holds mu+1 when index i holds mu
  for (int i = 1; i < d; ++i) {
    const double m = spin.mu(i);
    jp(i - 1, i) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  SpinMatrices out;
  out.jx = (0.5 * (jp + jp.transpose())).cast<cplx>();
  out.jy = (jp - jp.transpose()).cast<cplx>() * cplx(0.0, -0.5);
  out.jz = MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i) out.jz(i, i) = spin.mu(i);
  return out;
}

/// J . n on the symmetric subspace, with the direction it was built from.
struct CollectiveOperator {
  Spin spin;
  Direction direction;
  MatrixXcd matrix;
};

inline CollectiveOperator angular_momentum(const Spin& spin, const Direction& axis) {
  const SpinMatrices s = spin_matrices(spin);
  MatrixXcd m = axis.x() * s.jx + axis.y() * s.jy + axis.z() * s.jz;
  return {spin, axis, std::move(m)};
}

inline CollectiveOperator angular_momentum(double j, const Direction& axis) {
  return angular_momentum(Spin::from_j(j), axis);
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Maximal-weight eigenstate of J . axis written in the z basis.
/// c_mu = sqrt(C(2j, j-mu)) cos^{j+mu}(polar/2) sin^{j-mu}(polar/2) e^{-i azimuth mu}, evaluated in log space.
inline DickeState coherent_spin_state(const Spin& spin, const Direction& axis) {
  const int n = spin.two_j();
  const double polar = axis.polar();
  const double azimuth = axis.azimuth();
  const double lc = std::log(std::cos(0.5 * polar));
  const double ls = std::log(std::sin(0.5 * polar));
  VectorXcd amps(spin.dim());
  for (int i = 0; i < spin.dim(); ++i) {
    const int ups = n - i;  // j + mu
    const int downs = i;    // j - mu
    double lg = 0.5 * log_binomial(n, downs);
    bool zero = false;
    if (ups > 0) {
      if (std::isinf(lc)) zero = true;
      else lg += ups * lc;
    }
    if (downs > 0) {
      if (std::isinf(ls)) zero = true;
      else lg += downs * ls;
    }
    amps(i) = zero ? cplx(0.0) : std::polar(std::exp(lg), -azimuth * spin.mu(i));
  }
  return DickeState::normalized(spin, std::move(amps));
}

inline DickeState coherent_spin_state(double j, const Direction& axis) {
  return coherent_spin_state(Spin::from_j(j), axis);
}

/// exp(-i angle J.n) via the spectral decomposition of J.n.
inline MatrixXcd rotation_matrix_spectral(const Spin& spin, const Direction& axis, double angle) {
  const CollectiveOperator jn = angular_momentum(spin, axis);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(jn.matrix);
  const VectorXd& w = es.eigenvalues();
  VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) phases(k) = std::polar(1.0, -angle * w(k));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline bool is_y_axis(const Direction& axis) { return axis.approx_equal(Direction::unit_y()); }

/// exp(-i angle J.n). The y axis uses the real Wigner d-matrix, anything else the spectral path.
inline MatrixXcd rotation_matrix(const Spin& spin, const Direction& axis, double angle) {
  if (spin.two_j() > kMaxWignerTwoJ) {
    throw ValidationError("rotation: full rotation matrices are limited to 2j <= " + std::to_string(kMaxWignerTwoJ));
  }
  if (is_y_axis(axis)) return wigner_d(spin, angle).cast<cplx>();
  if (axis.approx_equal(Direction(0.0, -1.0, 0.0))) return wigner_d(spin, -angle).cast<cplx>();
  return rotation_matrix_spectral(spin, axis, angle);
}

namespace detail {
// Removes the O(eps) norm drift of a unitary product so the result passes the state invariant.
inline DickeState renormalized(const Spin& spin, VectorXcd v) { return DickeState::normalized(spin, std::move(v)); }
}  // namespace detail

inline DickeState rotate(const DickeState& state, const Direction& axis, double angle) {
  return detail::renormalized(state.spin(), rotation_matrix(state.spin(), axis, angle) * state.amplitudes());
}

inline DickeState rotate_spectral(const DickeState& state, const Direction& axis, double angle) {
  return detail::renormalized(state.spin(), rotation_matrix_spectral(state.spin(), axis, angle) * state.amplitudes());
}

inline DickeState rotate_wigner_y(const DickeState& state, double angle) {
  return detail::renormalized(state.spin(), wigner_d(state.spin(), angle).cast<cplx>() * state.amplitudes());
}

/// rho -> U rho U^dagger with U = exp(-i angle J.n), the same unitary as rotate().
inline DensityOperator rotate_density(const DensityOperator& rho, const Direction& axis, double angle) {
  const MatrixXcd u = rotation_matrix(rho.spin(), axis, angle);
  MatrixXcd out = u * rho.matrix() * u.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  out /= out.trace().real();
  return {rho.spin(), std::move(out)};
}

inline Direction random_direction(Rng& rng) {
  // uniform on the sphere
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * pi * rng.uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Direction::normalized(r * std::cos(phi), r * std::sin(phi), z);
}

/// N identical single-qubit pure states along `axis`; `state` is the same product in the Dicke basis.
struct ProductState {
  Direction axis;
  DickeState state;
};

inline ProductState random_product_state(int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("random_product_state: N must be >= 1");
  Rng rng(seed);
  const Direction axis = random_direction(rng);
  return {axis, coherent_spin_state(Spin::from_particles(n), axis)};
}

/// sum_k p_k |css(n_k)><css(n_k)| with uniform random n_k and Dirichlet(1) weights p_k.
inline DensityOperator random_separable_density(int n, int mixtures, std::uint64_t seed) {
  if (n < 1) throw ValidationError("random_separable_density: N must be >= 1");
  if (mixtures < 1) throw ValidationError("random_separable_density: K must be >= 1");
  Rng rng(seed);
  const Spin spin = Spin::from_particles(n);
  std::vector<double> w(mixtures);
  double total = 0.0;
  for (double& x : w) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);
    total += x;
  }
  MatrixXcd m = MatrixXcd::Zero(spin.dim(), spin.dim());
  for (int k = 0; k < mixtures; ++k) {
    const DickeState css = coherent_spin_state(spin, random_direction(rng));
    m += (w[k] / total) * css.amplitudes() * css.amplitudes().adjoint();
  }
  m = 0.5 * (m + m.adjoint()).eval();
  m /= m.trace().real();
  return {spin, std::move(m)};
}

/// Haar-random pure state on the (2j+1)-dimensional space (test generator).
inline DickeState random_pure_state(const Spin& spin, Rng& rng) {
  VectorXcd v(spin.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(rng.normal(), rng.normal());
  return DickeState::normalized(spin, std::move(v));
}

/// Full-rank Ginibre-ensemble density G G^dagger / Tr (test generator).
inline DensityOperator random_full_rank_density(const Spin& spin, Rng& rng) {
  const int d = spin.dim();
  MatrixXcd g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = cplx(rng.normal(), rng.normal());
  MatrixXcd m = g * g.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  m /= m.trace().real();
  return {spin, std::move(m)};
}

}  // namespace qmetro
