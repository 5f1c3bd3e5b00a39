#pragma once

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "dynamics.hpp"
#include "moments.hpp"
#include "spinspace.hpp"

namespace qmetro {

/// Pure-state QFI 4 (<J_n^2> - <J_n>^2).
inline double qfi_pure(const DickeState& psi, const Direction& axis) {
  return 4.0 * variance(psi, angular_momentum(psi.spin(), axis).matrix);
}

/// Hermitian R solving {R, rho} = i [J, rho]. In the eigenbasis of rho,
/// R_ij = i (l_j - l_i) / (l_i + l_j) J_ij, with pairs l_i + l_j <= cutoff set to zero.
inline MatrixXcd sld_operator(const DensityOperator& rho, const CollectiveOperator& j) {
  if (!(rho.spin() == j.spin)) throw ValidationError("sld_operator: operator and density live on different spins");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.matrix());
  const VectorXd& l = es.eigenvalues();
  const MatrixXcd& v = es.eigenvectors();
  const double cutoff = tol::sld_cutoff * std::max(l.maxCoeff(), 0.0);
  const MatrixXcd je = v.adjoint() * j.matrix * v;
  const int d = static_cast<int>(l.size());
  MatrixXcd r = MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const double s = l(a) + l(b);
      if (s > cutoff) r(a, b) = cplx(0.0, (l(b) - l(a)) / s) * je(a, b);
    }
  }
  MatrixXcd out = v * r * v.adjoint();
  return 0.5 * (out + out.adjoint());
}

struct MixedQfi {
  double via_sld;        // 4 (Tr[rho R^2] - Tr[rho R]^2)
  double via_eigenpairs; // 2 sum (l_i - l_j)^2 / (l_i + l_j) |J_ij|^2
};

inline MixedQfi qfi_mixed_both(const DensityOperator& rho, const Direction& axis) {
  const CollectiveOperator j = angular_momentum(rho.spin(), axis);
  const MatrixXcd r = sld_operator(rho, j);
  const double tr_r = (rho.matrix() * r).trace().real();
  const double tr_r2 = (rho.matrix() * r * r).trace().real();
  const double f_sld = 4.0 * (tr_r2 - tr_r * tr_r);

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.matrix());
  const VectorXd& l = es.eigenvalues();
  const MatrixXcd je = es.eigenvectors().adjoint() * j.matrix * es.eigenvectors();
  const double cutoff = tol::sld_cutoff * std::max(l.maxCoeff(), 0.0);
  double f_pairs = 0.0;
  for (Eigen::Index a = 0; a < l.size(); ++a) {
    for (Eigen::Index b = 0; b < l.size(); ++b) {
      const double s = l(a) + l(b);
      if (s > cutoff) {
        const double dl = l(a) - l(b);
        f_pairs += dl * dl / s * std::norm(je(a, b));
      }
    }
  }
  return {std::max(0.0, f_sld), std::max(0.0, 2.0 * f_pairs)};
}

/// Mixed-state QFI. States with Tr[rho^2] > 1 - 1e-10 take the pure-state route.
inline double qfi_mixed(const DensityOperator& rho, const Direction& axis) {
  if (rho.purity() > 1.0 - tol::purity_gap) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.matrix());
    const Eigen::Index top = rho.spin().dim() - 1;  // eigenvalues ascend
    return qfi_pure(DickeState::normalized(rho.spin(), es.eigenvectors().col(top)), axis);
  }
  return qfi_mixed_both(rho, axis).via_eigenpairs;
}

inline double qfi(const DickeState& psi, const Direction& axis) { return qfi_pure(psi, axis); }
inline double qfi(const DensityOperator& rho, const Direction& axis) { return qfi_mixed(rho, axis); }

inline double chi2_from_qfi(int n, double fq) { return fq < tol::qfi_zero ? kInf : n / fq; }

/// chi^2 = N / F_Q[rho, J_n]
template <class StateLike>
double chi2(const StateLike& s, const Direction& axis) {
  return chi2_from_qfi(s.particles(), qfi(s, axis));
}

/// xi^2 = N Var(J_n3) / (<J_n1>^2 + <J_n2>^2); +inf when the denominator vanishes.
template <class StateLike>
double xi2(const StateLike& s, const Frame& frame) {
  frame.validate();
  const SpinMatrices j = spin_matrices(s.spin());
  const double m1 = expectation(s, component(j, frame.n1));
  const double m2 = expectation(s, component(j, frame.n2));
  const double den = m1 * m1 + m2 * m2;
  if (den <= 0.0) return kInf;
  return s.particles() * variance(s, component(j, frame.n3)) / den;
}

enum class Verdict { EntangledUseful, Boundary, NotUseful };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::EntangledUseful: return "entangled_useful";
    case Verdict::Boundary: return "boundary";
    case Verdict::NotUseful: return "not_useful";
  }
  return "unknown";
}

struct WitnessReport {
  int n;
  Direction direction;
  Frame frame;
  double fq;
  double chi2;
  double xi2;
  double qcr_bound;          // 1 / sqrt(F_Q)
  double statistical_speed;  // sqrt(F_Q)
  double critical_speed;     // sqrt(N)
  double max_speed;          // N
  double shot_noise;         // 1 / sqrt(N)
  double heisenberg_limit;   // 1 / N
  bool entangled_useful;     // chi2 < 1
  bool spin_squeezed;        // xi2 < 1
  Verdict verdict;
};

inline WitnessReport make_report(int n, const Direction& axis, const Frame& frame, double fq, double x2) {
  WitnessReport r{n, axis, frame, fq, chi2_from_qfi(n, fq), x2, 0, 0, 0, 0, 0, 0, false, false, Verdict::NotUseful};
  r.qcr_bound = fq < tol::qfi_zero ? kInf : 1.0 / std::sqrt(fq);
  r.statistical_speed = std::sqrt(fq);
  r.critical_speed = std::sqrt(static_cast<double>(n));
  r.max_speed = n;
  r.shot_noise = 1.0 / std::sqrt(static_cast<double>(n));
  r.heisenberg_limit = 1.0 / n;
  r.entangled_useful = r.chi2 < 1.0;
  r.spin_squeezed = x2 < 1.0;
  if (std::abs(r.chi2 - 1.0) <= 1e-12) r.verdict = Verdict::Boundary;
  else r.verdict = r.entangled_useful ? Verdict::EntangledUseful : Verdict::NotUseful;
  return r;
}

template <class StateLike>
WitnessReport witness_report(const StateLike& s, const Direction& axis, const Frame& frame = {}) {
  return make_report(s.particles(), axis, frame, qfi(s, axis), xi2(s, frame));
}

struct MomentBounds {
  double lower;
  double upper;
  double derivative;        // dM_k/dtheta at 0, 5-point stencil with step dtheta
  double derivative_half;   // same with step dtheta / 2 (Richardson check)
  double moment_2k;
};

/// (dM_k/dtheta)^2 / M_2k <= F_Q <= 4 Var(J_n), with M_k(theta) = Tr[M^k rho_out(theta)]
/// and rho_out(theta) = U rho U^dagger, U = exp(-i theta J_n).
inline MomentBounds moment_bound(const DensityOperator& rho, const Direction& axis, const MatrixXcd& m, int k,
                                 double dtheta = 1e-4) {
  const int d = rho.spin().dim();
  if (m.rows() != d || m.cols() != d) throw ValidationError("moment_bound: observable has the wrong dimension");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ValidationError("moment_bound: observable is not Hermitian");
  if (k < 1) throw ValidationError("moment_bound: k must be a positive integer");
  if (!(dtheta > 0.0)) throw ValidationError("moment_bound: dtheta must be positive");

  const CollectiveOperator jn = angular_momentum(rho.spin(), axis);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(jn.matrix);
  const auto unitary = [&](double theta) {
    VectorXcd ph(d);
    for (int i = 0; i < d; ++i) ph(i) = std::polar(1.0, -theta * es.eigenvalues()(i));
    return MatrixXcd(es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
  };
  MatrixXcd mk = MatrixXcd::Identity(d, d);
  for (int i = 0; i < k; ++i) mk = mk * m;
  const MatrixXcd m2k = mk * mk;
  const auto moment = [&](double theta) {
    const MatrixXcd u = unitary(theta);
    return (mk * u * rho.matrix() * u.adjoint()).trace().real();
  };
  const auto stencil = [&](double h) {
    return (moment(-2 * h) - 8 * moment(-h) + 8 * moment(h) - moment(2 * h)) / (12 * h);
  };

  MomentBounds out{};
  out.derivative = stencil(dtheta);
  out.derivative_half = stencil(0.5 * dtheta);
  out.moment_2k = (m2k * rho.matrix()).trace().real();
  out.lower = out.moment_2k > 0.0 ? out.derivative * out.derivative / out.moment_2k : 0.0;
  out.upper = 4.0 * variance(rho, jn.matrix);
  return out;
}

}  // namespace qmetro
