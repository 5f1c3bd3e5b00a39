#pragma once

#include "spinspace.hpp"

namespace qmetro {

inline double expectation(const DickeState& psi, const MatrixXcd& op) {
  return psi.amplitudes().dot(op * psi.amplitudes()).real();
}

inline double expectation(const DensityOperator& rho, const MatrixXcd& op) {
  return (rho.matrix() * op).trace().real();
}

inline double variance(const DickeState& psi, const MatrixXcd& op) {
  const VectorXcd v = op * psi.amplitudes();
  const double mean = psi.amplitudes().dot(v).real();
  return std::max(0.0, v.squaredNorm() - mean * mean);
}

inline double variance(const DensityOperator& rho, const MatrixXcd& op) {
  const double mean = expectation(rho, op);
  return std::max(0.0, expectation(rho, op * op) - mean * mean);
}

/// (<Jx>, <Jy>, <Jz>)
template <class StateLike>
Eigen::Vector3d mean_spin(const StateLike& s, const SpinMatrices& j) {
  return {expectation(s, j.jx), expectation(s, j.jy), expectation(s, j.jz)};
}

template <class StateLike>
Eigen::Vector3d mean_spin(const StateLike& s) {
  return mean_spin(s, spin_matrices(s.spin()));
}

inline MatrixXcd component(const SpinMatrices& j, const Direction& n) {
  return n.x() * j.jx + n.y() * j.jy + n.z() * j.jz;
}

}  // namespace qmetro
