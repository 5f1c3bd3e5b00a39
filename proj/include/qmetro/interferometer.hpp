#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dynamics.hpp"
#include "spinspace.hpp"

namespace qmetro {

/// P(mu | j, theta, tau) tabulated over a theta grid; column g is the distribution at theta_grid[g],
/// row i is mu = j - i.
struct ConditionalDistribution {
  Spin spin;
  double tau;
  std::vector<double> theta_grid;
  MatrixXd table;

  int rows() const { return static_cast<int>(table.rows()); }
  int cols() const { return static_cast<int>(table.cols()); }

  /// P(mu | theta) along the grid for one outcome.
  VectorXd slice(double mu) const { return table.row(spin.index_of(mu)).transpose(); }
};

/// Mach-Zehnder output distribution |<j,mu| exp(-i theta Jy) |psi(tau)>|^2 via the Wigner d-matrix.
inline VectorXd likelihood(const Spin& spin, double tau, double theta) {
  const DickeState out = rotate(twisted_state(spin, tau), Direction::unit_y(), theta);
  return out.probabilities();
}

/// Uniform cell-midpoint grid on (0, pi).
inline std::vector<double> midpoint_grid(int points, double lo = 0.0, double hi = pi) {
  if (points < 1) throw ValidationError("theta grid must have at least one point");
  std::vector<double> g(points);
  const double h = (hi - lo) / points;
  for (int k = 0; k < points; ++k) g[k] = lo + (k + 0.5) * h;
  return g;
}

/// 4096 points for N <= 64, max(4096, 64 N) above.
inline std::vector<double> default_theta_grid(int n) {
  return midpoint_grid(n <= 64 ? 4096 : std::max(4096, 64 * n));
}

inline void validate_theta_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("theta grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0 && grid[k] <= pi)) throw ValidationError("theta grid must lie within [0, pi]");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw ValidationError("theta grid must be strictly ascending");
  }
}

/// Table of likelihood columns. Uses the spectral decomposition of Jy once and evaluates all
/// columns as one blocked matrix product; agrees with likelihood() to rounding.
inline ConditionalDistribution likelihood_table(const Spin& spin, double tau, std::vector<double> grid) {
  validate_theta_grid(grid);
  const int d = spin.dim();
  const int g = static_cast<int>(grid.size());
  const SpinMatrices j = spin_matrices(spin);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(j.jy);
  const MatrixXcd& v = es.eigenvectors();
  const VectorXd& w = es.eigenvalues();
  const VectorXcd c = v.adjoint() * twisted_state(spin, tau).amplitudes();

  MatrixXd table(d, g);
  constexpr int kBlock = 256;
  MatrixXcd phased(d, kBlock);
  MatrixXcd amps(d, kBlock);
  for (int start = 0; start < g; start += kBlock) {
    const int width = std::min(kBlock, g - start);
    for (int col = 0; col < width; ++col) {
      const double theta = grid[start + col];
      for (int k = 0; k < d; ++k) phased(k, col) = std::polar(1.0, -theta * w(k)) * c(k);
    }
    amps.leftCols(width).noalias() = v * phased.leftCols(width);
    for (int col = 0; col < width; ++col) {
      VectorXd p = amps.col(col).cwiseAbs2();
      table.col(start + col) = p / p.sum();
    }
  }
  return {spin, tau, std::move(grid), std::move(table)};
}

enum class WidthMethod { PeakSpacing, Fwhm };

struct SubstructureWidth {
  double width;
  WidthMethod method;
  int peaks;  // qualifying local maxima
};

/// Typical substructure size of theta -> P(mu | theta): mean spacing of adjacent local maxima
/// above 10% of the slice maximum; with fewer than two such maxima, the FWHM of the dominant peak.
inline SubstructureWidth substructure_width(const ConditionalDistribution& dist, double mu) {
  const VectorXd p = dist.slice(mu);
  const auto& th = dist.theta_grid;
  const int g = static_cast<int>(p.size());
  const double gmax = p.maxCoeff();
  std::vector<int> peaks;
  for (int i = 1; i + 1 < g; ++i) {
    if (p(i) > p(i - 1) && p(i) >= p(i + 1) && p(i) > 0.1 * gmax) peaks.push_back(i);
  }
  if (peaks.size() >= 2) {
    const double span = th[peaks.back()] - th[peaks.front()];
    return {span / static_cast<double>(peaks.size() - 1), WidthMethod::PeakSpacing, static_cast<int>(peaks.size())};
  }
  Eigen::Index top = 0;
  p.maxCoeff(&top);
  const double half = 0.5 * p(top);
  // linear interpolation of the half-maximum crossing on each side; clipped at the grid ends
  int l = static_cast<int>(top);
  while (l > 0 && p(l) > half) --l;
  double left = th[l];
  if (p(l) <= half && l < top) left = th[l] + (half - p(l)) / (p(l + 1) - p(l)) * (th[l + 1] - th[l]);
  int r = static_cast<int>(top);
  while (r < g - 1 && p(r) > half) ++r;
  double right = th[r];
  if (p(r) <= half && r > top) right = th[r] - (half - p(r)) / (p(r - 1) - p(r)) * (th[r] - th[r - 1]);
  return {right - left, WidthMethod::Fwhm, static_cast<int>(peaks.size())};
}

inline const char* to_string(WidthMethod m) { return m == WidthMethod::PeakSpacing ? "peak_spacing" : "fwhm"; }

inline std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// CSV with header "theta,mu,probability", one row per (theta, mu) cell.
inline void write_csv(std::ostream& os, const ConditionalDistribution& dist) {
  os << "theta,mu,probability\n";
  for (int g = 0; g < dist.cols(); ++g) {
    for (int i = 0; i < dist.rows(); ++i) {
      os << format_double(dist.theta_grid[g]) << ',' << format_double(dist.spin.mu(i)) << ','
         << format_double(dist.table(i, g)) << '\n';
    }
  }
}

}  // namespace qmetro
