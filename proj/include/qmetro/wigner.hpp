#pragma once

#include "core.hpp"

namespace qmetro {

inline constexpr int kMaxWignerTwoJ = 1000;

/// Real Wigner matrix d^j(beta) = exp(-i beta Jy) in the mu-descending basis.
///
/// Built by adding one qubit at a time: the Dicke state with i spins down out of n+1 splits as
///   |n+1,i> = sqrt((n+1-i)/(n+1)) |n,i>|up> + sqrt(i/(n+1)) |n,i-1>|down>,
/// and the rotation factorizes as d^(n) (x) d^(1/2). Every coefficient is bounded by one, so the
/// recursion is stable up to 2j = kMaxWignerTwoJ. Cost is O((2j)^3).
inline MatrixXd wigner_d(const Spin& spin, double beta) {
  const int n_max = spin.two_j();
  if (n_max > kMaxWignerTwoJ) {
    throw ValidationError("wigner_d: 2j = " + std::to_string(n_max) + " exceeds the full-matrix limit " +
                          std::to_string(kMaxWignerTwoJ));
  }
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  // single-qubit factor [[c, -s], [s, c]] in (up, down)
  const double u00 = c, u01 = -s, u10 = s, u11 = c;

  MatrixXd cur = MatrixXd::Ones(1, 1);
  MatrixXd next;
  VectorXd a, b;
  for (int n = 0; n < n_max; ++n) {
    const int m = n + 1;
    a.resize(m + 1);
    b.resize(m + 1);
    for (int i = 0; i <= m; ++i) {
      a(i) = std::sqrt(static_cast<double>(m - i) / m);
      b(i) = std::sqrt(static_cast<double>(i) / m);
    }
    next.setZero(m + 1, m + 1);
    for (int i = 0; i <= m; ++i) {
      for (int k = 0; k <= m; ++k) {
        double v = 0.0;
        if (i < m && k < m) v += a(i) * a(k) * u00 * cur(i, k);
        if (i < m && k > 0) v += a(i) * b(k) * u01 * cur(i, k - 1);
        if (i > 0 && k < m) v += b(i) * a(k) * u10 * cur(i - 1, k);
        if (i > 0 && k > 0) v += b(i) * b(k) * u11 * cur(i - 1, k - 1);
        next(i, k) = v;
      }
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace qmetro
