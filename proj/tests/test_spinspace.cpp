#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qmetro/qmetro.hpp"

using namespace qmetro;

namespace {

double max_abs(const MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

const std::vector<int> kTwoJs = {1, 2, 3, 4, 7, 10, 15, 20, 41, 100, 199, 399, 400};

}  // namespace

TEST(Spin, ValidatesQuantumNumber) {
  EXPECT_EQ(Spin::from_j(7.5).two_j(), 15);
  EXPECT_EQ(Spin::from_j(7.5).dim(), 16);
  EXPECT_EQ(Spin::from_particles(4).j(), 2.0);
  EXPECT_THROW(Spin::from_j(-1.0), ValidationError);
  EXPECT_THROW(Spin::from_j(0.3), ValidationError);
  EXPECT_THROW(Spin::from_particles(0), ValidationError);
  const Spin s = Spin::from_j(2.5);
  for (int i = 0; i < s.dim(); ++i) EXPECT_EQ(s.index_of(s.mu(i)), i);
  EXPECT_EQ(s.mu(0), 2.5);
  EXPECT_THROW(s.index_of(3.5), ValidationError);
  EXPECT_THROW(s.index_of(0.0), ValidationError);
}

TEST(Direction, RejectsNonUnitVectors) {
  EXPECT_THROW(Direction(1.0, 1.0, 0.0), ValidationError);
  EXPECT_THROW(Direction::normalized(0.0, 0.0, 0.0), ValidationError);
  const Direction d = Direction::normalized(1.0, 1.0, 0.0);
  EXPECT_NEAR(d.x(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(Direction::from_angles(d.polar(), d.azimuth()).dot(d), 1.0, 1e-15);
}

TEST(AngularMomentum, SpinHalfIsHalfPauli) {
  const auto jz = angular_momentum(0.5, Direction::unit_z());
  EXPECT_NEAR(std::abs(jz.matrix(0, 0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(jz.matrix(1, 1) + 0.5), 0.0, 1e-15);
  const auto jx = angular_momentum(1.0, Direction::unit_x());
  EXPECT_NEAR(jx.matrix(0, 1).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(jx.matrix(1, 2).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(jx.matrix(0, 0)), 0.0, 1e-15);
}

TEST(AngularMomentum, MatchesQubitSpaceProjection) {
  Rng rng(11);
  for (int n = 1; n <= 6; ++n) {
    const Spin spin = Spin::from_particles(n);
    const MatrixXcd v = oracle::dicke_isometry(n);
    for (int k = 0; k < 4; ++k) {
      const Direction axis = k < 3 ? std::array{Direction::unit_x(), Direction::unit_y(), Direction::unit_z()}[k]
                                   : random_direction(rng);
      const MatrixXcd ref = v.adjoint() * oracle::collective(n, axis) * v;
      EXPECT_LT(max_abs(angular_momentum(spin, axis).matrix - ref), 1e-12) << "N=" << n;
    }
  }
}

TEST(AngularMomentum, CommutatorsAndCasimir) {
  const cplx i(0, 1);
  for (int tj : kTwoJs) {
    const Spin spin(tj);
    const SpinMatrices m = spin_matrices(spin);
    const double j = spin.j();
    const double scale = std::max(1.0, j * j);
    EXPECT_LT(max_abs(m.jx * m.jy - m.jy * m.jx - i * m.jz), 1e-10 * scale) << "2j=" << tj;
    EXPECT_LT(max_abs(m.jy * m.jz - m.jz * m.jy - i * m.jx), 1e-10 * scale) << "2j=" << tj;
    EXPECT_LT(max_abs(m.jz * m.jx - m.jx * m.jz - i * m.jy), 1e-10 * scale) << "2j=" << tj;
    const MatrixXcd casimir = m.jx * m.jx + m.jy * m.jy + m.jz * m.jz;
    EXPECT_LT(max_abs(casimir - j * (j + 1) * MatrixXcd::Identity(spin.dim(), spin.dim())), 1e-10 * scale);
  }
}

TEST(AngularMomentum, SpectrumIsMinusJToJ) {
  Rng rng(5);
  for (int tj : {1, 4, 9, 20, 40}) {
    const Spin spin(tj);
    const Direction axis = random_direction(rng);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(angular_momentum(spin, axis).matrix, Eigen::EigenvaluesOnly);
    for (int k = 0; k < spin.dim(); ++k) EXPECT_NEAR(es.eigenvalues()(k), -spin.j() + k, 1e-9);
  }
}

TEST(CoherentSpinState, Examples) {
  const DickeState half = coherent_spin_state(0.5, Direction::unit_x());
  EXPECT_NEAR(std::abs(half.amplitudes()(0) - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(half.amplitudes()(1) - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
  const DickeState one = coherent_spin_state(1.0, Direction::unit_x());
  EXPECT_NEAR(std::abs(one.amplitudes()(0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(one.amplitudes()(1) - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(one.amplitudes()(2) - 0.5), 0.0, 1e-15);
  const DickeState up = coherent_spin_state(3.0, Direction::unit_z());
  EXPECT_NEAR(std::abs(up.amplitude(3.0)), 1.0, 1e-15);
}

TEST(CoherentSpinState, MatchesProductOfQubits) {
  Rng rng(21);
  for (int n = 1; n <= 6; ++n) {
    const Direction axis = random_direction(rng);
    const VectorXcd embedded = oracle::dicke_isometry(n) * coherent_spin_state(Spin::from_particles(n), axis).amplitudes();
    const VectorXcd product = oracle::product_state(n, oracle::qubit_along(axis));
    EXPECT_LT(oracle::phase_distance(embedded, product), 1e-12) << "N=" << n;
  }
}

TEST(CoherentSpinState, IsMaximalEigenvector) {
  Rng rng(3);
  for (int tj : {1, 2, 5, 16, 60, 200}) {
    const Spin spin(tj);
    for (int k = 0; k < 10; ++k) {
      const Direction axis = random_direction(rng);
      const DickeState css = coherent_spin_state(spin, axis);
      const VectorXcd r = angular_momentum(spin, axis).matrix * css.amplitudes() - spin.j() * css.amplitudes();
      EXPECT_LT(r.norm(), 1e-10) << "2j=" << tj;
    }
  }
}

TEST(CoherentSpinState, LargeSpinStaysFinite) {
  const DickeState css = coherent_spin_state(Spin::from_particles(10000), Direction::unit_x());
  EXPECT_TRUE(css.amplitudes().allFinite());
  EXPECT_NEAR(css.amplitudes().squaredNorm(), 1.0, 1e-12);
  EXPECT_NEAR(css.probabilities()(5000), css.probabilities().maxCoeff(), 1e-15);
}

TEST(Rotation, ZeroAngleIsIdentity) {
  const Spin spin(9);
  EXPECT_LT(max_abs(rotation_matrix(spin, Direction::unit_y(), 0.0) - MatrixXcd::Identity(10, 10)), 1e-14);
  EXPECT_LT(max_abs(rotation_matrix(spin, Direction::unit_x(), 0.0) - MatrixXcd::Identity(10, 10)), 1e-12);
}

TEST(Rotation, QuarterTurnAboutYTakesZToX) {
  for (int tj : {1, 6, 15, 100}) {
    const Spin spin(tj);
    const DickeState out = rotate(DickeState::basis(spin, spin.j()), Direction::unit_y(), pi / 2);
    EXPECT_LT((out.amplitudes() - coherent_spin_state(spin, Direction::unit_x()).amplitudes()).norm(), 1e-12);
  }
}

TEST(Rotation, MatchesQubitSpaceExponential) {
  Rng rng(8);
  for (int n = 1; n <= 5; ++n) {
    const Spin spin = Spin::from_particles(n);
    for (int k = 0; k < 3; ++k) {
      const Direction axis = k == 0 ? Direction::unit_y() : random_direction(rng);
      const double angle = 2 * pi * rng.uniform() - pi;
      EXPECT_LT(max_abs(rotation_matrix(spin, axis, angle) - oracle::rotation(n, axis, angle)), 1e-12) << "N=" << n;
    }
  }
}

TEST(Rotation, WignerAgreesWithSpectral) {
  for (int tj : {1, 2, 11, 40, 101, 200}) {
    const Spin spin(tj);
    for (double beta : {0.3, 1.2, pi / 2, 2.9}) {
      const MatrixXcd w = wigner_d(spin, beta).cast<cplx>();
      const MatrixXcd s = rotation_matrix_spectral(spin, Direction::unit_y(), beta);
      EXPECT_LT(max_abs(w - s), 1e-9) << "2j=" << tj << " beta=" << beta;
    }
  }
  EXPECT_THROW(wigner_d(Spin(1001), 0.1), ValidationError);
}

TEST(Rotation, ComposesAndInverts) {
  Rng rng(13);
  const Spin spin(12);
  const DickeState psi = random_pure_state(spin, rng);
  for (int k = 0; k < 5; ++k) {
    const Direction axis = random_direction(rng);
    const double a = rng.uniform() * 3, b = rng.uniform() * 3;
    const DickeState two = rotate(rotate(psi, axis, a), axis, b);
    const DickeState one = rotate(psi, axis, a + b);
    EXPECT_LT((two.amplitudes() - one.amplitudes()).norm(), 1e-10);
    EXPECT_LT((rotate(rotate(psi, axis, a), axis, -a).amplitudes() - psi.amplitudes()).norm(), 1e-10);
  }
  const DickeState y1 = rotate_wigner_y(psi, 0.7);
  EXPECT_LT((y1.amplitudes() - rotate_spectral(psi, Direction::unit_y(), 0.7).amplitudes()).norm(), 1e-11);
}

TEST(Rotation, DensityConsistentWithStates) {
  Rng rng(17);
  const Spin spin(7);
  const DickeState psi = random_pure_state(spin, rng);
  const Direction axis = random_direction(rng);
  const DensityOperator a = rotate_density(DensityOperator::from_pure(psi), axis, 0.9);
  const DensityOperator b = DensityOperator::from_pure(rotate(psi, axis, 0.9));
  EXPECT_LT(max_abs(a.matrix() - b.matrix()), 1e-12);

  const DensityOperator mixed = DensityOperator::maximally_mixed(spin);
  EXPECT_LT(max_abs(rotate_density(mixed, axis, 1.3).matrix() - mixed.matrix()), 1e-14);

  const DensityOperator rho = random_full_rank_density(spin, rng);
  const VectorXd before = rho.eigenvalues();
  const VectorXd after = rotate_density(rho, axis, 2.1).eigenvalues();
  EXPECT_LT((before - after).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(States, ValidationReportsTheInvariant) {
  const Spin spin(1);
  VectorXcd v(2);
  v << 1.0, 1.0;
  EXPECT_THROW(DickeState(spin, v), ValidationError);
  EXPECT_THROW(DickeState(spin, VectorXcd::Zero(3)), ValidationError);
  EXPECT_THROW(DickeState::normalized(spin, VectorXcd::Zero(2)), ValidationError);

  const auto message = [&](const MatrixXcd& m) {
    try {
      DensityOperator rho(spin, m);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  MatrixXcd m(2, 2);
  m << 0.5, 0.3, 0.1, 0.5;
  EXPECT_NE(message(m).find("Hermitian"), std::string::npos);
  m << 0.7, 0.0, 0.0, 0.7;
  EXPECT_NE(message(m).find("trace"), std::string::npos);
  m << 1.5, 0.0, 0.0, -0.5;
  EXPECT_NE(message(m).find("positive semidefinite"), std::string::npos);
}

TEST(States, RandomGeneratorsAreValidAndSeeded) {
  const ProductState a = random_product_state(6, 42);
  const ProductState b = random_product_state(6, 42);
  EXPECT_TRUE(a.axis.approx_equal(b.axis));
  EXPECT_EQ(a.state.amplitudes(), b.state.amplitudes());

  const DensityOperator single = random_separable_density(4, 1, 9);
  EXPECT_NEAR(single.purity(), 1.0, 1e-12);
  const DensityOperator mix = random_separable_density(4, 5, 9);
  EXPECT_LT(mix.purity(), 1.0);
  EXPECT_GT(mix.eigenvalues().minCoeff(), -1e-12);
  EXPECT_NEAR(mix.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_EQ(mix.matrix(), random_separable_density(4, 5, 9).matrix());
}

TEST(Serialization, RoundTrips) {
  Rng rng(23);
  for (int tj : {1, 4, 9}) {
    const Spin spin(tj);
    const DickeState psi = random_pure_state(spin, rng);
    const DickeState psi2 = state_from_json(json::parse(to_json(psi).dump()));
    EXPECT_EQ(psi2.spin().two_j(), tj);
    EXPECT_LT((psi2.amplitudes() - psi.amplitudes()).norm(), 1e-15);
    const DensityOperator rho = random_full_rank_density(spin, rng);
    const DensityOperator rho2 = density_from_json(json::parse(to_json(rho).dump()));
    EXPECT_LT(max_abs(rho2.matrix() - rho.matrix()), 1e-15);
  }
  json bad = to_json(DensityOperator::maximally_mixed(Spin(2)));
  bad["matrix"][0][0] = json::array({0.9, 0.0});
  EXPECT_THROW(density_from_json(bad), ValidationError);
}
