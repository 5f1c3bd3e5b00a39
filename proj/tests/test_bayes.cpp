#include <gtest/gtest.h>

#include "qmetro/qmetro.hpp"

using namespace qmetro;

TEST(Random, StreamsDependOnlyOnSeedAndIndex) {
  Rng a(7, 3), b(7, 3), c(7, 4);
  for (int k = 0; k < 10; ++k) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  Rng u(1);
  for (int k = 0; k < 1000; ++k) {
    const double x = u.uniform();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Sampling, DeterministicAtQuarterTurnWithoutTwist) {
  // theta = pi/2 rotates the x coherent state onto |j, -j>
  const std::vector<double> mus = sample_outcomes(Spin::from_particles(4), 0.0, pi / 2, 50, 1);
  for (double mu : mus) EXPECT_EQ(mu, -2.0);
}

TEST(Sampling, FrequenciesMatchLikelihood) {
  const Spin spin = Spin::from_particles(4);
  const int p = 20000;
  const std::vector<double> mus = sample_outcomes(spin, 0.0, pi / 3, p, 99);
  const VectorXd prob = likelihood(spin, 0.0, pi / 3);
  for (int i = 0; i < spin.dim(); ++i) {
    const double count = std::count(mus.begin(), mus.end(), spin.mu(i));
    const double sigma = std::sqrt(p * prob(i) * (1 - prob(i)));
    EXPECT_LE(std::abs(count - p * prob(i)), 4 * sigma + 1e-9) << "mu=" << spin.mu(i);
  }
  EXPECT_EQ(mus, sample_outcomes(spin, 0.0, pi / 3, p, 99));
  EXPECT_NE(mus, sample_outcomes(spin, 0.0, pi / 3, p, 100));
  EXPECT_THROW(sample_outcomes(spin, 0.0, 0.1, 0, 1), ValidationError);
}

TEST(Posterior, SingleOutcomeIsNormalizedLikelihoodSlice) {
  const Spin spin = Spin::from_particles(6);
  const ConditionalDistribution dist = likelihood_table(spin, 0.2, midpoint_grid(512));
  const Posterior post = posterior({-1.0}, dist, flat_prior(dist.theta_grid));
  const VectorXd slice = dist.slice(-1.0);
  const VectorXd w = cell_widths(dist.theta_grid);
  EXPECT_NEAR(post.density.cwiseProduct(w).sum(), 1.0, 1e-12);
  EXPECT_GE(post.density.minCoeff(), 0.0);
  const double z = slice.cwiseProduct(w).sum();
  EXPECT_LT((post.density - slice / z).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Posterior, PriorSupportIsRespected) {
  const Spin spin = Spin::from_particles(4);
  const ConditionalDistribution dist = likelihood_table(spin, 0.0, midpoint_grid(256));
  VectorXd prior = VectorXd::Zero(256);
  prior(100) = 1.0;
  const Posterior post = posterior({-2.0, -1.0}, dist, prior);
  EXPECT_NEAR(post.estimate, dist.theta_grid[100], 1e-15);
  EXPECT_LT(post.density.cwiseAbs().sum() - post.density(100), 1e-15);
}

TEST(Posterior, FlagsDegenerateUpdates) {
  const Spin spin = Spin::from_particles(4);
  const ConditionalDistribution dist = likelihood_table(spin, 0.0, midpoint_grid(64, 0.0, 0.05));
  // near theta = 0 the outcome mu = -2 has probability ~1e-20 or less; prior only at the first cell
  VectorXd prior = VectorXd::Zero(64);
  prior(0) = 1.0;
  std::vector<double> outcomes(200, -2.0);
  const Posterior post = posterior(outcomes, dist, prior);
  EXPECT_TRUE(post.degenerate || std::isfinite(post.estimate));
  EXPECT_THROW(posterior({}, dist, prior), ValidationError);
  EXPECT_THROW(posterior({-2.0}, dist, VectorXd::Ones(3)), ValidationError);
}

TEST(Posterior, ConcentratesOnTruth) {
  const Spin spin = Spin::from_particles(4);
  const double truth = 1.0;
  const ConditionalDistribution dist = likelihood_table(spin, 0.0, midpoint_grid(4096, 0.0, pi / 2));
  const Posterior post = posterior(sample_outcomes(spin, 0.0, truth, 1000, 5), dist, flat_prior(dist.theta_grid));
  EXPECT_LT(std::abs(post.estimate - truth), 3 * post.credible_halfwidth);
  EXPECT_LT(post.credible_halfwidth, 0.05);
}

TEST(Statistics, JackknifeOfMeanIsStandardError) {
  const std::vector<double> v{1.0, 4.0, 2.5, 7.0, 3.0, 0.5};
  const double m = mean_of(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  const double se = std::sqrt(ss / (v.size() - 1) / v.size());
  EXPECT_NEAR(jackknife_stderr(v, mean_of), se, 1e-14);
}

TEST(Statistics, ScalingFitRecoversExactLaws) {
  std::vector<SensitivityPoint> pts;
  for (int nt : {100, 200, 400, 800}) {
    SensitivityPoint p;
    p.n_total = nt;
    p.delta_theta = 8.9 / nt;
    pts.push_back(p);
  }
  const ScalingFit f = fit_scaling(pts);
  EXPECT_NEAR(f.slope, -1.0, 1e-12);
  EXPECT_NEAR(f.constant, 8.9, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 8.9, 1e-10);
}

TEST(Sensitivity, SingleQubitReachesShotNoise) {
  // classical Fisher information of one qubit is 1 for every theta, so Delta theta -> 1/sqrt(p)
  SensitivityOptions opt;
  opt.prior_hi = pi / 2;
  opt.grid_points = 4096;
  opt.metric = SensitivityMetric::RmsError;
  const int p = 100;
  const SensitivityPoint pt = sensitivity(1, 0.0, pi / 4, p, 400, 2024, opt);
  EXPECT_NEAR(pt.delta_theta * std::sqrt(double(p)), 1.0, 0.15);
  EXPECT_EQ(pt.delta_theta, pt.rms_error);
}

TEST(Sensitivity, Deterministic) {
  SensitivityOptions opt;
  opt.grid_points = 1024;
  const SensitivityPoint a = sensitivity(10, 0.3, pi / 2, 10, 20, 77, opt);
  const SensitivityPoint b = sensitivity(10, 0.3, pi / 2, 10, 20, 77, opt);
  EXPECT_EQ(a.delta_theta, b.delta_theta);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NE(a.delta_theta, sensitivity(10, 0.3, pi / 2, 10, 20, 78, opt).delta_theta);
}

TEST(Sensitivity, RespectsQuantumCramerRao) {
  SensitivityOptions opt;
  opt.grid_points = 4096;
  for (int n : {5, 10, 20}) {
    const double tau = 1.0 / std::sqrt(double(n));
    const SensitivityPoint pt = sensitivity(n, tau, pi / 2, 20, 100, 11, opt);
    EXPECT_GE(pt.delta_theta, (1 - 3 * pt.std_error / pt.delta_theta) * qcr_bound(n, tau, 20)) << "N=" << n;
  }
}

TEST(Sensitivity, ValidatesArguments) {
  EXPECT_THROW(sensitivity(0, 0.0, 1.0, 1, 10, 1), ValidationError);
  EXPECT_THROW(sensitivity(2, 0.0, 1.0, 0, 10, 1), ValidationError);
  EXPECT_THROW(sensitivity(2, 0.0, 1.0, 1, 1, 1), ValidationError);
  SensitivityOptions bad;
  bad.prior_hi = 4.0;
  EXPECT_THROW(sensitivity(2, 0.0, 1.0, 1, 10, 1, bad), ValidationError);
  EXPECT_THROW(heisenberg_fit({10, 20}, TauRule::inverse_sqrt_n(), pi / 2, 5, 10, 1), ValidationError);
  EXPECT_THROW(heisenberg_fit({10, 20, 30}, TauRule::inverse_sqrt_n(), pi / 2, 5, 10, 1), ValidationError);
}

TEST(Sweep, SkipsNonDivisorsAndFindsMinimum) {
  SensitivityOptions opt;
  opt.grid_points = 1024;
  const PSweep s = p_sweep(60, TauRule::inverse_sqrt_n(), pi / 2, {4, 7, 10, 60}, 20, 3, opt);
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_EQ(s.skipped, std::vector<int>{7});
  for (const auto& pt : s.points) EXPECT_EQ(pt.n * pt.p, 60);
  const int best = find_p_opt(s);
  for (const auto& pt : s.points) {
    if (pt.p == best) {
      for (const auto& other : s.points) EXPECT_LE(pt.delta_theta, other.delta_theta);
    }
  }
}

TEST(ErrorPropagation, PlateauMomentEstimatorIsShotNoiseOrWorse) {
  const int n = 20;
  const double tau = pi / 4;
  const double ep = error_propagation_sensitivity(n, tau);
  EXPECT_GE(ep, 1.0 / std::sqrt(double(n)));
  // the coherent state reaches shot noise with the same estimator
  EXPECT_NEAR(error_propagation_sensitivity(n, 0.0, 2048), 1.0 / std::sqrt(double(n)), 1e-3);
  SensitivityOptions opt;
  opt.grid_points = 4096;
  const int p = 20;
  const SensitivityPoint bayes = sensitivity(n, tau, pi / 2, p, 100, 19, opt);
  EXPECT_LT(bayes.delta_theta * std::sqrt(double(p)), ep);
}
