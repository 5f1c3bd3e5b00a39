#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "interferometer.hpp"
#include "random.hpp"
#include "witness.hpp"

namespace qmetro {

inline constexpr double kCredibleMass = 0.6827;

struct Posterior {
  std::vector<double> theta_grid;
  VectorXd density;  // normalized: sum density * cell width = 1
  double estimate = std::numeric_limits<double>::quiet_NaN();            // posterior mean
  double credible_halfwidth = std::numeric_limits<double>::quiet_NaN();  // central 68.27% interval
  bool degenerate = false;
};

/// Midpoint-rule cell widths of a grid whose points are cell centres.
inline VectorXd cell_widths(const std::vector<double>& grid) {
  const int g = static_cast<int>(grid.size());
  VectorXd w(g);
  if (g == 1) {
    w(0) = 1.0;
    return w;
  }
  for (int k = 0; k < g; ++k) {
    const double left = k > 0 ? 0.5 * (grid[k] - grid[k - 1]) : 0.5 * (grid[1] - grid[0]);
    const double right = k + 1 < g ? 0.5 * (grid[k + 1] - grid[k]) : 0.5 * (grid[g - 1] - grid[g - 2]);
    w(k) = left + right;
  }
  return w;
}

inline VectorXd flat_prior(const std::vector<double>& grid) { return VectorXd::Ones(static_cast<Eigen::Index>(grid.size())); }

using LogTable = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline LogTable log_likelihood(const ConditionalDistribution& dist) {
  LogTable out(dist.rows(), dist.cols());
  for (int i = 0; i < dist.rows(); ++i)
    for (int g = 0; g < dist.cols(); ++g) {
      const double p = dist.table(i, g);
      out(i, g) = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    }
  return out;
}

namespace detail {

inline double quantile(const VectorXd& mass, const std::vector<double>& grid, const VectorXd& widths, double q) {
  double cum = 0.0;
  const int g = static_cast<int>(mass.size());
  for (int k = 0; k < g; ++k) {
    if (mass(k) > 0.0 && cum + mass(k) >= q) {
      const double left = grid[k] - 0.5 * widths(k);
      return left + (q - cum) / mass(k) * widths(k);
    }
    cum += mass(k);
  }
  return grid.back() + 0.5 * widths(g - 1);
}

inline Posterior finish_posterior(VectorXd logpost, const std::vector<double>& grid) {
  Posterior out;
  out.theta_grid = grid;
  const double top = logpost.maxCoeff();
  if (!std::isfinite(top)) {
    out.degenerate = true;
    out.density = VectorXd::Zero(logpost.size());
    return out;
  }
  const VectorXd widths = cell_widths(grid);
  VectorXd dens = (logpost.array() - top).exp().matrix();
  const double z = dens.dot(widths);
  dens /= z;
  const VectorXd mass = dens.cwiseProduct(widths);
  double mean = 0.0;
  for (Eigen::Index k = 0; k < mass.size(); ++k) mean += mass(k) * grid[k];
  out.estimate = mean;
  const double tail = 0.5 * (1.0 - kCredibleMass);
  out.credible_halfwidth =
      0.5 * (quantile(mass, grid, widths, 1.0 - tail) - quantile(mass, grid, widths, tail));
  out.density = std::move(dens);
  return out;
}

}  // namespace detail

/// Posterior from outcome counts per mu-index: prior * prod_k P(mu_k | theta), accumulated in log space.
inline Posterior posterior_from_counts(const std::vector<int>& counts, const LogTable& log_lik,
                                       const std::vector<double>& grid, const VectorXd& prior) {
  if (static_cast<Eigen::Index>(grid.size()) != log_lik.cols() || prior.size() != log_lik.cols()) {
    throw ValidationError("posterior: prior, grid and likelihood table disagree in size");
  }
  if (static_cast<Eigen::Index>(counts.size()) != log_lik.rows()) throw ValidationError("posterior: counts have the wrong length");
  if (std::accumulate(counts.begin(), counts.end(), 0) <= 0) throw ValidationError("posterior: no outcomes");
  if ((prior.array() < 0.0).any()) throw ValidationError("posterior: prior must be non-negative");
  VectorXd lp(prior.size());
  for (Eigen::Index g = 0; g < lp.size(); ++g)
    lp(g) = prior(g) > 0.0 ? std::log(prior(g)) : -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double c = counts[i];
    for (Eigen::Index g = 0; g < lp.size(); ++g) {
      const double l = log_lik(static_cast<Eigen::Index>(i), g);
      lp(g) += std::isinf(l) ? l : c * l;
    }
  }
  return detail::finish_posterior(std::move(lp), grid);
}

/// Posterior for a list of measured mu values.
inline Posterior posterior(const std::vector<double>& outcomes, const ConditionalDistribution& dist,
                           const VectorXd& prior) {
  if (outcomes.empty()) throw ValidationError("posterior: outcomes must be non-empty");
  std::vector<int> counts(dist.rows(), 0);
  for (double mu : outcomes) ++counts[dist.spin.index_of(mu)];
  return posterior_from_counts(counts, log_likelihood(dist), dist.theta_grid, prior);
}

/// p inverse-CDF draws of outcome indices from a probability column.
inline std::vector<int> sample_indices(const VectorXd& column, int p, Rng& rng) {
  std::vector<double> cdf(column.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    acc += std::max(0.0, column(i));
    cdf[i] = acc;
  }
  std::vector<int> out(p);
  for (int k = 0; k < p; ++k) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    out[k] = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), column.size() - 1));
  }
  return out;
}

/// p independent measurement results mu drawn from P(mu | j, theta_true, tau).
inline std::vector<double> sample_outcomes(const Spin& spin, double tau, double theta_true, int p, std::uint64_t seed) {
  if (p < 1) throw ValidationError("sample_outcomes: p must be >= 1");
  Rng rng(seed);
  const VectorXd col = likelihood(spin, tau, theta_true);
  std::vector<double> mus;
  mus.reserve(p);
  for (int i : sample_indices(col, p, rng)) mus.push_back(spin.mu(i));
  return mus;
}

/// Leave-one-out jackknife standard error of `stat` over per-trial values.
inline double jackknife_stderr(const std::vector<double>& values,
                               const std::function<double(const std::vector<double>&)>& stat) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  std::vector<double> loo(n);
  std::vector<double> sub(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) sub[w++] = values[k];
    loo[i] = stat(sub);
  }
  const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : loo) ss += (x - mean) * (x - mean);
  return std::sqrt((n - 1.0) / n * ss);
}

inline double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

inline double rms_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / v.size());
}

enum class SensitivityMetric { CredibleHalfwidth, RmsError };

struct SensitivityOptions {
  int grid_points = 8192;
  double prior_lo = 0.0;
  double prior_hi = pi;
  SensitivityMetric metric = SensitivityMetric::CredibleHalfwidth;
};

struct SensitivityPoint {
  int n = 0;        // particles per shot
  int p = 0;        // shots per estimate
  int n_total = 0;  // n * p
  int trials = 0;
  double tau = 0.0;
  double delta_theta = 0.0;  // selected metric
  double std_error = 0.0;      // jackknife stderr of delta_theta
  double credible_halfwidth = 0.0;
  double credible_stderr = 0.0;
  double rms_error = 0.0;
  double rms_stderr = 0.0;
  int degenerate_trials = 0;
};

/// Monte-Carlo phase sensitivity of the Bayesian estimator. Trial t draws from stream (seed, t),
/// so results do not depend on evaluation order.
inline SensitivityPoint sensitivity(int n, double tau, double theta_true, int p, int trials, std::uint64_t seed,
                                    const SensitivityOptions& opt = {}) {
  if (n < 1) throw ValidationError("sensitivity: N must be >= 1");
  if (p < 1) throw ValidationError("sensitivity: p must be >= 1");
  if (trials < 2) throw ValidationError("sensitivity: trials must be >= 2");
  if (!(opt.prior_lo >= 0.0 && opt.prior_hi <= pi && opt.prior_lo < opt.prior_hi)) {
    throw ValidationError("sensitivity: prior support must be a sub-interval of [0, pi]");
  }
  const Spin spin = Spin::from_particles(n);
  const std::vector<double> grid = midpoint_grid(opt.grid_points, opt.prior_lo, opt.prior_hi);
  const ConditionalDistribution dist = likelihood_table(spin, tau, grid);
  const LogTable log_lik = log_likelihood(dist);
  const VectorXd column = likelihood_table(spin, tau, {theta_true}).table.col(0);
  const VectorXd prior = flat_prior(grid);

  std::vector<double> widths;
  std::vector<double> errors;
  widths.reserve(trials);
  errors.reserve(trials);
  SensitivityPoint out;
  std::vector<int> counts(spin.dim());
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    std::fill(counts.begin(), counts.end(), 0);
    for (int i : sample_indices(column, p, rng)) ++counts[i];
    const Posterior post = posterior_from_counts(counts, log_lik, grid, prior);
    if (post.degenerate) {
      ++out.degenerate_trials;
      continue;
    }
    widths.push_back(post.credible_halfwidth);
    errors.push_back(post.estimate - theta_true);
  }
  if (widths.size() < 2) throw ValidationError("sensitivity: posterior degenerate in almost every trial");

  out.n = n;
  out.p = p;
  out.n_total = n * p;
  out.trials = trials;
  out.tau = tau;
  out.credible_halfwidth = mean_of(widths);
  out.credible_stderr = jackknife_stderr(widths, mean_of);
  out.rms_error = rms_of(errors);
  out.rms_stderr = jackknife_stderr(errors, rms_of);
  if (opt.metric == SensitivityMetric::CredibleHalfwidth) {
    out.delta_theta = out.credible_halfwidth;
    out.std_error = out.credible_stderr;
  } else {
    out.delta_theta = out.rms_error;
    out.std_error = out.rms_stderr;
  }
  return out;
}

/// tau as a function of N: a constant, or scale / sqrt(N).
struct TauRule {
  enum class Kind { Fixed, InverseSqrtN };
  Kind kind = Kind::InverseSqrtN;
  double value = 1.0;

  static TauRule fixed(double tau) { return {Kind::Fixed, tau}; }
  static TauRule inverse_sqrt_n(double scale = 1.0) { return {Kind::InverseSqrtN, scale}; }

  double at(int n) const { return kind == Kind::Fixed ? value : value / std::sqrt(static_cast<double>(n)); }
};

struct PSweep {
  int n_total = 0;
  std::vector<SensitivityPoint> points;
  std::vector<int> skipped;  // p values that do not divide n_total
};

/// Sensitivity vs p at fixed total particle number, N = n_total / p.
inline PSweep p_sweep(int n_total, const TauRule& rule, double theta_true, const std::vector<int>& p_list, int trials,
                      std::uint64_t seed, const SensitivityOptions& opt = {}) {
  if (n_total < 1) throw ValidationError("p_sweep: N_T must be >= 1");
  PSweep out;
  out.n_total = n_total;
  for (int p : p_list) {
    if (p < 1 || n_total % p != 0) {
      out.skipped.push_back(p);
      continue;
    }
    const int n = n_total / p;
    out.points.push_back(sensitivity(n, rule.at(n), theta_true, p, trials, stream_seed(seed, static_cast<std::uint64_t>(p)), opt));
  }
  return out;
}

inline int find_p_opt(const PSweep& sweep) {
  if (sweep.points.empty()) throw ValidationError("find_p_opt: empty sweep");
  const auto it = std::min_element(sweep.points.begin(), sweep.points.end(),
                                   [](const SensitivityPoint& a, const SensitivityPoint& b) { return a.delta_theta < b.delta_theta; });
  return it->p;
}

struct ScalingFit {
  std::vector<SensitivityPoint> points;
  double slope = 0.0;           // d log(delta_theta) / d log(N_T)
  double intercept = 0.0;       // free fit: delta_theta = exp(intercept) N_T^slope
  double constant = 0.0;        // c in delta_theta = c / N_T (slope fixed at -1)
  double constant_sqrt = 0.0;   // c in delta_theta = c / sqrt(N_T) (slope fixed at -1/2)
};

inline ScalingFit fit_scaling(std::vector<SensitivityPoint> points) {
  if (points.size() < 2) throw ValidationError("fit_scaling: need at least two points");
  ScalingFit f;
  const double m = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, c1 = 0, c2 = 0;
  for (const auto& pt : points) {
    const double x = std::log(static_cast<double>(pt.n_total));
    const double y = std::log(pt.delta_theta);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    c1 += y + x;
    c2 += y + 0.5 * x;
  }
  f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / m;
  f.constant = std::exp(c1 / m);
  f.constant_sqrt = std::exp(c2 / m);
  f.points = std::move(points);
  return f;
}

/// Sensitivity at N_T = N p for each N in n_list and a log-log fit against N_T.
inline ScalingFit heisenberg_fit(const std::vector<int>& n_list, const TauRule& rule, double theta_true, int p,
                                 int trials, std::uint64_t seed, const SensitivityOptions& opt = {}) {
  if (n_list.size() < 3) throw ValidationError("heisenberg_fit: need at least three N values");
  const auto [lo, hi] = std::minmax_element(n_list.begin(), n_list.end());
  if (*hi < 4 * *lo) throw ValidationError("heisenberg_fit: N values must span at least a factor 4");
  std::vector<SensitivityPoint> pts;
  for (int n : n_list) pts.push_back(sensitivity(n, rule.at(n), theta_true, p, trials, stream_seed(seed, static_cast<std::uint64_t>(n)), opt));
  return fit_scaling(std::move(pts));
}

/// Quantum Cramer-Rao bound 1 / sqrt(p F_Q) for p shots of the twisted state, rotation about y.
inline double qcr_bound(int n, double tau, int p) {
  const double fq = qfi_pure(twisted_state(Spin::from_particles(n), tau), Direction::unit_y());
  return 1.0 / std::sqrt(p * fq);
}

/// Single-shot error-propagation sensitivity of the <Jz> estimator, Delta Jz / |d<Jz>/dtheta|,
/// minimized over a theta grid. d<Jz>/dtheta = -<Jx>(theta) for exp(-i theta Jy).
inline double error_propagation_sensitivity(int n, double tau, int grid_points = 512) {
  const Spin spin = Spin::from_particles(n);
  const SpinMatrices j = spin_matrices(spin);
  const DickeState psi = twisted_state(spin, tau);
  const CollectiveOperator jy = angular_momentum(spin, Direction::unit_y());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(jy.matrix);
  const VectorXcd c = es.eigenvectors().adjoint() * psi.amplitudes();
  double best = kInf;
  for (double theta : midpoint_grid(grid_points)) {
    VectorXcd ph(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) ph(k) = std::polar(1.0, -theta * es.eigenvalues()(k)) * c(k);
    const DickeState out = DickeState::normalized(spin, es.eigenvectors() * ph);
    const double slope = std::abs(expectation(out, j.jx));
    if (slope <= 0.0) continue;
    best = std::min(best, std::sqrt(variance(out, j.jz)) / slope);
  }
  return best;
}

}  // namespace qmetro
