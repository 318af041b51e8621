#include "fnl/ensembles.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fnl/parallel.hpp"
#include "fnl/quadrature.hpp"

namespace fnl {

Eigen::MatrixXd sample_haar_orthogonal(int dim, Rng& rng) {
  if (dim < 2 || dim % 2 != 0)
    throw std::invalid_argument("sample_haar_orthogonal: dim must be even and >= 2");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  if (std::uniform_int_distribution<int>(0, 1)(rng) == 1) q.col(0) *= -1.0;
  return q;
}

JacobiKernelParams::JacobiKernelParams(int n, int ell) : total_modes(n), subsystem(ell) {
  if (ell < 1 || 2 * ell > n)
    throw std::invalid_argument("JacobiKernelParams: need 1 <= ell <= N/2");
}

namespace {

// log h_n for the weight x^{-1/2} (1-x)^b:
//   h_n = Gamma(n+1/2) Gamma(n+b+1) / [(2n+b+1/2) Gamma(n+1) Gamma(n+b+1/2)].
// The weight exponent on (1-x) is fixed to the integer b = N - 2 ell by the
// exact moment identity E[sum x_i] = ell(2 ell - 1)/(2N - 1) of Haar states,
// verified against Monte Carlo down to N = 2.
double log_hn(int n, int b) {
  return std::lgamma(n + 0.5) + std::lgamma(n + b + 1.0) - std::log(2.0 * n + b + 0.5) -
         std::lgamma(n + 1.0) - std::lgamma(n + b + 0.5);
}

// Jacobi polynomials P_n^(a,b)(y) for n = 0..count-1 by the three-term
// recurrence.
void jacobi_all(double y, double a, double b, int count, std::vector<double>& out) {
  out.resize(count);
  if (count == 0) return;
  out[0] = 1.0;
  if (count == 1) return;
  out[1] = (a + 1.0) + (a + b + 2.0) * (y - 1.0) / 2.0;
  for (int n = 2; n < count; ++n) {
    const double c1 = 2.0 * n * (n + a + b) * (2.0 * n + a + b - 2.0);
    const double c2 = (2.0 * n + a + b - 1.0) *
                      ((2.0 * n + a + b) * (2.0 * n + a + b - 2.0) * y + a * a - b * b);
    const double c3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * (2.0 * n + a + b);
    out[n] = (c2 * out[n - 1] - c3 * out[n - 2]) / c1;
  }
}

double kernel_sum(double x, const JacobiKernelParams& params, std::vector<double>& scratch) {
  const int ell = params.subsystem;
  const int b = params.exponent();
  jacobi_all(1.0 - 2.0 * x, -0.5, b, ell, scratch);
  double sum = 0.0;
  for (int n = 0; n < ell; ++n) {
    const double p = scratch[n] * std::exp(-0.5 * log_hn(n, b));
    sum += p * p;
  }
  return sum;
}

}  // namespace

double jacobi_density(double x, const JacobiKernelParams& params) {
  if (!(x > 0.0 && x < 1.0))
    throw std::invalid_argument("jacobi_density: x must lie strictly inside (0, 1)");
  const int b = params.exponent();
  std::vector<double> scratch;
  const double w = std::pow(1.0 - x, b) * std::pow(x, -0.5);
  return w * kernel_sum(x, params, scratch);
}

double page_curve_finite(const JacobiKernelParams& params, const WeightOrder& alpha) {
  const int b = params.exponent();
  std::vector<double> scratch;
  // x = sin^2(phi): weight * dx = 2 cos(phi)^{2b+1} d(phi), the endpoint
  // singularity gone.
  auto integrand = [&](double phi) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const double x = s * s;
    return 2.0 * std::pow(c, 2 * b + 1) * kernel_sum(x, params, scratch) *
           magic_weight(alpha, x);
  };
  auto res = integrate_adaptive(integrand, 0.0, M_PI_2, 1e-9, std::max(8, params.subsystem / 2), 16);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "page_curve_finite: quadrature did not converge (achieved " << res.achieved_tol << ")";
    throw std::runtime_error(msg.str());
  }
  return res.value;
}

double page_curve_asymptotic(double r, const WeightOrder& alpha) {
  if (!(r > 0.0 && r <= 0.5)) throw std::invalid_argument("page_curve_asymptotic: r in (0, 1/2]");
  const double c = 4.0 * r * (1.0 - r);
  auto integrand = [&](double th) {
    const double s2 = std::sin(th) * std::sin(th);
    const double c2 = 1.0 - s2;
    // 1 - c sin^2 = cos^2 + (1-c) sin^2 keeps the half-cut case c = 1 stable.
    const double denom = c2 + (1.0 - c) * s2;
    return c2 / denom * magic_weight(alpha, c * s2);
  };
  auto res = integrate_adaptive(integrand, 0.0, M_PI_2, 1e-10, 8, 18);
  if (!res.converged) throw std::runtime_error("page_curve_asymptotic: quadrature did not converge");
  return c / M_PI * res.value;
}

double small_r_coefficient(const WeightOrder& alpha) {
  return alpha.alpha / ((alpha.alpha - 1.0) * 2.0 * M_LN2);
}

std::vector<PageCurvePoint> monte_carlo_page(int total_modes, const std::vector<int>& ell_grid,
                                             const WeightOrder& alpha,
                                             const MonteCarloOptions& opts) {
  if (opts.samples < 2) throw std::invalid_argument("monte_carlo_page: need samples >= 2");
  const CovarianceMatrix vacuum = vacuum_covariance(total_modes);
  std::vector<std::vector<double>> values(ell_grid.size(),
                                          std::vector<double>(opts.samples, 0.0));
  parallel_for(opts.samples, opts.threads, [&](std::size_t s) {
    Rng rng = derive_stream(opts.seed, s);
    Eigen::MatrixXd o = sample_haar_orthogonal(2 * total_modes, rng);
    CovarianceMatrix gamma = conjugate(vacuum, o);
    for (std::size_t gi = 0; gi < ell_grid.size(); ++gi) {
      auto part = BipartitionSpec::prefix(ell_grid[gi], total_modes);
      FnlOptions fopts;
      fopts.check_purity = false;  // orthogonal conjugation of a pure state
      values[gi][s] = fnl_magic(gamma, part, alpha, fopts) / total_modes;
    }
  });

  std::vector<PageCurvePoint> points(ell_grid.size());
  for (std::size_t gi = 0; gi < ell_grid.size(); ++gi) {
    const auto& v = values[gi];
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= (v.size() - 1.0);
    points[gi].r = static_cast<double>(ell_grid[gi]) / total_modes;
    points[gi].density = mean;
    points[gi].stderr_density = std::sqrt(var / v.size());
  }
  return points;
}

Eigen::MatrixXd syk2_sample(const Syk2Config& cfg, Rng& rng) {
  const int n = cfg.total_modes;
  if (n < 2) throw std::invalid_argument("syk2_sample: N must be >= 2");
  std::normal_distribution<double> gauss(0.0, cfg.coupling / std::sqrt(static_cast<double>(n)));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = i + 1; j < 2 * n; ++j) {
      const double v = gauss(rng);
      h(i, j) = v;
      h(j, i) = -v;
    }
  }
  return h;
}

CovarianceMatrix syk2_eigenstate_covariance(const Eigen::MatrixXd& h, Rng& rng,
                                            const Syk2Config& cfg) {
  const int n = cfg.total_modes;
  const int dim = 2 * n;
  if (h.rows() != dim || h.cols() != dim)
    throw std::invalid_argument("syk2_eigenstate_covariance: dimension mismatch");

  using cd = std::complex<double>;
  Eigen::MatrixXcd ih = cd(0.0, 1.0) * h.cast<cd>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(ih);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("syk2_eigenstate_covariance: eigensolver failed");
  // Ascending eigenvalues: the first N are the negative-energy modes; the
  // positive-energy partner of eigenvector v is its complex conjugate.
  if (std::abs(solver.eigenvalues()(n - 1)) < 1e-12)
    throw std::runtime_error("syk2_eigenstate_covariance: degenerate +- pairing (zero mode)");

  const int flip_min = static_cast<int>(std::ceil(cfg.flip_fraction_min * n));
  const int flip_max = static_cast<int>(std::floor(cfg.flip_fraction_max * n));
  if (flip_min > flip_max)
    throw std::invalid_argument("syk2_eigenstate_covariance: empty flip range");
  const int flips = std::uniform_int_distribution<int>(flip_min, flip_max)(rng);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < flips; ++i) {
    int j = std::uniform_int_distribution<int>(i, n - 1)(rng);
    std::swap(order[i], order[j]);
  }

  Eigen::MatrixXcd filled(dim, n);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXcd v = solver.eigenvectors().col(order[k]);
    filled.col(k) = (k < flips) ? v.conjugate() : v;
  }
  // Gamma = i (2 Xi - I) with Xi the filled-mode projector; the result is
  // real antisymmetric in this convention.
  Eigen::MatrixXcd c = 2.0 * filled * filled.adjoint() - Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXd gamma = -c.imag();
  gamma = 0.5 * (gamma - gamma.transpose().eval());
  return CovarianceMatrix(n, std::move(gamma));
}

std::vector<Syk2Point> syk2_page(const Syk2Config& cfg, const std::vector<int>& ell_grid,
                                 const WeightOrder& alpha) {
  std::vector<std::vector<double>> per_disorder(ell_grid.size(),
                                                std::vector<double>(cfg.disorder_samples, 0.0));
  parallel_for(cfg.disorder_samples, cfg.threads, [&](std::size_t d) {
    Rng rng = derive_stream(cfg.seed, d);
    Eigen::MatrixXd h = syk2_sample(cfg, rng);
    std::vector<double> acc(ell_grid.size(), 0.0);
    for (int e = 0; e < cfg.eigenstates_per_sample; ++e) {
      CovarianceMatrix gamma = syk2_eigenstate_covariance(h, rng, cfg);
      for (std::size_t gi = 0; gi < ell_grid.size(); ++gi) {
        auto part = BipartitionSpec::prefix(ell_grid[gi], cfg.total_modes);
        FnlOptions fopts;
        fopts.check_purity = false;  // projector construction is pure
        acc[gi] += fnl_magic(gamma, part, alpha, fopts) / cfg.total_modes;
      }
    }
    for (std::size_t gi = 0; gi < ell_grid.size(); ++gi)
      per_disorder[gi][d] = acc[gi] / cfg.eigenstates_per_sample;
  });

  std::vector<Syk2Point> points(ell_grid.size());
  for (std::size_t gi = 0; gi < ell_grid.size(); ++gi) {
    const auto& v = per_disorder[gi];
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= std::max<std::size_t>(1, v.size() - 1);
    points[gi].r = static_cast<double>(ell_grid[gi]) / cfg.total_modes;
    points[gi].density_mean = mean;
    points[gi].density_stderr = std::sqrt(var / v.size());
  }
  return points;
}

}  // namespace fnl
