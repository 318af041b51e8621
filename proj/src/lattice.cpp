#include "fnl/lattice.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fnl/parallel.hpp"
#include "fnl/quadrature.hpp"

namespace fnl {

namespace {

constexpr double kCriticalGuard = 1e-9;

// Fourier coefficients f_d = (1/pi) int_0^pi cos(k d + theta_k) dk of the
// ground-state symbol, for d = -(ell-1) .. (ell-1), all in one sweep.
Eigen::VectorXd symbol_coefficients(int ell, const XYParams& p, double tol) {
  const int n_coeff = 2 * ell - 1;
  auto eval = [&](int panels) {
    const auto& rule = gauss_legendre(16);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_coeff);
    const double h = M_PI / panels;
    for (int panel = 0; panel < panels; ++panel) {
      const double mid = (panel + 0.5) * h;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double k = mid + 0.5 * h * rule.nodes[i];
        const double w = 0.5 * h * rule.weights[i];
        const double theta = bogoliubov_angle(k, p);
        for (int d = -(ell - 1); d <= ell - 1; ++d)
          acc(d + ell - 1) += w * std::cos(k * d + theta);
      }
    }
    return Eigen::VectorXd(acc / M_PI);
  };
  Eigen::VectorXd coeffs;
  auto res = refine_panels(eval, coeffs, tol, std::max(8, ell / 4), 16);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "ground_state_block_toeplitz: quadrature did not converge (achieved "
        << res.achieved_tol << ", requested " << tol << ")";
    throw std::runtime_error(msg.str());
  }
  return coeffs;
}

Eigen::MatrixXd assemble_from_coefficients(int ell, const Eigen::VectorXd& f) {
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * ell, 2 * ell);
  for (int m = 0; m < ell; ++m) {
    for (int n = 0; n < ell; ++n) {
      const double fd = f(m - n + ell - 1);
      block(2 * m, 2 * n + 1) = fd;
      block(2 * n + 1, 2 * m) = -fd;
    }
  }
  return block;
}

}  // namespace

double dispersion(double k, const XYParams& p) {
  const double a = p.mu - std::cos(k);
  const double b = p.eta * std::sin(k);
  return std::hypot(a, b);
}

double bogoliubov_angle(double k, const XYParams& p) {
  const double a = p.mu - std::cos(k);
  const double b = p.eta * std::sin(k);
  if (std::hypot(a, b) < 1e-12) return std::copysign(M_PI_2, p.eta == 0.0 ? 1.0 : p.eta);
  return std::atan2(b, a);
}

Eigen::MatrixXd ground_state_block_toeplitz(int ell, const XYParams& p, double tol) {
  if (ell < 1) throw std::invalid_argument("ground_state_block_toeplitz: ell must be >= 1");
  return assemble_from_coefficients(ell, symbol_coefficients(ell, p, tol));
}

Eigen::MatrixXd finite_chain_block(int chain_sites, int ell, const XYParams& p) {
  if (chain_sites < 4 || chain_sites % 4 != 0)
    throw std::invalid_argument("finite_chain: N must be divisible by 4");
  if (ell < 1 || ell > chain_sites) throw std::invalid_argument("finite_chain: bad ell");
  const int half = chain_sites / 2;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * ell - 1);
  for (int n = 0; n < half; ++n) {
    const double k = M_PI * (2 * n + 1) / chain_sites;
    const double theta = bogoliubov_angle(k, p);
    for (int d = -(ell - 1); d <= ell - 1; ++d)
      f(d + ell - 1) += std::cos(k * d + theta);
  }
  f *= 2.0 / chain_sites;
  return assemble_from_coefficients(ell, f);
}

CovarianceMatrix finite_chain_covariance(int chain_sites, const XYParams& p) {
  return CovarianceMatrix(chain_sites, finite_chain_block(chain_sites, chain_sites, p));
}

double elliptic_K(double modulus) {
  if (modulus < 0.0 || modulus >= 1.0)
    throw std::invalid_argument("elliptic_K: modulus must lie in [0, 1)");
  double a = 1.0;
  double b = std::sqrt(1.0 - modulus * modulus);
  while (std::abs(a - b) > 1e-15 * a) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return M_PI / (2.0 * a);
}

PeschelModulus peschel_modulus(const XYParams& p) {
  const double mu = std::abs(p.mu);
  const double eta = std::abs(p.eta);
  if (std::abs(mu - 1.0) < kCriticalGuard)
    throw std::invalid_argument("peschel_modulus: |mu| = 1 is critical");
  PeschelModulus out;
  if (mu > 1.0) {
    out.phase = XYPhase::kDisordered;
    out.kappa = eta / std::sqrt(eta * eta + mu * mu - 1.0);
  } else if (eta * eta + mu * mu > 1.0) {
    out.phase = XYPhase::kOrderedOuter;
    out.kappa = std::sqrt(eta * eta + mu * mu - 1.0) / eta;
  } else {
    out.phase = XYPhase::kOrderedInner;
    out.kappa = std::sqrt((1.0 - eta * eta - mu * mu) / (1.0 - mu * mu));
  }
  if (out.kappa >= 1.0 - 1e-12)
    throw std::invalid_argument("peschel_modulus: parameters lie on a critical line");
  return out;
}

namespace {

// pi K(kappa') / K(kappa); +inf for kappa -> 0 (all modes unentangled).
double peschel_spacing(double kappa) {
  if (kappa <= 0.0) return std::numeric_limits<double>::infinity();
  const double kprime = std::sqrt((1.0 - kappa) * (1.0 + kappa));
  if (kprime >= 1.0) return std::numeric_limits<double>::infinity();
  return M_PI * elliptic_K(kprime) / elliptic_K(kappa);
}

double ladder_energy(bool odd_ladder, double spacing, int n) {
  if (odd_ladder) return (2 * n + 1) * spacing;
  return n == 0 ? 0.0 : 2.0 * n * spacing;
}

}  // namespace

PeschelSpectrum peschel_spectrum(const XYParams& p, int n_max) {
  const PeschelModulus mod = peschel_modulus(p);
  PeschelSpectrum spec;
  spec.kappa = mod.kappa;
  spec.odd_ladder = mod.phase == XYPhase::kDisordered;
  spec.spacing = peschel_spacing(mod.kappa);
  spec.energies.reserve(n_max);
  for (int n = 0; n < n_max; ++n)
    spec.energies.push_back(ladder_energy(spec.odd_ladder, spec.spacing, n));
  return spec;
}

SemiInfiniteFnl fnl_semi_infinite(const XYParams& p, const WeightOrder& alpha) {
  const PeschelModulus mod = peschel_modulus(p);
  const double eps = peschel_spacing(mod.kappa);
  const bool odd = mod.phase == XYPhase::kDisordered;

  SemiInfiniteFnl out;
  constexpr int kMaxTerms = 100000;
  for (int n = 0; n < kMaxTerms; ++n) {
    const double energy = ladder_energy(odd, eps, n);
    const double lambda = std::tanh(0.5 * energy);
    const double term = magic_weight(alpha, lambda * lambda);
    out.single_cut += term;
    ++out.terms;
    if (n > 0 && term < 1e-16) break;
    if (n == kMaxTerms - 1) {
      std::ostringstream msg;
      msg << "fnl_semi_infinite: series did not converge near criticality; partial sum "
          << out.single_cut << " after " << kMaxTerms << " terms (last term " << term << ")";
      throw std::runtime_error(msg.str());
    }
  }
  out.block = 2.0 * out.single_cut;
  return out;
}

double critical_beta(const WeightOrder& alpha) {
  auto integrand = [&](double l) {
    const double one_minus = 1.0 - l * l;
    if (one_minus < 1e-14) return static_cast<double>(alpha.alpha) / ((alpha.alpha - 1) * 2.0 * M_LN2);
    return magic_weight(alpha, l * l) / one_minus;
  };
  auto res = integrate_adaptive(integrand, 0.0, 1.0, 1e-12, 8, 20);
  if (!res.converged) throw std::runtime_error("critical_beta: quadrature did not converge");
  return 2.0 / (M_PI * M_PI) * res.value;
}

double critical_beta_roots(const WeightOrder& alpha) {
  const int a = alpha.alpha;
  // R_alpha(x) = (x-2)^alpha + (x+2)^alpha + 4^alpha, degree alpha, leading 2.
  std::vector<double> coeff(a + 1, 0.0);
  for (int k = 0; k <= a; ++k) {
    double binom = 1.0;
    for (int j = 0; j < k; ++j) binom *= static_cast<double>(a - j) / (j + 1);
    const double pow2 = std::pow(2.0, a - k);
    const double sign = ((a - k) % 2 == 0) ? 1.0 : -1.0;
    coeff[k] += binom * pow2 * (sign + 1.0);
  }
  coeff[0] += std::pow(4.0, a);

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(a, a);
  for (int i = 1; i < a; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < a; ++i) companion(i, a - 1) = -coeff[i] / coeff[a];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("critical_beta_roots: root finder failed");

  auto poly = [&](std::complex<double> x) {
    std::complex<double> v = 0.0;
    for (int k = a; k >= 0; --k) v = v * x + coeff[k];
    return v;
  };
  auto dpoly = [&](std::complex<double> x) {
    std::complex<double> v = 0.0;
    for (int k = a; k >= 1; --k) v = v * x + coeff[k] * static_cast<double>(k);
    return v;
  };

  const double scale = std::pow(4.0, a);
  std::complex<double> total = 0.0;
  for (int j = 0; j < a; ++j) {
    std::complex<double> r = solver.eigenvalues()(j);
    for (int it = 0; it < 5; ++it) r -= poly(r) / dpoly(r);  // polish
    if (std::abs(poly(r)) / scale > 1e-10) {
      std::ostringstream msg;
      msg << "critical_beta_roots: residual " << std::abs(poly(r)) / scale << " above 1e-10";
      throw std::runtime_error(msg.str());
    }
    // The t-roots of the quartic-in-t form come in reciprocal pairs
    // t + 1/t = r_j; each pair contributes 2 acosh^2(-r_j / 2).
    std::complex<double> w = std::acosh(-r / 2.0);
    total += w * w;
  }
  if (std::abs(total.imag()) > 1e-9)
    throw std::runtime_error("critical_beta_roots: root sum is not real");
  return total.real() / (2.0 * (1 - a) * M_PI * M_PI * M_LN2);
}

std::vector<PhaseScanCell> phase_diagram_scan(const std::vector<double>& mu_grid,
                                              const std::vector<double>& eta_grid, int ell,
                                              const WeightOrder& alpha,
                                              const PhaseScanOptions& opts) {
  std::vector<PhaseScanCell> cells(mu_grid.size() * eta_grid.size());
  parallel_for(cells.size(), opts.threads, [&](std::size_t idx) {
    const double mu = mu_grid[idx / eta_grid.size()];
    const double eta = eta_grid[idx % eta_grid.size()];
    PhaseScanCell cell;
    cell.mu = mu;
    cell.eta = eta;
    cell.ell = ell;
    const XYParams p{mu, eta};
    try {
      bool near_critical = true;
      double kappa = 1.0;
      try {
        kappa = peschel_modulus(p).kappa;
        near_critical = kappa > 1.0 - opts.near_critical_kappa;
      } catch (const std::invalid_argument&) {
        near_critical = true;  // on a critical line
      }
      if (near_critical) {
        auto spectrum = mode_spectrum(ground_state_block_toeplitz(ell, p));
        cell.fnl_density = fnl_magic(spectrum, alpha) / ell;
      } else {
        cell.fnl_density = fnl_semi_infinite(p, alpha).block / ell;
      }
    } catch (const std::exception&) {
      cell.fnl_density = std::numeric_limits<double>::quiet_NaN();
    }
    cells[idx] = cell;
  });
  return cells;
}

}  // namespace fnl
