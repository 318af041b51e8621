#include "fnl/quench.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fnl/lattice.hpp"
#include "fnl/quadrature.hpp"

namespace fnl {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

double ising_dispersion(double k, double mu) { return dispersion(k, XYParams{mu, 1.0}); }

double ising_eps_max(double mu) {
  // eps^2 = mu^2 - 2 mu cos k + 1 is extremal at k = 0, pi.
  return std::max(std::abs(mu - 1.0), std::abs(mu + 1.0));
}

}  // namespace

DeltaTheta delta_theta(double k, const QuenchParams& qp) {
  const double c = std::cos(k);
  const double s = std::sin(k);
  const double eps = ising_dispersion(k, qp.mu);
  DeltaTheta out;
  if (std::isinf(qp.mu0)) {
    // theta0 -> 0: cos(dtheta) = cos(theta) = (mu - cos k)/eps.
    if (eps < 1e-14) throw std::invalid_argument("delta_theta: gap-closing momentum");
    out.cos_value = (qp.mu - c) / eps;
    out.sin_value = s / eps;
    return out;
  }
  const double eps0 = ising_dispersion(k, qp.mu0);
  if (eps < 1e-14 || eps0 < 1e-14)
    throw std::invalid_argument("delta_theta: gap-closing momentum");
  out.cos_value = ((qp.mu - c) * (qp.mu0 - c) + s * s) / (eps * eps0);
  out.sin_value = s * (qp.mu0 - qp.mu) / (eps * eps0);
  return out;
}

Eigen::Matrix2cd time_symbol(double k, double t, const QuenchParams& qp) {
  const DeltaTheta dt = delta_theta(k, qp);
  const double eps = ising_dispersion(k, qp.mu);
  const double theta = bogoliubov_angle(k, XYParams{qp.mu, 1.0});
  const cd p = std::exp(-kI * theta) * (dt.cos_value + kI * dt.sin_value * std::cos(2.0 * eps * t));
  const cd pm = std::conj(p);  // p(-k, t) = conj(p(k, t))
  const cd q = kI * dt.sin_value * std::sin(2.0 * eps * t);
  Eigen::Matrix2cd g;
  g << -q, p, -pm, q;
  return g;
}

Eigen::MatrixXd evolved_block_toeplitz(int ell, double t, const QuenchParams& qp, double tol) {
  if (ell < 1) throw std::invalid_argument("evolved_block_toeplitz: ell must be >= 1");
  if (t < 0.0) throw std::invalid_argument("evolved_block_toeplitz: t must be >= 0");

  // Coefficients over d = -(ell-1) .. (ell-1): real parts of the p-line and
  // the (odd in d) q-line, evaluated in one sweep per node.
  const int n_p = 2 * ell - 1;
  const int n_q = ell;  // q_d for d = 0 .. ell-1, q odd in d
  auto eval = [&](int panels) {
    const auto& rule = gauss_legendre(16);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_p + n_q);
    const double h = M_PI / panels;
    for (int panel = 0; panel < panels; ++panel) {
      const double mid = (panel + 0.5) * h;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double k = mid + 0.5 * h * rule.nodes[i];
        const double w = 0.5 * h * rule.weights[i];
        const DeltaTheta dt = delta_theta(k, qp);
        const double eps = ising_dispersion(k, qp.mu);
        const double theta = bogoliubov_angle(k, XYParams{qp.mu, 1.0});
        const double osc = dt.sin_value * std::cos(2.0 * eps * t);
        const double re_p = std::cos(theta) * dt.cos_value + std::sin(theta) * osc;
        const double im_p = -std::sin(theta) * dt.cos_value + std::cos(theta) * osc;
        const double s_q = dt.sin_value * std::sin(2.0 * eps * t);
        for (int d = -(ell - 1); d <= ell - 1; ++d)
          acc(d + ell - 1) += w * (std::cos(k * d) * re_p - std::sin(k * d) * im_p);
        for (int d = 0; d < ell; ++d) acc(n_p + d) -= w * std::sin(k * d) * s_q;
      }
    }
    return Eigen::VectorXd(acc / M_PI);
  };

  // At least 16 nodes per oscillation period of cos(k d + 2 eps_k t).
  const double phase = M_PI * (ell - 1) + 2.0 * ising_eps_max(qp.mu) * t;
  const int initial_panels = std::max(16, static_cast<int>(std::ceil(phase / (2.0 * M_PI))));
  Eigen::VectorXd coeffs;
  auto res = refine_panels(eval, coeffs, tol, initial_panels, 12);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "evolved_block_toeplitz: quadrature did not converge (achieved " << res.achieved_tol
        << ", requested " << tol << ")";
    throw std::runtime_error(msg.str());
  }

  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(2 * ell, 2 * ell);
  auto q_of = [&](int d) {
    const double v = coeffs(n_p + std::abs(d));
    return d >= 0 ? v : -v;
  };
  for (int m = 0; m < ell; ++m) {
    for (int n = 0; n < ell; ++n) {
      const int d = m - n;
      gamma(2 * m, 2 * n) = -q_of(d);
      gamma(2 * m, 2 * n + 1) = coeffs(d + ell - 1);
      gamma(2 * m + 1, 2 * n) = -coeffs(-d + ell - 1);
      gamma(2 * m + 1, 2 * n + 1) = q_of(d);
    }
  }
  // Antisymmetric up to quadrature error; anything larger signals a broken
  // assembly rather than integration noise.
  const double defect = (gamma + gamma.transpose()).cwiseAbs().maxCoeff();
  if (defect > 1e-6) {
    std::ostringstream msg;
    msg << "evolved_block_toeplitz: antisymmetry defect " << defect;
    throw std::runtime_error(msg.str());
  }
  gamma = 0.5 * (gamma - gamma.transpose().eval());
  return gamma;
}

double fnl_evolved(int ell, double t, const QuenchParams& qp, const WeightOrder& alpha,
                   double tol) {
  return fnl_magic(mode_spectrum(evolved_block_toeplitz(ell, t, qp, tol)), alpha);
}

double group_velocity(double k, double mu) {
  const double eps = ising_dispersion(k, mu);
  if (eps < 1e-12) return 1.0;  // mu = 1, k -> 0 limit of mu sin k / eps
  return mu * std::sin(k) / eps;
}

double max_group_velocity(double mu) {
  double best = 0.0;
  constexpr int kGrid = 4096;
  for (int i = 0; i <= kGrid; ++i) {
    const double k = M_PI * i / kGrid;
    best = std::max(best, std::abs(group_velocity(k, mu)));
  }
  return best;
}

namespace {

double gge_mode_weight(double k, const QuenchParams& qp, const WeightOrder& alpha) {
  const DeltaTheta dt = delta_theta(k, qp);
  return magic_weight(alpha, dt.cos_value * dt.cos_value);
}

double gge_mode_entropy(double k, const QuenchParams& qp) {
  const DeltaTheta dt = delta_theta(k, qp);
  return binary_entropy(0.5 * (1.0 + std::abs(dt.cos_value)));
}

// Integrates kernel(k) * min(2 |v_k| t, ell) over (0, pi), splitting the
// domain at the kinks where 2 |v_k| t = ell.
double ballistic_integral(int ell, double t, const QuenchParams& qp,
                          const std::function<double(double)>& kernel) {
  if (t <= 0.0) return 0.0;
  auto front = [&](double k) { return 2.0 * std::abs(group_velocity(k, qp.mu)) * t; };
  std::vector<double> cuts{0.0, M_PI};
  constexpr int kScan = 512;
  double prev_k = 0.0;
  double prev_f = front(prev_k) - ell;
  for (int i = 1; i <= kScan; ++i) {
    const double k = M_PI * i / kScan;
    const double f = front(k) - ell;
    if ((prev_f < 0.0) != (f < 0.0)) {
      double lo = prev_k, hi = k;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((front(mid) - ell < 0.0) == (prev_f < 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      cuts.push_back(0.5 * (lo + hi));
    }
    prev_k = k;
    prev_f = f;
  }
  std::sort(cuts.begin(), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto integrand = [&](double k) { return std::min(front(k), static_cast<double>(ell)) * kernel(k); };
    auto res = integrate_adaptive(integrand, cuts[i], cuts[i + 1], 1e-10, 8, 16);
    if (!res.converged)
      throw std::runtime_error("quasiparticle kernel: quadrature did not converge");
    total += res.value;
  }
  return total / M_PI;
}

}  // namespace

double stationary_fnl(int ell, const QuenchParams& qp, const WeightOrder& alpha) {
  auto res = integrate_adaptive([&](double k) { return gge_mode_weight(k, qp, alpha); }, 0.0,
                                M_PI, 1e-10, 8, 18);
  if (!res.converged) throw std::runtime_error("stationary_fnl: quadrature did not converge");
  return ell / M_PI * res.value;
}

double quasiparticle_fnl(int ell, double t, const QuenchParams& qp, const WeightOrder& alpha) {
  return ballistic_integral(ell, t, qp,
                            [&](double k) { return gge_mode_weight(k, qp, alpha); });
}

double quasiparticle_entropy(int ell, double t, const QuenchParams& qp) {
  return ballistic_integral(ell, t, qp, [&](double k) { return gge_mode_entropy(k, qp); });
}

}  // namespace fnl
