#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>

#include "fnl/covariance.hpp"

namespace fnl {

// Sudden quench of the transverse field on the Ising line (eta = 1): prepare
// the ground state of H(mu0), evolve with H(mu). mu0 may be +infinity (fully
// polarized initial state), handled as the analytic limit rather than a large
// float.
struct QuenchParams {
  double mu0 = std::numeric_limits<double>::infinity();
  double mu = 1.0;
};

// Bogoliubov-angle mismatch between post- and pre-quench modes. Only even
// powers of sin enter downstream formulas; the sign convention is
// sin(dtheta) = sin(theta) cos(theta0) - cos(theta) sin(theta0).
struct DeltaTheta {
  double cos_value = 1.0;
  double sin_value = 0.0;
};

DeltaTheta delta_theta(double k, const QuenchParams& qp);

// Time-dependent 2x2 symbol g(k, t) of the evolved reduced covariance:
//   [[-q, p], [-p(-k), q]],
//   p = e^{-i theta_k} [cos(dtheta) + i sin(dtheta) cos(2 eps_k t)],
//   q = i sin(dtheta) sin(2 eps_k t).
Eigen::Matrix2cd time_symbol(double k, double t, const QuenchParams& qp);

// Reduced covariance Gamma_A(t) of an ell-site block: Fourier coefficients of
// g(k, t) by panel-doubled quadrature, node count scaled with eps_max * t so
// the oscillatory integrand stays resolved. The result is real antisymmetric
// (i Gamma_A is Hermitian); eigenvalues come in +-lambda pairs.
Eigen::MatrixXd evolved_block_toeplitz(int ell, double t, const QuenchParams& qp,
                                       double tol = 1e-9);

// FNL of the evolved block.
double fnl_evolved(int ell, double t, const QuenchParams& qp, const WeightOrder& alpha,
                   double tol = 1e-9);

// d eps_k / dk at eta = 1.
double group_velocity(double k, double mu);

// Maximum group velocity from a dense grid scan.
double max_group_velocity(double mu);

// Stationary (GGE) value: the dephased symbol has per-mode eigenvalue
// lambda_k = |cos(dtheta_k)|, so
//   FNL(inf) = (ell/pi) int_0^pi m_alpha(cos^2 dtheta_k) dk.
double stationary_fnl(int ell, const QuenchParams& qp, const WeightOrder& alpha = WeightOrder(2));

// Quasiparticle prediction
//   (1/pi) int_0^pi min(2 |v_k| t, ell) m_alpha(cos^2 dtheta_k) dk,
// valid in the scaling limit ell, t >> 1.
double quasiparticle_fnl(int ell, double t, const QuenchParams& qp,
                         const WeightOrder& alpha = WeightOrder(2));

// Same ballistic kernel with the per-mode entanglement weight
// f((1 + |cos dtheta_k|)/2), for side-by-side entanglement/magic comparisons.
double quasiparticle_entropy(int ell, double t, const QuenchParams& qp);

}  // namespace fnl
