#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "fnl/covariance.hpp"
#include "fnl/rng.hpp"

namespace fnl {

// Small-N ground truth. States live on `sites` qubits with site 0 mapped to
// the most significant bit of the amplitude index, so reshaping to a
// d_A x d_B row-major matrix puts a prefix subsystem on the rows.
struct DenseState {
  int sites = 0;
  Eigen::VectorXcd amplitudes;

  DenseState() = default;
  DenseState(int n, Eigen::VectorXcd amps);

  static DenseState computational_basis(int n, std::uint64_t index);
};

inline constexpr int kMaxOracleSites = 12;

// Jordan-Wigner Majorana gamma_{2s} = (prod_{m<s} Z_m) X_s and
// gamma_{2s+1} = (prod Z) Y_s as a dense matrix (j in [0, 2N)).
Eigen::MatrixXcd jw_majorana(int sites, int j);

// gamma_j |psi>, applied with bit arithmetic.
DenseState apply_majorana(const DenseState& psi, int j);

// Majorana two-point data of an arbitrary pure state; antisymmetric real for
// any input, pure (Gamma Gamma^T = I) only for Gaussian inputs.
CovarianceMatrix covariance_from_state(const DenseState& psi);

// The adjoint action of exp(sum_{mn} h_mn gamma_m gamma_n) rotates Majoranas
// by exp(kAdjointFactor * h); fixed by the cross-check test at N = 3.
inline constexpr double kAdjointFactor = 4.0;

// Many-body unitary exp(H) with H = sum_{m,n} h_mn gamma_m gamma_n, h real
// antisymmetric 2N x 2N.
Eigen::MatrixXcd gaussian_unitary_dense(int sites, const Eigen::MatrixXd& h);

// Gaussian state U_O |0...0> whose covariance is O Gamma_0 O^T. Reflections
// (det O = -1) are realized by an X on the first site.
DenseState gaussian_state_from_orthogonal(const Eigen::MatrixXd& orthogonal);

enum class SreMethod { kAuto, kDirect, kWalshHadamard };

// Stabilizer Renyi entropy M_alpha = (1-alpha)^-1 log2 zeta_alpha. The direct
// path enumerates all 4^N Pauli strings with bit-indexed application; the
// Walsh-Hadamard path computes the full Pauli spectrum in O(N 4^N).
double stabilizer_entropy(const DenseState& psi, int alpha,
                          SreMethod method = SreMethod::kAuto);

// Canonical modewise state: pairs (i, ell+i) in cos(theta_i)|00> +
// sin(theta_i)|11>, remaining sites in |0>. Permutations are omitted; the
// Pauli-string set is closed under qubit relabeling, so the stabilizer
// entropy is unaffected.
struct CanonicalSpec {
  std::vector<double> thetas;
  int total_sites = 0;
};

DenseState canonical_state(const CanonicalSpec& spec);

// Stabilizer purity of the canonical state: prod_i (1 - lambda_i^2 + lambda_i^4).
double canonical_purity(const std::vector<double>& lambdas);

// (U_A (x) U_B)|psi> for a prefix bipartition of ell_a sites, evaluated as
// U_A Psi U_B^T on the reshaped amplitude matrix.
DenseState apply_local_unitaries(const DenseState& psi, const Eigen::MatrixXcd& u_a,
                                 const Eigen::MatrixXcd& u_b, int ell_a);

// Ground state of H = -sum_j [X_j X_{j+1} + mu Z_j] with periodic boundaries.
DenseState ising_ground_state_dense(int sites, double mu);

}  // namespace fnl
