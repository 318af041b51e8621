#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fnl {

// Majorana two-point data Gamma_mn = (i/2) <[gamma_n, gamma_m]> of a fermionic
// Gaussian state on `modes` sites (two Majoranas per site). Real antisymmetric,
// 2N x 2N, entries in [-1, 1]; pure states satisfy Gamma Gamma^T = I. The sign
// convention is fixed so that the vacuum |0...0> has blocks [[0,1],[-1,0]].
class CovarianceMatrix {
 public:
  CovarianceMatrix(int modes, Eigen::MatrixXd entries);

  int modes() const { return modes_; }
  const Eigen::MatrixXd& entries() const { return entries_; }

  // Max-norm purity defect ||Gamma Gamma^T - I||_max.
  double purity_defect() const;
  bool is_pure(double tol = 1e-8) const { return purity_defect() <= tol; }

 private:
  int modes_;
  Eigen::MatrixXd entries_;
};

// Ordered subset A of the sites {0, ..., N-1}; selects Majorana indices
// {2m, 2m+1 : m in A}.
class BipartitionSpec {
 public:
  BipartitionSpec(std::vector<int> sites, int total_modes);

  const std::vector<int>& sites() const { return sites_; }
  int total_modes() const { return total_modes_; }
  int size() const { return static_cast<int>(sites_.size()); }
  std::vector<int> majorana_indices() const;
  BipartitionSpec complement() const;

  // Contiguous block {0, ..., ell-1}.
  static BipartitionSpec prefix(int ell, int total_modes);

 private:
  std::vector<int> sites_;
  int total_modes_;
};

// One representative per degenerate singular-value pair of a reduced block,
// clamped to [0, 1] and sorted descending.
struct ModeSpectrum {
  std::vector<double> values;
  int size() const { return static_cast<int>(values.size()); }
};

struct WeightOrder {
  int alpha = 2;
  explicit WeightOrder(int a);
};

CovarianceMatrix vacuum_covariance(int modes);

// Bell pairs between mirror sites (j, N-1-j); maximally entangled across the
// half cut yet a stabilizer state.
CovarianceMatrix rainbow_covariance(int modes);

// O Gamma O^T for orthogonal O; rejects non-orthogonal O with the observed
// ||O^T O - I|| in the message.
CovarianceMatrix conjugate(const CovarianceMatrix& gamma, const Eigen::MatrixXd& orthogonal);

// Submatrix of Gamma on the Majorana indices of A.
Eigen::MatrixXd restrict_block(const CovarianceMatrix& gamma, const BipartitionSpec& part);

// Singular values of an antisymmetric block come in degenerate pairs; returns
// one value per pair. Adjacent sorted values differing by more than 1e-6
// signal a malformed input. Values land in [0, 1] after clamping; clamp
// distances beyond clamp_tol are an error (raise it for deliberately
// perturbed blocks, e.g. error-bound experiments).
ModeSpectrum mode_spectrum(const Eigen::MatrixXd& block, double clamp_tol = 1e-8);

// Weight function of the stabilizer-entropy order alpha:
//   (1-alpha)^-1 log2[((1-x)^alpha + 1 + x^alpha)/2],  x in [0, 1].
// For alpha = 2 this is -log2(1 - x + x^2).
double magic_weight(const WeightOrder& alpha, double x);

struct FnlOptions {
  bool check_purity = true;     // formula assumes a pure state
  double purity_tol = 1e-8;
};

// Fermionic non-local magic: sum of magic_weight(alpha, lambda_i^2) over the
// mode spectrum of the restriction to A. Computed on the smaller side of the
// bipartition (identical result; modes at lambda = 1 contribute zero).
double fnl_magic(const CovarianceMatrix& gamma, const BipartitionSpec& part,
                 const WeightOrder& alpha, const FnlOptions& opts = {});

double fnl_magic(const ModeSpectrum& spectrum, const WeightOrder& alpha);

// Bipartite entanglement entropy in bits: sum of binary entropies of
// (1 + lambda)/2 per mode.
double entanglement_entropy(const ModeSpectrum& spectrum);

// Single-particle entanglement energies eps_n = 2 artanh(lambda_n); lambda = 1
// maps to +infinity.
std::vector<double> entanglement_energies(const ModeSpectrum& spectrum);

// Binary entropy in bits, with 0 log 0 := 0.
double binary_entropy(double x);

// Lipschitz stability bound L sqrt(ell) ||dGamma_A||_F on the FNL response to
// a perturbation of the reduced block; L is the maximum of |d m2(l^2)/dl| on
// [0, 1], computed once by dense scan.
double fnl_error_bound(int ell, double frobenius_perturbation);

// Order-of-magnitude shot count ceil(ell^3 log(ell/delta) / eps^2) for
// estimating the FNL density to accuracy eps with failure probability delta.
// A planning figure, not a guarantee.
long long shots_estimate(int ell, double epsilon, double delta);

}  // namespace fnl
