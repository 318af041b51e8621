#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fnl/covariance.hpp"

namespace fnl {

// Transverse field mu and anisotropy eta of the XY chain
//   H = -sum_j [ (1+eta)/2 X X + (1-eta)/2 Y Y + mu Z ].
struct XYParams {
  double mu = 1.0;
  double eta = 1.0;
};

// Single-particle dispersion sqrt((mu - cos k)^2 + eta^2 sin^2 k).
double dispersion(double k, const XYParams& p);

// Bogoliubov angle theta_k = atan2(eta sin k, mu - cos k). At a gap-closing
// momentum the k -> 0+ branch limit sign(eta) * pi/2 is returned.
double bogoliubov_angle(double k, const XYParams& p);

// Reduced ground-state covariance of an ell-site block in the thermodynamic
// limit: the block-Toeplitz matrix of the symbol
//   g(k) = [[0, e^{i theta_k}], [-e^{-i theta_k}, 0]].
// Fourier coefficients by composite Gauss-Legendre quadrature on [0, pi] with
// panel doubling to `tol`; throws if the doubling limit is hit.
Eigen::MatrixXd ground_state_block_toeplitz(int ell, const XYParams& p, double tol = 1e-10);

// Reduced block of the finite-chain ground state (Neveu-Schwarz sector,
// momenta pi(2n+1)/N), for N divisible by 4.
Eigen::MatrixXd finite_chain_block(int chain_sites, int ell, const XYParams& p);

// Full 2N x 2N ground-state covariance of the finite chain.
CovarianceMatrix finite_chain_covariance(int chain_sites, const XYParams& p);

// Complete elliptic integral of the first kind, modulus convention
// (K(kappa), complement kappa' = sqrt(1 - kappa^2)); AGM iteration.
double elliptic_K(double modulus);

enum class XYPhase { kDisordered, kOrderedOuter, kOrderedInner };

struct PeschelModulus {
  double kappa = 0.0;
  XYPhase phase = XYPhase::kDisordered;
};

// Elliptic modulus of the corner-transfer-matrix spectrum, selected by
// (mu >< 1, eta^2 + mu^2 >< 1). Uses |mu|, |eta|: mu -> -mu and eta -> -eta
// are onsite Clifford rotations of the chain. Throws on a critical line.
PeschelModulus peschel_modulus(const XYParams& p);

struct PeschelSpectrum {
  double spacing = 0.0;    // eps = pi K(kappa') / K(kappa)
  bool odd_ladder = false; // (2n+1) eps for mu > 1, 2n eps for mu < 1
  double kappa = 0.0;
  std::vector<double> energies;  // first n_max entanglement energies
};

PeschelSpectrum peschel_spectrum(const XYParams& p, int n_max = 64);

struct SemiInfiniteFnl {
  double single_cut = 0.0;
  double block = 0.0;  // two boundaries: twice the single-cut value
  int terms = 0;
};

// Off-critical FNL of the semi-infinite cut from the Peschel ladder; series
// truncated when a term drops below 1e-16 (throws near criticality if 1e5
// terms do not suffice, reporting the partial sum).
SemiInfiniteFnl fnl_semi_infinite(const XYParams& p, const WeightOrder& alpha);

// Coefficient of the ln(ell) growth of FNL at the XY critical point.
// Route (i): quadrature of (2/pi^2) int_0^1 m_alpha(l^2)/(1-l^2) dl.
double critical_beta(const WeightOrder& alpha);

// Route (ii): sum of acosh^2 over the roots of
// R_alpha(x) = (x-2)^alpha + (x+2)^alpha + 4^alpha. Independent of route (i);
// the two must agree to 1e-8.
double critical_beta_roots(const WeightOrder& alpha);

struct PhaseScanCell {
  double mu = 0.0;
  double eta = 0.0;
  int ell = 0;
  double fnl_density = 0.0;  // NaN when the cell failed
};

struct PhaseScanOptions {
  // Switch from the Peschel series to block-Toeplitz numerics when
  // kappa > 1 - near_critical_kappa.
  double near_critical_kappa = 1e-3;
  int threads = 0;
};

// FNL density over a (mu, eta) grid; off-critical cells use the doubled
// Peschel series, near-critical cells the block numerics at the given ell.
std::vector<PhaseScanCell> phase_diagram_scan(const std::vector<double>& mu_grid,
                                              const std::vector<double>& eta_grid, int ell,
                                              const WeightOrder& alpha,
                                              const PhaseScanOptions& opts = {});

}  // namespace fnl
