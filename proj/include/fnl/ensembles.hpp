#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fnl/covariance.hpp"
#include "fnl/rng.hpp"

namespace fnl {

// Haar-distributed orthogonal matrix: QR of a standard Gaussian matrix with
// the sign convention that R has positive diagonal, then a uniformly random
// +-1 reflection of the first column to cover both components of O(dim).
Eigen::MatrixXd sample_haar_orthogonal(int dim, Rng& rng);

struct JacobiKernelParams {
  int total_modes = 0;  // N
  int subsystem = 0;    // ell, 1 <= ell <= N/2
  JacobiKernelParams(int n, int ell);
  int exponent() const { return total_modes - 2 * subsystem; }  // b = N - 2 ell
};

// One-point density of the squared covariance eigenvalues of a Haar-random
// Gaussian state: w(x) sum_{n<ell} p_n(x)^2 with weight
// w(x) = (1-x)^b / sqrt(x) and Jacobi polynomials P_n^(-1/2, b)(1-2x)
// orthonormalized in log-Gamma form. The (1-x) exponent is pinned by the
// exact Haar moment E[sum x_i] = ell(2 ell - 1)/(2N - 1); integrates to ell.
double jacobi_density(double x, const JacobiKernelParams& params);

// Exact finite-N ensemble mean of the total FNL over subsystem `ell`:
// quadrature of weight * density with x = sin^2(phi) absorbing the endpoint
// singularities.
double page_curve_finite(const JacobiKernelParams& params, const WeightOrder& alpha);

// N -> infinity FNL density at ratio r = ell/N:
//   (c/pi) int_0^{pi/2} cos^2(th) / (1 - c sin^2(th)) m_alpha(c sin^2(th)) dth,
// c = 4 r (1 - r).
double page_curve_asymptotic(double r, const WeightOrder& alpha);

// Prefactor of the quadratic small-r onset: alpha / ((alpha - 1) 2 ln 2).
double small_r_coefficient(const WeightOrder& alpha);

struct PageCurvePoint {
  double r = 0.0;
  double density = 0.0;  // mean FNL per site
  double stderr_density = 0.0;
};

struct MonteCarloOptions {
  int samples = 200;
  std::uint64_t seed = 1;
  int threads = 0;
};

// Sampled Page curve over Haar states conjugate(vacuum, O); one point per
// entry of ell_grid. Deterministic for a fixed seed independent of threads.
std::vector<PageCurvePoint> monte_carlo_page(int total_modes, const std::vector<int>& ell_grid,
                                             const WeightOrder& alpha,
                                             const MonteCarloOptions& opts);

struct Syk2Config {
  int total_modes = 0;  // N
  double coupling = 1.0;
  double flip_fraction_min = 0.25;
  double flip_fraction_max = 0.5;
  int disorder_samples = 10;
  int eigenstates_per_sample = 10;
  std::uint64_t seed = 1;
  int threads = 0;
};

// Random antisymmetric single-body matrix, independent N(0, J^2/N) entries
// above the diagonal.
Eigen::MatrixXd syk2_sample(const Syk2Config& cfg, Rng& rng);

// Mid-spectrum eigenstate: fill the N negative-energy modes of i h, then flip
// a uniformly random subset (size uniform in [ceil(N/4), floor(N/2)], per the
// configured fractions) to their positive-energy partners; Gamma = i(2 Xi - I).
CovarianceMatrix syk2_eigenstate_covariance(const Eigen::MatrixXd& h, Rng& rng,
                                            const Syk2Config& cfg);

struct Syk2Point {
  double r = 0.0;
  double density_mean = 0.0;    // FNL per site, disorder mean of eigenstate means
  double density_stderr = 0.0;  // from the disorder (outer) level only
};

// Two-level average (inner over eigenstates, outer over disorder) of the FNL
// density at each ell in the grid.
std::vector<Syk2Point> syk2_page(const Syk2Config& cfg, const std::vector<int>& ell_grid,
                                 const WeightOrder& alpha);

}  // namespace fnl
