#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "fnl/oracle.hpp"

namespace fnl {

enum class UnitaryClass { kGeneric, kGaussian };

struct OptimizerConfig {
  UnitaryClass unitary_class = UnitaryClass::kGaussian;
  int alpha = 2;
  int restarts = 10;
  int max_iterations = 2000;
  double convergence = 1e-10;  // stop when |dC| falls below this
  double fd_step = 1e-8;
  // Forward finite differences instead of the analytic gradient; the two are
  // cross-checked to 1e-5 in the test suite.
  bool finite_difference_gradient = false;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct VariationalResult {
  double value = 0.0;
  bool converged = false;  // best-so-far is returned either way
  int best_restart = -1;
  int iterations = 0;
};

// Minimum of the stabilizer entropy M_alpha over U_A (x) U_B on the prefix
// bipartition {0..ell_a-1}. Generic class: U = exp(-i H) over the full
// Hermitian algebra u(d). Gaussian class: U = exp(sum h_mn gamma_m gamma_n)
// with the independent entries of antisymmetric h as the angles. Restarts
// draw initial angles uniformly from [0, 2pi) and run in parallel;
// deterministic for a fixed seed.
VariationalResult variational_min(const DenseState& psi, int ell_a, const OptimizerConfig& cfg);

// Cost of (exp(-i H(delta)) U0_A) (x) (exp(-i H(delta)) U0_B) |psi> in the
// frame U0 = exp(-i H(frame_angles)); the optimizer works in these
// left-translated coordinates, re-centering the frame after every step.
double variational_cost(const DenseState& psi, int ell_a, const OptimizerConfig& cfg,
                        const Eigen::VectorXd& frame_angles, const Eigen::VectorXd& delta);

// Cost and analytic left-tangent gradient at delta = 0 of the given frame:
// grad_p = d/dt C(exp(-i t tau_p) U0) at t = 0. Cross-checked against forward
// finite differences in the test suite.
double variational_gradient(const DenseState& psi, int ell_a, const OptimizerConfig& cfg,
                            const Eigen::VectorXd& frame_angles, Eigen::VectorXd& grad);

// Number of angles for the given class and bipartition.
int variational_parameter_count(int sites, int ell_a, UnitaryClass unitary_class);

}  // namespace fnl
