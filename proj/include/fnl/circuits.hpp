#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fnl/covariance.hpp"
#include "fnl/rng.hpp"

namespace fnl {

// Haar on SO(4): Haar on O(4), then one column negated when det = -1.
Eigen::Matrix4d sample_so4(Rng& rng);

enum class LayerParity { kEven, kOdd };

// One brickwork half-step: independent SO(4) rotations of the Majorana
// quadruples of neighboring sites. Open boundaries; the odd half-step has
// N/2 - 1 gates.
void apply_layer(Eigen::MatrixXd& gamma, LayerParity parity, Rng& rng);

struct CircuitConfig {
  int sites = 0;            // N, even
  int layers = 0;
  int realizations = 1;
  std::uint64_t seed = 1;
  int threads = 0;
  // Layers after which FNL is measured; empty means every layer. Sparse
  // schedules keep the eigensolver off the per-layer critical path.
  std::vector<int> measure_layers;
};

struct CircuitPoint {
  int layer = 0;
  double sqrt_t_over_n = 0.0;
  double fnl_mean = 0.0;    // half-cut FNL, ensemble mean
  double fnl_stderr = 0.0;
  int realizations = 0;
};

// FNL of the half cut along brickwork evolution from the vacuum; ensemble
// mean and standard error over realizations, merged deterministically.
std::vector<CircuitPoint> circuit_fnl_trajectory(const CircuitConfig& cfg,
                                                 const WeightOrder& alpha = WeightOrder(2));

}  // namespace fnl
