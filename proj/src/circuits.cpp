#include "fnl/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fnl/ensembles.hpp"
#include "fnl/parallel.hpp"

namespace fnl {

Eigen::Matrix4d sample_so4(Rng& rng) {
  Eigen::Matrix4d q = sample_haar_orthogonal(4, rng);
  if (q.determinant() < 0.0) q.col(3) *= -1.0;
  return q;
}

void apply_layer(Eigen::MatrixXd& gamma, LayerParity parity, Rng& rng) {
  const int dim = static_cast<int>(gamma.rows());
  if (dim % 4 != 0) throw std::invalid_argument("apply_layer: N must be even");
  const int sites = dim / 2;
  const int first = parity == LayerParity::kEven ? 0 : 1;
  for (int a = first; a + 1 < sites; a += 2) {
    const Eigen::Matrix4d r = sample_so4(rng);
    const int base = 2 * a;  // Majoranas {2a, 2a+1, 2a+2, 2a+3}
    gamma.middleRows<4>(base) = r * gamma.middleRows<4>(base);
    gamma.middleCols<4>(base) = gamma.middleCols<4>(base) * r.transpose();
  }
}

std::vector<CircuitPoint> circuit_fnl_trajectory(const CircuitConfig& cfg,
                                                 const WeightOrder& alpha) {
  if (cfg.sites < 2 || cfg.sites % 2 != 0)
    throw std::invalid_argument("circuit_fnl_trajectory: N must be even and >= 2");
  if (cfg.layers < 0) throw std::invalid_argument("circuit_fnl_trajectory: layers must be >= 0");
  if (cfg.realizations < 1)
    throw std::invalid_argument("circuit_fnl_trajectory: need at least one realization");

  std::vector<int> schedule = cfg.measure_layers;
  if (schedule.empty()) {
    schedule.resize(cfg.layers + 1);
    std::iota(schedule.begin(), schedule.end(), 0);
  } else {
    schedule.insert(schedule.begin(), 0);
    std::sort(schedule.begin(), schedule.end());
    schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
    if (schedule.front() < 0 || schedule.back() > cfg.layers)
      throw std::invalid_argument("circuit_fnl_trajectory: measurement layer out of range");
  }

  const int half = cfg.sites / 2;
  std::vector<std::vector<double>> values(schedule.size(),
                                          std::vector<double>(cfg.realizations, 0.0));

  parallel_for(cfg.realizations, cfg.threads, [&](std::size_t real) {
    Rng rng = derive_stream(cfg.seed, real);
    Eigen::MatrixXd gamma = vacuum_covariance(cfg.sites).entries();
    std::size_t next = 0;
    auto measure = [&](int layer) {
      if (next < schedule.size() && schedule[next] == layer) {
        Eigen::MatrixXd block = gamma.topLeftCorner(2 * half, 2 * half);
        block = 0.5 * (block - block.transpose().eval());
        values[next][real] = fnl_magic(mode_spectrum(block), alpha);
        ++next;
      }
    };
    measure(0);
    for (int layer = 1; layer <= cfg.layers; ++layer) {
      apply_layer(gamma, LayerParity::kEven, rng);
      apply_layer(gamma, LayerParity::kOdd, rng);
      measure(layer);
      if (next >= schedule.size()) break;
    }
  });

  std::vector<CircuitPoint> points(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& v = values[i];
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= std::max<std::size_t>(1, v.size() - 1);
    points[i].layer = schedule[i];
    points[i].sqrt_t_over_n = std::sqrt(static_cast<double>(schedule[i])) / cfg.sites;
    points[i].fnl_mean = mean;
    points[i].fnl_stderr = cfg.realizations > 1 ? std::sqrt(var / v.size()) : 0.0;
    points[i].realizations = cfg.realizations;
  }
  return points;
}

}  // namespace fnl
