#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "fnl/circuits.hpp"

using namespace fnl;

TEST_CASE("so4 sampling") {
  Rng rng = derive_stream(2, 0);
  double sum = 0.0, sum2 = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Eigen::Matrix4d r = sample_so4(rng);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-10));
    if (i < 50)
      CHECK((r.transpose() * r - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    double v = r(0, 0);
    sum += v * v;
    sum2 += v * v * v * v;
  }
  // Haar first moment E[R_11^2] = 1/4
  double mean = sum / draws;
  double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - 0.25) < 3.0 * se);
}

TEST_CASE("brickwork layers") {
  SUBCASE("odd half-step on two sites is the identity") {
    Rng rng = derive_stream(3, 0);
    Eigen::MatrixXd gamma = vacuum_covariance(2).entries();
    Eigen::MatrixXd before = gamma;
    apply_layer(gamma, LayerParity::kOdd, rng);
    CHECK((gamma - before).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("purity preserved over 100 layers") {
    Rng rng = derive_stream(4, 0);
    Eigen::MatrixXd gamma = vacuum_covariance(8).entries();
    for (int layer = 0; layer < 100; ++layer) {
      apply_layer(gamma, LayerParity::kEven, rng);
      apply_layer(gamma, LayerParity::kOdd, rng);
    }
    CovarianceMatrix cov(8, 0.5 * (gamma - gamma.transpose().eval()));
    CHECK(cov.purity_defect() < 1e-8);
  }
  SUBCASE("single layer keeps single-site magic below the weight maximum") {
    Rng rng = derive_stream(5, 0);
    Eigen::MatrixXd gamma = vacuum_covariance(6).entries();
    apply_layer(gamma, LayerParity::kEven, rng);
    apply_layer(gamma, LayerParity::kOdd, rng);
    const WeightOrder two(2);
    double wmax = 0.0;
    for (double x = 0.0; x <= 1.0; x += 1e-3) wmax = std::max(wmax, magic_weight(two, x));
    CovarianceMatrix cov(6, 0.5 * (gamma - gamma.transpose().eval()));
    for (int site = 0; site < 6; ++site) {
      auto spec = mode_spectrum(restrict_block(cov, BipartitionSpec({site}, 6)));
      CHECK(fnl_magic(spec, two) <= wmax + 1e-12);
    }
  }
}

TEST_CASE("early-time magic tracks the quadratic correlation proxy") {
  // Near the product state the per-mode weight expands quadratically in the
  // deviation from lambda = 1, so FNL ~ sum (1 - lambda_i^2) / ln 2, which is
  // the squared Frobenius norm of the cross-cut correlations over 2 ln 2.
  // Checked on weakly rotated vacua and on qualifying early circuit layers.
  const WeightOrder two(2);
  const int sites = 16;
  Rng rng = derive_stream(31, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int qualifying = 0;
  auto check_proxy = [&](const Eigen::MatrixXd& gamma) {
    Eigen::MatrixXd block = gamma.topLeftCorner(sites, sites);
    Eigen::MatrixXd cross = gamma.topRightCorner(sites, sites);
    auto spec = mode_spectrum(0.5 * (block - block.transpose().eval()));
    double deviation = 0.0;
    for (double l : spec.values) deviation = std::max(deviation, 1.0 - l * l);
    if (deviation >= 0.2) return;
    double fnl = fnl_magic(spec, two);
    if (fnl < 1e-8) return;
    double proxy = cross.squaredNorm() / (2.0 * M_LN2);
    CHECK(std::abs(fnl - proxy) / fnl < 0.10);
    ++qualifying;
  };

  for (double eps : {0.01, 0.02, 0.03}) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * sites, 2 * sites);
    for (int i = 0; i < 2 * sites; ++i)
      for (int j = i + 1; j < 2 * sites; ++j) {
        double v = eps * gauss(rng);
        a(i, j) = v;
        a(j, i) = -v;
      }
    Eigen::MatrixXd rot = a.exp();
    check_proxy(rot * vacuum_covariance(sites).entries() * rot.transpose());
  }
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::MatrixXd gamma = vacuum_covariance(sites).entries();
    for (int layer = 0; layer < 2; ++layer) {
      apply_layer(gamma, LayerParity::kEven, rng);
      apply_layer(gamma, LayerParity::kOdd, rng);
      check_proxy(gamma);
    }
  }
  CHECK(qualifying >= 3);  // the weak rotations always qualify
}

TEST_CASE("circuit trajectories") {
  SUBCASE("vacuum starts with zero magic") {
    CircuitConfig cfg;
    cfg.sites = 8;
    cfg.layers = 3;
    cfg.realizations = 2;
    cfg.seed = 6;
    auto points = circuit_fnl_trajectory(cfg);
    CHECK(points[0].layer == 0);
    CHECK(points[0].fnl_mean == 0.0);
    CHECK(points.size() == 4);
  }
  SUBCASE("same seed reproduces identical trajectories across thread counts") {
    CircuitConfig cfg;
    cfg.sites = 8;
    cfg.layers = 12;
    cfg.realizations = 4;
    cfg.seed = 7;
    cfg.threads = 1;
    auto a = circuit_fnl_trajectory(cfg);
    cfg.threads = 2;
    auto b = circuit_fnl_trajectory(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].fnl_mean == b[i].fnl_mean);
      CHECK(a[i].fnl_stderr == b[i].fnl_stderr);
    }
  }
  SUBCASE("sparse measurement schedules select layers") {
    CircuitConfig cfg;
    cfg.sites = 8;
    cfg.layers = 20;
    cfg.realizations = 2;
    cfg.seed = 8;
    cfg.measure_layers = {4, 12, 20};
    auto points = circuit_fnl_trajectory(cfg);
    REQUIRE(points.size() == 4);  // layer 0 is always included
    CHECK(points[1].layer == 4);
    CHECK(points[3].sqrt_t_over_n == doctest::Approx(std::sqrt(20.0) / 8.0));
  }
  SUBCASE("magic grows from the product state") {
    CircuitConfig cfg;
    cfg.sites = 12;
    cfg.layers = 30;
    cfg.realizations = 6;
    cfg.seed = 9;
    cfg.threads = 2;
    auto points = circuit_fnl_trajectory(cfg);
    CHECK(points.back().fnl_mean > 0.1);
  }
}
