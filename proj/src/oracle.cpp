#include "fnl/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fnl {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

void check_sites(int sites) {
  if (sites < 1 || sites > kMaxOracleSites)
    throw std::invalid_argument("oracle: sites must lie in [1, 12]");
}

// Bit of site s in an amplitude index (site 0 = most significant).
inline std::uint64_t site_bit(int sites, int s) { return 1ULL << (sites - 1 - s); }

// Mask of all sites strictly before s (the Jordan-Wigner string).
inline std::uint64_t string_mask(int sites, int s) {
  std::uint64_t mask = 0;
  for (int m = 0; m < s; ++m) mask |= site_bit(sites, m);
  return mask;
}

inline int parity(std::uint64_t x) { return std::popcount(x) & 1; }

cd i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// In-place unnormalized Walsh-Hadamard transform: out(z) = sum_y (-1)^{y.z} in(y).
void fwht(Eigen::VectorXcd& v) {
  const std::int64_t n = v.size();
  for (std::int64_t len = 1; len < n; len <<= 1) {
    for (std::int64_t i = 0; i < n; i += 2 * len) {
      for (std::int64_t j = i; j < i + len; ++j) {
        cd a = v[j];
        cd b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
}

}  // namespace

DenseState::DenseState(int n, Eigen::VectorXcd amps) : sites(n), amplitudes(std::move(amps)) {
  check_sites(sites);
  if (amplitudes.size() != (1LL << sites))
    throw std::invalid_argument("DenseState: amplitude count must be 2^N");
  double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "DenseState: norm " << norm << " differs from 1";
    throw std::invalid_argument(msg.str());
  }
}

DenseState DenseState::computational_basis(int n, std::uint64_t index) {
  check_sites(n);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(1LL << n);
  amps(static_cast<std::int64_t>(index)) = 1.0;
  return DenseState(n, std::move(amps));
}

DenseState apply_majorana(const DenseState& psi, int j) {
  const int n = psi.sites;
  if (j < 0 || j >= 2 * n) throw std::invalid_argument("apply_majorana: index out of range");
  const int s = j / 2;
  const bool odd = j % 2;  // gamma_{2s+1} carries Y instead of X
  const std::uint64_t flip = site_bit(n, s);
  const std::uint64_t string = string_mask(n, s);
  const std::int64_t dim = psi.amplitudes.size();
  Eigen::VectorXcd out(dim);
  for (std::int64_t z = 0; z < dim; ++z) {
    std::uint64_t y = static_cast<std::uint64_t>(z) ^ flip;
    cd amp = psi.amplitudes(static_cast<std::int64_t>(y));
    double sign = parity(y & string) ? -1.0 : 1.0;
    if (odd) {
      // Y|0> = i|1>, Y|1> = -i|0>
      amp *= (y & flip) ? -kI : kI;
    }
    out(z) = sign * amp;
  }
  DenseState result;
  result.sites = n;
  result.amplitudes = std::move(out);
  return result;
}

Eigen::MatrixXcd jw_majorana(int sites, int j) {
  check_sites(sites);
  const std::int64_t dim = 1LL << sites;
  Eigen::MatrixXcd m(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col) {
    DenseState basis = DenseState::computational_basis(sites, static_cast<std::uint64_t>(col));
    m.col(col) = apply_majorana(basis, j).amplitudes;
  }
  return m;
}

CovarianceMatrix covariance_from_state(const DenseState& psi) {
  const int n = psi.sites;
  if (n > 10) throw std::invalid_argument("covariance_from_state: N <= 10");
  const int dim = 2 * n;
  Eigen::MatrixXcd phi(psi.amplitudes.size(), dim);
  for (int j = 0; j < dim; ++j) phi.col(j) = apply_majorana(psi, j).amplitudes;
  Eigen::MatrixXcd overlaps = phi.adjoint() * phi;  // <gamma_m psi | gamma_n psi>
  Eigen::MatrixXd g(dim, dim);
  for (int m = 0; m < dim; ++m) {
    g(m, m) = 0.0;
    for (int k = m + 1; k < dim; ++k) {
      cd v = -kI * overlaps(m, k);  // Gamma_mn = -i <gamma_m gamma_n>, m != n
      if (std::abs(v.imag()) > 1e-9)
        throw std::runtime_error("covariance_from_state: non-real covariance entry");
      g(m, k) = v.real();
      g(k, m) = -v.real();
    }
  }
  return CovarianceMatrix(n, std::move(g));
}

Eigen::MatrixXcd gaussian_unitary_dense(int sites, const Eigen::MatrixXd& h) {
  check_sites(sites);
  if (sites > 10) throw std::invalid_argument("gaussian_unitary_dense: N <= 10");
  const int dim2 = 2 * sites;
  if (h.rows() != dim2 || h.cols() != dim2)
    throw std::invalid_argument("gaussian_unitary_dense: h must be 2N x 2N");
  if ((h + h.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("gaussian_unitary_dense: h must be antisymmetric");

  const std::int64_t dim = 1LL << sites;
  // H = sum_{m<n} 2 h_mn gamma_m gamma_n; each column of gamma_m gamma_n has a
  // single entry, so H assembles in O(N^2 2^N).
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(dim, dim);
  for (int m = 0; m < dim2; ++m) {
    for (int n = m + 1; n < dim2; ++n) {
      if (h(m, n) == 0.0) continue;
      for (std::int64_t col = 0; col < dim; ++col) {
        DenseState basis = DenseState::computational_basis(sites, static_cast<std::uint64_t>(col));
        DenseState v = apply_majorana(apply_majorana(basis, n), m);
        big.col(col) += 2.0 * h(m, n) * v.amplitudes;
      }
    }
  }
  // H is anti-Hermitian; exp(H) = V exp(-i Lambda) V^dagger with iH = V Lambda V^dagger.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(kI * big);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gaussian_unitary_dense: eigensolver failed");
  Eigen::VectorXcd phases(dim);
  for (std::int64_t i = 0; i < dim; ++i)
    phases(i) = std::exp(-kI * solver.eigenvalues()(i));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

DenseState gaussian_state_from_orthogonal(const Eigen::MatrixXd& orthogonal) {
  const int dim2 = static_cast<int>(orthogonal.rows());
  if (dim2 % 2 != 0 || orthogonal.cols() != dim2)
    throw std::invalid_argument("gaussian_state_from_orthogonal: need a 2N x 2N matrix");
  const int n = dim2 / 2;
  check_sites(n);
  double defect =
      (orthogonal.transpose() * orthogonal - Eigen::MatrixXd::Identity(dim2, dim2)).cwiseAbs().maxCoeff();
  if (defect > 1e-10)
    throw std::invalid_argument("gaussian_state_from_orthogonal: matrix not orthogonal");

  double det = orthogonal.determinant();
  Eigen::MatrixXd proper = orthogonal;
  bool reflect = det < 0.0;
  if (reflect) {
    // Fold out the reflection Ad(X_0) = diag(1, -1, ..., -1).
    for (int c = 1; c < dim2; ++c) proper.col(c) *= -1.0;
  }
  Eigen::MatrixXd h = proper.log();
  h = 0.5 * (h - h.transpose().eval());
  h /= kAdjointFactor;

  std::uint64_t start = 0;
  if (reflect) start = site_bit(n, 0);  // X on the first site
  DenseState vac = DenseState::computational_basis(n, start);
  Eigen::MatrixXcd u = gaussian_unitary_dense(n, h);
  DenseState out;
  out.sites = n;
  out.amplitudes = u * vac.amplitudes;
  // Guard against a branch failure in the real matrix log.
  Eigen::MatrixXd roundtrip = (kAdjointFactor * h).exp();
  if ((roundtrip - proper).cwiseAbs().maxCoeff() > 1e-8)
    throw std::runtime_error("gaussian_state_from_orthogonal: matrix log branch failure");
  return out;
}

double stabilizer_entropy(const DenseState& psi, int alpha, SreMethod method) {
  if (alpha < 2) throw std::invalid_argument("stabilizer_entropy: alpha must be >= 2");
  const int n = psi.sites;
  if (method == SreMethod::kAuto) method = n <= 6 ? SreMethod::kDirect : SreMethod::kWalshHadamard;
  if (method == SreMethod::kDirect && n > 10)
    throw std::invalid_argument("stabilizer_entropy: direct path limited to N <= 10");

  const std::int64_t dim = 1LL << n;
  const double d = static_cast<double>(dim);
  long double acc = 0.0L;

  if (method == SreMethod::kDirect) {
    for (std::int64_t x = 0; x < dim; ++x) {
      for (std::int64_t z = 0; z < dim; ++z) {
        cd e{0.0, 0.0};
        for (std::int64_t y = 0; y < dim; ++y) {
          cd term = std::conj(psi.amplitudes(y ^ x)) * psi.amplitudes(y);
          e += parity(static_cast<std::uint64_t>(z & y)) ? -term : term;
        }
        cd p = i_power(std::popcount(static_cast<std::uint64_t>(x & z))) * e;
        if (std::abs(p.imag()) > 1e-9)
          throw std::runtime_error("stabilizer_entropy: Pauli expectation not real");
        acc += std::pow(static_cast<long double>(p.real()), 2 * alpha);
      }
    }
  } else {
    Eigen::VectorXcd buf(dim);
    for (std::int64_t x = 0; x < dim; ++x) {
      for (std::int64_t y = 0; y < dim; ++y)
        buf(y) = std::conj(psi.amplitudes(y ^ x)) * psi.amplitudes(y);
      fwht(buf);
      for (std::int64_t z = 0; z < dim; ++z) {
        cd p = i_power(std::popcount(static_cast<std::uint64_t>(x & z))) * buf(z);
        acc += std::pow(static_cast<long double>(p.real()), 2 * alpha);
      }
    }
  }

  double zeta = static_cast<double>(acc / d);
  return std::log2(zeta) / (1.0 - alpha);
}

DenseState canonical_state(const CanonicalSpec& spec) {
  const int n = spec.total_sites;
  check_sites(n);
  const int pairs = static_cast<int>(spec.thetas.size());
  if (2 * pairs > n) throw std::invalid_argument("canonical_state: 2 * pairs must not exceed N");
  const std::int64_t dim = 1LL << n;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
  for (std::uint64_t mask = 0; mask < (1ULL << pairs); ++mask) {
    double amp = 1.0;
    std::uint64_t index = 0;
    for (int i = 0; i < pairs; ++i) {
      if (mask & (1ULL << i)) {
        amp *= std::sin(spec.thetas[i]);
        index |= site_bit(n, i) | site_bit(n, pairs + i);
      } else {
        amp *= std::cos(spec.thetas[i]);
      }
    }
    amps(static_cast<std::int64_t>(index)) += amp;
  }
  return DenseState(n, std::move(amps));
}

double canonical_purity(const std::vector<double>& lambdas) {
  double prod = 1.0;
  for (double l : lambdas) {
    if (l < 0.0 || l > 1.0) throw std::invalid_argument("canonical_purity: lambda outside [0, 1]");
    double l2 = l * l;
    prod *= 1.0 - l2 + l2 * l2;
  }
  return prod;
}

DenseState apply_local_unitaries(const DenseState& psi, const Eigen::MatrixXcd& u_a,
                                 const Eigen::MatrixXcd& u_b, int ell_a) {
  const int n = psi.sites;
  if (ell_a < 1 || ell_a >= n) throw std::invalid_argument("apply_local_unitaries: bad bipartition");
  const std::int64_t da = 1LL << ell_a;
  const std::int64_t db = 1LL << (n - ell_a);
  if (u_a.rows() != da || u_a.cols() != da || u_b.rows() != db || u_b.cols() != db)
    throw std::invalid_argument("apply_local_unitaries: dimension mismatch");
  auto unitary_defect = [](const Eigen::MatrixXcd& u) {
    return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  };
  if (unitary_defect(u_a) > 1e-8 || unitary_defect(u_b) > 1e-8)
    throw std::invalid_argument("apply_local_unitaries: factors are not unitary");

  using RowMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> m(psi.amplitudes.data(), da, db);
  RowMat out = u_a * m * u_b.transpose();
  DenseState result;
  result.sites = n;
  result.amplitudes = Eigen::Map<Eigen::VectorXcd>(out.data(), da * db);
  return result;
}

DenseState ising_ground_state_dense(int sites, double mu) {
  check_sites(sites);
  const std::int64_t dim = 1LL << sites;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::int64_t y = 0; y < dim; ++y) {
    double diag = 0.0;
    for (int j = 0; j < sites; ++j)
      diag += (y & site_bit(sites, j)) ? 1.0 : -1.0;  // -mu Z_j
    h(y, y) = mu * diag;
    for (int j = 0; j < sites; ++j) {
      int jn = (j + 1) % sites;
      std::int64_t flipped = y ^ site_bit(sites, j) ^ site_bit(sites, jn);
      h(flipped, y) -= 1.0;  // -X_j X_{j+1}
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("ising_ground_state_dense: eigensolver failed");
  Eigen::VectorXcd amps = solver.eigenvectors().col(0).cast<cd>();
  amps /= amps.norm();
  return DenseState(sites, std::move(amps));
}

}  // namespace fnl
