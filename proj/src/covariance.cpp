#include "fnl/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fnl {

namespace {

constexpr double kAntisymmetryTol = 1e-12;
constexpr double kSingularRangeTol = 1e-10;
constexpr double kPairTol = 1e-6;

// Eigenvalues of Gamma Gamma^T are the squared singular values, each exactly
// doubled for antisymmetric Gamma; numerically robust and O(n^3) without a
// full SVD.
std::vector<double> singular_values_desc(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd s = m * m.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("singular_values: eigensolver failed");
  const auto& ev = solver.eigenvalues();  // ascending
  std::vector<double> out(ev.size());
  for (int i = 0; i < ev.size(); ++i)
    out[ev.size() - 1 - i] = std::sqrt(std::max(0.0, ev(i)));
  return out;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(int modes, Eigen::MatrixXd entries)
    : modes_(modes), entries_(std::move(entries)) {
  if (modes_ < 1) throw std::invalid_argument("CovarianceMatrix: need at least one mode");
  const int dim = 2 * modes_;
  if (entries_.rows() != dim || entries_.cols() != dim)
    throw std::invalid_argument("CovarianceMatrix: entries must be 2N x 2N");
  double asym = (entries_ + entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kAntisymmetryTol) {
    std::ostringstream msg;
    msg << "CovarianceMatrix: antisymmetry violated by " << asym;
    throw std::invalid_argument(msg.str());
  }
  auto sv = singular_values_desc(entries_);
  if (!sv.empty() && sv.front() > 1.0 + kSingularRangeTol) {
    std::ostringstream msg;
    msg << "CovarianceMatrix: singular value " << sv.front() << " exceeds 1";
    throw std::invalid_argument(msg.str());
  }
}

double CovarianceMatrix::purity_defect() const {
  const int dim = 2 * modes_;
  Eigen::MatrixXd g = entries_ * entries_.transpose() - Eigen::MatrixXd::Identity(dim, dim);
  return g.cwiseAbs().maxCoeff();
}

BipartitionSpec::BipartitionSpec(std::vector<int> sites, int total_modes)
    : sites_(std::move(sites)), total_modes_(total_modes) {
  if (sites_.empty()) throw std::invalid_argument("BipartitionSpec: subsystem must be nonempty");
  if (static_cast<int>(sites_.size()) > total_modes_)
    throw std::invalid_argument("BipartitionSpec: subsystem larger than the system");
  std::set<int> seen;
  for (int s : sites_) {
    if (s < 0 || s >= total_modes_)
      throw std::invalid_argument("BipartitionSpec: site index out of range");
    if (!seen.insert(s).second)
      throw std::invalid_argument("BipartitionSpec: duplicate site index");
  }
  std::sort(sites_.begin(), sites_.end());
}

std::vector<int> BipartitionSpec::majorana_indices() const {
  std::vector<int> idx;
  idx.reserve(2 * sites_.size());
  for (int s : sites_) {
    idx.push_back(2 * s);
    idx.push_back(2 * s + 1);
  }
  return idx;
}

BipartitionSpec BipartitionSpec::complement() const {
  std::vector<int> rest;
  rest.reserve(total_modes_ - sites_.size());
  std::size_t j = 0;
  for (int s = 0; s < total_modes_; ++s) {
    if (j < sites_.size() && sites_[j] == s) {
      ++j;
    } else {
      rest.push_back(s);
    }
  }
  return BipartitionSpec(std::move(rest), total_modes_);
}

BipartitionSpec BipartitionSpec::prefix(int ell, int total_modes) {
  std::vector<int> sites(ell);
  for (int i = 0; i < ell; ++i) sites[i] = i;
  return BipartitionSpec(std::move(sites), total_modes);
}

WeightOrder::WeightOrder(int a) : alpha(a) {
  if (a < 2) throw std::invalid_argument("WeightOrder: alpha must be an integer >= 2");
}

CovarianceMatrix vacuum_covariance(int modes) {
  if (modes < 1) throw std::invalid_argument("vacuum_covariance: N must be >= 1");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int m = 0; m < modes; ++m) {
    g(2 * m, 2 * m + 1) = 1.0;
    g(2 * m + 1, 2 * m) = -1.0;
  }
  return CovarianceMatrix(modes, std::move(g));
}

CovarianceMatrix rainbow_covariance(int modes) {
  if (modes < 2 || modes % 2 != 0)
    throw std::invalid_argument("rainbow_covariance: N must be even and >= 2");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int j = 0; j < modes / 2; ++j) {
    const int a = j;
    const int b = modes - 1 - j;
    // Bell pair between mirror sites: gamma_{2a} couples to gamma_{2b+1} and
    // gamma_{2a+1} to gamma_{2b}; Jordan-Wigner strings across complete inner
    // pairs contribute +1.
    g(2 * a, 2 * b + 1) = 1.0;
    g(2 * b + 1, 2 * a) = -1.0;
    g(2 * a + 1, 2 * b) = 1.0;
    g(2 * b, 2 * a + 1) = -1.0;
  }
  return CovarianceMatrix(modes, std::move(g));
}

CovarianceMatrix conjugate(const CovarianceMatrix& gamma, const Eigen::MatrixXd& orthogonal) {
  const int dim = 2 * gamma.modes();
  if (orthogonal.rows() != dim || orthogonal.cols() != dim)
    throw std::invalid_argument("conjugate: dimension mismatch");
  double defect =
      (orthogonal.transpose() * orthogonal - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    std::ostringstream msg;
    msg << "conjugate: matrix is not orthogonal, ||O^T O - I|| = " << defect;
    throw std::invalid_argument(msg.str());
  }
  Eigen::MatrixXd out = orthogonal * gamma.entries() * orthogonal.transpose();
  out = 0.5 * (out - out.transpose().eval());  // strip roundoff
  return CovarianceMatrix(gamma.modes(), std::move(out));
}

Eigen::MatrixXd restrict_block(const CovarianceMatrix& gamma, const BipartitionSpec& part) {
  if (part.total_modes() != gamma.modes())
    throw std::invalid_argument("restrict_block: bipartition sized for a different system");
  auto idx = part.majorana_indices();
  const int n = static_cast<int>(idx.size());
  Eigen::MatrixXd block(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) block(i, j) = gamma.entries()(idx[i], idx[j]);
  return block;
}

ModeSpectrum mode_spectrum(const Eigen::MatrixXd& block, double clamp_tol) {
  if (block.rows() != block.cols()) throw std::invalid_argument("mode_spectrum: block not square");
  if (block.rows() % 2 != 0) throw std::invalid_argument("mode_spectrum: odd dimension");
  if (block.rows() == 0) return {};
  double asym = (block + block.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    std::ostringstream msg;
    msg << "mode_spectrum: block not antisymmetric (defect " << asym << ")";
    throw std::invalid_argument(msg.str());
  }
  auto sv = singular_values_desc(block);
  ModeSpectrum spec;
  spec.values.reserve(sv.size() / 2);
  for (std::size_t i = 0; i + 1 < sv.size(); i += 2) {
    if (std::abs(sv[i] - sv[i + 1]) > kPairTol) {
      std::ostringstream msg;
      msg << "mode_spectrum: singular values not paired (" << sv[i] << " vs " << sv[i + 1] << ")";
      throw std::runtime_error(msg.str());
    }
    double lambda = 0.5 * (sv[i] + sv[i + 1]);
    if (lambda > 1.0) {
      if (lambda - 1.0 > clamp_tol) {
        std::ostringstream msg;
        msg << "mode_spectrum: eigenvalue " << lambda << " beyond clamp tolerance";
        throw std::runtime_error(msg.str());
      }
      lambda = 1.0;
    }
    spec.values.push_back(lambda);
  }
  return spec;
}

double magic_weight(const WeightOrder& alpha, double x) {
  if (x < -1e-12 || x > 1.0 + 1e-12)
    throw std::invalid_argument("magic_weight: argument outside [0, 1]");
  x = std::clamp(x, 0.0, 1.0);
  // ((1-x)^a + 1 + x^a)/2 = 1 + ((1-x)^a + x^a - 1)/2; log1p keeps precision
  // near both endpoints, where the weight vanishes.
  double u = 0.5 * (std::pow(1.0 - x, alpha.alpha) + std::pow(x, alpha.alpha) - 1.0);
  return std::log1p(u) / ((1.0 - alpha.alpha) * M_LN2);
}

double fnl_magic(const ModeSpectrum& spectrum, const WeightOrder& alpha) {
  double total = 0.0;
  for (double lambda : spectrum.values) {
    if (lambda >= 1.0) continue;  // unentangled mode contributes exactly zero
    total += magic_weight(alpha, lambda * lambda);
  }
  return total;
}

double fnl_magic(const CovarianceMatrix& gamma, const BipartitionSpec& part,
                 const WeightOrder& alpha, const FnlOptions& opts) {
  if (opts.check_purity && !gamma.is_pure(opts.purity_tol)) {
    std::ostringstream msg;
    msg << "fnl_magic: state not pure (defect " << gamma.purity_defect()
        << "); the closed form assumes a pure state";
    throw std::invalid_argument(msg.str());
  }
  const BipartitionSpec* side = &part;
  BipartitionSpec comp = part.complement();
  if (part.size() > gamma.modes() - part.size() && comp.size() > 0) side = &comp;
  return fnl_magic(mode_spectrum(restrict_block(gamma, *side)), alpha);
}

double binary_entropy(double x) {
  x = std::clamp(x, 0.0, 1.0);
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

double entanglement_entropy(const ModeSpectrum& spectrum) {
  double total = 0.0;
  for (double lambda : spectrum.values) total += binary_entropy(0.5 * (1.0 + lambda));
  return total;
}

std::vector<double> entanglement_energies(const ModeSpectrum& spectrum) {
  std::vector<double> eps;
  eps.reserve(spectrum.values.size());
  for (double lambda : spectrum.values) {
    if (lambda >= 1.0) {
      eps.push_back(std::numeric_limits<double>::infinity());
    } else {
      eps.push_back(2.0 * std::atanh(lambda));
    }
  }
  return eps;
}

namespace {

// max over lambda in [0,1] of |d m2(lambda^2)/d lambda|, pinned once by a
// dense scan and cached; the maximum 2/ln2 sits at the lambda = 1 endpoint.
double lipschitz_constant() {
  static std::once_flag flag;
  static double value = 0.0;
  std::call_once(flag, [] {
    const double step = 1e-5;
    double best = 0.0;
    for (double l = 0.0; l <= 1.0 + 0.5 * step; l += step) {
      double lam = std::min(l, 1.0);
      double denom = (1.0 - lam * lam + lam * lam * lam * lam) * M_LN2;
      double d = std::abs(2.0 * lam * (1.0 - 2.0 * lam * lam)) / denom;
      best = std::max(best, d);
    }
    value = best;
  });
  return value;
}

}  // namespace

double fnl_error_bound(int ell, double frobenius_perturbation) {
  if (ell < 0 || frobenius_perturbation < 0.0)
    throw std::invalid_argument("fnl_error_bound: inputs must be nonnegative");
  return lipschitz_constant() * std::sqrt(static_cast<double>(ell)) * frobenius_perturbation;
}

long long shots_estimate(int ell, double epsilon, double delta) {
  if (ell < 1) throw std::invalid_argument("shots_estimate: ell must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("shots_estimate: epsilon and delta must lie in (0, 1)");
  double l = static_cast<double>(ell);
  return static_cast<long long>(std::ceil(l * l * l * std::log(l / delta) / (epsilon * epsilon)));
}

}  // namespace fnl
