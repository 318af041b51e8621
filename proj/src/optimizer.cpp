#include "fnl/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "fnl/parallel.hpp"
#include "fnl/rng.hpp"

namespace fnl {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

void fwht_inplace(Eigen::VectorXcd& v) {
  const std::int64_t n = v.size();
  for (std::int64_t len = 1; len < n; len <<= 1)
    for (std::int64_t i = 0; i < n; i += 2 * len)
      for (std::int64_t j = i; j < i + len; ++j) {
        cd a = v[j];
        cd b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
}

cd i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Stabilizer entropy M_alpha of the amplitude vector, optionally with the
// Wirtinger gradient dM/d(conj psi) via a second Walsh-Hadamard pass per
// x-shift.
double sre_with_gradient(const Eigen::VectorXcd& psi, int alpha, Eigen::VectorXcd* grad) {
  const std::int64_t dim = psi.size();
  const double d = static_cast<double>(dim);
  long double zeta_acc = 0.0L;
  Eigen::VectorXcd buf(dim), r(dim);
  if (grad) grad->setZero(dim);

  for (std::int64_t x = 0; x < dim; ++x) {
    for (std::int64_t y = 0; y < dim; ++y) buf(y) = std::conj(psi(y ^ x)) * psi(y);
    fwht_inplace(buf);
    for (std::int64_t z = 0; z < dim; ++z) {
      const cd phase = i_power(std::popcount(static_cast<std::uint64_t>(x & z)));
      const double p = (phase * buf(z)).real();
      const double p2 = p * p;
      double pow_val = 1.0;
      for (int a = 0; a < alpha; ++a) pow_val *= p2;
      zeta_acc += pow_val;  // p^{2 alpha}
      if (grad) r(z) = (p != 0.0 ? pow_val / p : 0.0) * phase;  // p^{2a-1} phase
    }
    if (grad) {
      fwht_inplace(r);  // A_x(v) = sum_z p^{2a-1} phase (-1)^{z.v}
      for (std::int64_t w = 0; w < dim; ++w)
        (*grad)(w) += psi(w ^ x) * (r(w ^ x) + std::conj(r(w)));
    }
  }

  const double zeta = static_cast<double>(zeta_acc / d);
  if (grad) {
    // M = log2(zeta)/(1-alpha); dzeta/d(conj psi) carries the alpha/d factor.
    const double scale = alpha / d / ((1.0 - alpha) * zeta * M_LN2);
    *grad *= scale;
  }
  return std::log2(zeta) / (1.0 - alpha);
}

// One side of the local-unitary parameterization: angles -> Hermitian
// generator H with U = exp(-i H), plus the gradient readout 2 Re tr[tau_p Z]
// against the generator basis.
class SideParameterization {
 public:
  SideParameterization(int sites, UnitaryClass cls) : sites_(sites), cls_(cls) {
    dim_ = 1LL << sites;
    if (cls_ == UnitaryClass::kGeneric) {
      n_params_ = static_cast<int>(dim_ * dim_);
    } else {
      const int majoranas = 2 * sites;
      n_params_ = majoranas * (majoranas - 1) / 2;
      generators_.reserve(n_params_);
      for (int m = 0; m < majoranas; ++m)
        for (int n = m + 1; n < majoranas; ++n) {
          // tau = 2 i gamma_m gamma_n, Hermitian; dense via single-column
          // Majorana action.
          Eigen::MatrixXcd tau(dim_, dim_);
          for (std::int64_t col = 0; col < dim_; ++col) {
            DenseState basis = DenseState::computational_basis(sites_, col);
            DenseState v = apply_majorana(apply_majorana(basis, n), m);
            tau.col(col) = 2.0 * kI * v.amplitudes;
          }
          generators_.push_back(std::move(tau));
        }
    }
  }

  int parameter_count() const { return n_params_; }
  std::int64_t dim() const { return dim_; }

  Eigen::MatrixXcd hermitian(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim_, dim_);
    if (cls_ == UnitaryClass::kGeneric) {
      int p = 0;
      for (std::int64_t a = 0; a < dim_; ++a) h(a, a) = theta(p++);
      for (std::int64_t a = 0; a < dim_; ++a)
        for (std::int64_t b = a + 1; b < dim_; ++b) {
          const cd v(theta(p), theta(p + 1));
          p += 2;
          h(a, b) = v;
          h(b, a) = std::conj(v);
        }
    } else {
      for (int p = 0; p < n_params_; ++p) h += theta(p) * generators_[p];
    }
    return h;
  }

  Eigen::MatrixXcd exponential(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian(theta));
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("variational_min: eigensolver failed");
    Eigen::VectorXcd phases(dim_);
    for (std::int64_t i = 0; i < dim_; ++i) phases(i) = std::exp(-kI * solver.eigenvalues()(i));
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
  }

  // Writes dC/dtheta_p = 2 Re tr[tau_p Z] for the tangent matrix Z at the
  // identity.
  void readout(const Eigen::MatrixXcd& z, Eigen::Ref<Eigen::VectorXd> grad) const {
    if (cls_ == UnitaryClass::kGeneric) {
      int p = 0;
      for (std::int64_t a = 0; a < dim_; ++a) grad(p++) = 2.0 * z(a, a).real();
      for (std::int64_t a = 0; a < dim_; ++a)
        for (std::int64_t b = a + 1; b < dim_; ++b) {
          grad(p++) = 2.0 * (z(b, a) + z(a, b)).real();
          grad(p++) = -2.0 * (z(b, a) - z(a, b)).imag();
        }
    } else {
      for (int p = 0; p < n_params_; ++p)
        grad(p) = 2.0 * (generators_[p].cwiseProduct(z.transpose())).sum().real();
    }
  }

 private:
  int sites_;
  UnitaryClass cls_;
  std::int64_t dim_ = 0;
  int n_params_ = 0;
  std::vector<Eigen::MatrixXcd> generators_;
};

using RowMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Cost surface around a pair of base unitaries, re-centered after every
// accepted step so gradients are always taken at the identity tangent.
class RecenteredProblem {
 public:
  RecenteredProblem(const DenseState& psi, int ell_a, UnitaryClass cls, int alpha)
      : alpha_(alpha), side_a_(ell_a, cls), side_b_(psi.sites - ell_a, cls) {
    r_ = Eigen::Map<const RowMat>(psi.amplitudes.data(), side_a_.dim(), side_b_.dim());
    base_a_ = Eigen::MatrixXcd::Identity(side_a_.dim(), side_a_.dim());
    base_b_ = Eigen::MatrixXcd::Identity(side_b_.dim(), side_b_.dim());
  }

  int n_params() const { return side_a_.parameter_count() + side_b_.parameter_count(); }
  int n_params_a() const { return side_a_.parameter_count(); }
  const SideParameterization& side_a() const { return side_a_; }
  const SideParameterization& side_b() const { return side_b_; }

  double cost_at(const Eigen::VectorXd& delta) const {
    const RowMat phi = rotated(delta);
    Eigen::Map<const Eigen::VectorXcd> phi_vec(phi.data(), phi.size());
    Eigen::VectorXcd tmp = phi_vec;
    return sre_with_gradient(tmp, alpha_, nullptr);
  }

  // Cost and gradient at delta = 0 for the current bases.
  double gradient_at_zero(Eigen::VectorXd& grad) const {
    const RowMat phi = base_a_ * r_ * base_b_.transpose();
    Eigen::Map<const Eigen::VectorXcd> phi_vec(phi.data(), phi.size());
    Eigen::VectorXcd tmp = phi_vec;
    Eigen::VectorXcd g_vec;
    const double value = sre_with_gradient(tmp, alpha_, &g_vec);
    Eigen::Map<const RowMat> g(g_vec.data(), side_a_.dim(), side_b_.dim());
    // dC = 2 Re tr[G^dag dPhi]; dU = -i tau U at the identity gives
    //   Z_A = -i Phi G^dag,  Z_B = -i (G^dag Phi)^T.
    const Eigen::MatrixXcd z_a = -kI * (phi * g.adjoint());
    const Eigen::MatrixXcd z_b = (-kI * (g.adjoint() * phi)).transpose();
    grad.resize(n_params());
    side_a_.readout(z_a, grad.head(side_a_.parameter_count()));
    side_b_.readout(z_b, grad.tail(side_b_.parameter_count()));
    return value;
  }

  void recenter(const Eigen::VectorXd& delta) {
    base_a_ = side_a_.exponential(delta.head(side_a_.parameter_count())) * base_a_;
    base_b_ = side_b_.exponential(delta.tail(side_b_.parameter_count())) * base_b_;
  }

  void set_bases(Eigen::MatrixXcd a, Eigen::MatrixXcd b) {
    base_a_ = std::move(a);
    base_b_ = std::move(b);
  }

 private:
  RowMat rotated(const Eigen::VectorXd& delta) const {
    const Eigen::MatrixXcd u_a =
        side_a_.exponential(delta.head(side_a_.parameter_count())) * base_a_;
    const Eigen::MatrixXcd u_b =
        side_b_.exponential(delta.tail(side_b_.parameter_count())) * base_b_;
    return u_a * r_ * u_b.transpose();
  }

  int alpha_;
  SideParameterization side_a_;
  SideParameterization side_b_;
  RowMat r_;
  Eigen::MatrixXcd base_a_, base_b_;
};

struct LbfgsOutcome {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

LbfgsOutcome lbfgs_minimize(RecenteredProblem& problem, const OptimizerConfig& cfg) {
  const int n = problem.n_params();
  const int memory = 10;
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  auto gradient = [&](Eigen::VectorXd& g) {
    if (cfg.finite_difference_gradient) {
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
      const double c0 = problem.cost_at(zero);
      g.resize(n);
      Eigen::VectorXd shifted = zero;
      for (int p = 0; p < n; ++p) {
        shifted(p) = cfg.fd_step;
        g(p) = (problem.cost_at(shifted) - c0) / cfg.fd_step;
        shifted(p) = 0.0;
      }
      return c0;
    }
    return problem.gradient_at_zero(g);
  };

  Eigen::VectorXd grad(n);
  double value = gradient(grad);
  LbfgsOutcome out;
  out.value = value;
  int stalled = 0;

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    if (grad.norm() < 1e-10) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd q = grad;
    std::vector<double> alpha_coef(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha_coef[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha_coef[i] * y_hist[i];
    }
    if (!s_hist.empty())
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha_coef[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd direction = -q;
    double slope = direction.dot(grad);
    if (slope >= 0.0) {
      direction = -grad;
      slope = -grad.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    // Armijo with quadratic-interpolation backtracking; accepted unit steps
    // are extended while they keep paying off.
    double step = s_hist.empty() ? std::min(1.0, 1.0 / std::max(1e-12, grad.norm())) : 1.0;
    double new_value = value;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      new_value = problem.cost_at(step * direction);
      if (new_value <= value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      const double denom = 2.0 * (new_value - value - slope * step);
      const double quad = denom > 0.0 ? -slope * step * step / denom : 0.5 * step;
      step = std::clamp(quad, 0.1 * step, 0.5 * step);
    }
    if (!accepted) break;
    for (int ext = 0; ext < 6; ++ext) {
      const double longer_value = problem.cost_at(2.0 * step * direction);
      if (longer_value >= new_value) break;
      step *= 2.0;
      new_value = longer_value;
    }

    const Eigen::VectorXd s = step * direction;
    problem.recenter(s);
    Eigen::VectorXd new_grad(n);
    const double recomputed = gradient(new_grad);
    (void)recomputed;

    const Eigen::VectorXd y = new_grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double delta = value - new_value;
    grad = new_grad;
    value = new_value;
    out.value = value;
    out.iterations = iter + 1;
    if (delta >= 0.0 && delta < cfg.convergence) {
      if (++stalled >= 2) {
        out.converged = true;
        break;
      }
    } else {
      stalled = 0;
    }
  }
  return out;
}

}  // namespace

int variational_parameter_count(int sites, int ell_a, UnitaryClass unitary_class) {
  if (ell_a < 1 || ell_a >= sites) throw std::invalid_argument("bad bipartition");
  auto side = [&](int s) {
    if (unitary_class == UnitaryClass::kGeneric) {
      const std::int64_t d = 1LL << s;
      return static_cast<int>(d * d);
    }
    const int m = 2 * s;
    return m * (m - 1) / 2;
  };
  return side(ell_a) + side(sites - ell_a);
}

double variational_cost(const DenseState& psi, int ell_a, const OptimizerConfig& cfg,
                        const Eigen::VectorXd& frame_angles, const Eigen::VectorXd& delta) {
  RecenteredProblem problem(psi, ell_a, cfg.unitary_class, cfg.alpha);
  if (frame_angles.size() != problem.n_params() || delta.size() != problem.n_params())
    throw std::invalid_argument("variational_cost: wrong number of angles");
  problem.recenter(frame_angles);
  return problem.cost_at(delta);
}

double variational_gradient(const DenseState& psi, int ell_a, const OptimizerConfig& cfg,
                            const Eigen::VectorXd& frame_angles, Eigen::VectorXd& grad) {
  RecenteredProblem problem(psi, ell_a, cfg.unitary_class, cfg.alpha);
  if (frame_angles.size() != problem.n_params())
    throw std::invalid_argument("variational_gradient: wrong number of angles");
  problem.recenter(frame_angles);
  return problem.gradient_at_zero(grad);
}

VariationalResult variational_min(const DenseState& psi, int ell_a, const OptimizerConfig& cfg) {
  if (psi.sites > 10) throw std::invalid_argument("variational_min: N <= 10");
  if (ell_a < 1 || ell_a >= psi.sites)
    throw std::invalid_argument("variational_min: bad bipartition");

  std::vector<LbfgsOutcome> outcomes(cfg.restarts);
  parallel_for(cfg.restarts, cfg.threads, [&](std::size_t r) {
    RecenteredProblem problem(psi, ell_a, cfg.unitary_class, cfg.alpha);
    Rng rng = derive_stream(cfg.seed, r);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    Eigen::VectorXd theta(problem.n_params());
    for (int p = 0; p < theta.size(); ++p) theta(p) = angle(rng);
    problem.recenter(theta);  // random initial frame
    outcomes[r] = lbfgs_minimize(problem, cfg);
  });

  VariationalResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    if (outcomes[r].value < best.value) {
      best.value = outcomes[r].value;
      best.best_restart = r;
      best.converged = outcomes[r].converged;
      best.iterations = outcomes[r].iterations;
    }
  }
  return best;
}

}  // namespace fnl
