#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace fnl {

// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached; computed once per order by Newton iteration on P_n.
const GaussLegendreRule& gauss_legendre(int order);

// Composite Gauss-Legendre integral of f over [a, b] with `panels` equal panels.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order = 16);

struct QuadratureResult {
  double value = 0.0;
  double achieved_tol = 0.0;
  bool converged = false;
  int panels = 0;
};

// Doubles the panel count until two successive composite rules differ by less
// than abs_tol. Reports the achieved tolerance instead of silently truncating.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, int initial_panels = 4,
                                    int max_doublings = 16, int order = 16);

// Same doubling driver for vector-valued integrands (e.g. all Fourier
// coefficients of a symbol in one sweep). `eval` must return the composite
// rule value for the requested panel count.
QuadratureResult refine_panels(const std::function<Eigen::VectorXd(int)>& eval,
                               Eigen::VectorXd& out, double abs_tol,
                               int initial_panels = 4, int max_doublings = 16);

}  // namespace fnl
