#include "fnl/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fnl {

namespace {

GaussLegendreRule compute_rule(int order) {
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n(x).
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
  if (order < 2) throw std::invalid_argument("gauss_legendre: order must be >= 2");
  static std::map<int, GaussLegendreRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order) {
  const auto& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double acc = 0.0;
    for (int i = 0; i < order; ++i) acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    total += 0.5 * h * acc;
  }
  return total;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, int initial_panels, int max_doublings,
                                    int order) {
  QuadratureResult res;
  int panels = initial_panels;
  double prev = integrate_panels(f, a, b, panels, order);
  for (int k = 0; k < max_doublings; ++k) {
    panels *= 2;
    double cur = integrate_panels(f, a, b, panels, order);
    res.achieved_tol = std::abs(cur - prev);
    res.value = cur;
    res.panels = panels;
    if (res.achieved_tol < abs_tol) {
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  return res;
}

QuadratureResult refine_panels(const std::function<Eigen::VectorXd(int)>& eval,
                               Eigen::VectorXd& out, double abs_tol, int initial_panels,
                               int max_doublings) {
  QuadratureResult res;
  int panels = initial_panels;
  Eigen::VectorXd prev = eval(panels);
  for (int k = 0; k < max_doublings; ++k) {
    panels *= 2;
    Eigen::VectorXd cur = eval(panels);
    res.achieved_tol = (cur - prev).cwiseAbs().maxCoeff();
    res.panels = panels;
    out = cur;
    if (res.achieved_tol < abs_tol) {
      res.converged = true;
      return res;
    }
    prev.swap(cur);
  }
  return res;
}

}  // namespace fnl
