#include "finslerq/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "finslerq/errors.hpp"

namespace finslerq {
namespace {

// Newton iteration on the Legendre recurrence, then map [-1, 1] -> [0, 1].
GaussLegendreRule build_rule(int order) {
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
  if (order < 1 || order > kMaxGaussOrder) {
    throw Error(ErrorKind::MalformedInput, "quadrature order must be in [1, 32]");
  }
  static const std::array<GaussLegendreRule, kMaxGaussOrder> rules = [] {
    std::array<GaussLegendreRule, kMaxGaussOrder> out;
    for (int k = 1; k <= kMaxGaussOrder; ++k) out[k - 1] = build_rule(k);
    return out;
  }();
  return rules[order - 1];
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tolerance) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_adaptive(f, b, a, tolerance);
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tolerance);
}

}  // namespace finslerq
