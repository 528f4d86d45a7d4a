#pragma once

#include <functional>
#include <vector>

namespace finslerq {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kMaxGaussOrder = 32;

/// Cached rule for 1 <= order <= kMaxGaussOrder.
const GaussLegendreRule& gauss_legendre(int order);

/// Adaptive Gauss-Kronrod integral of f over [a, b]; a > b flips the sign.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tolerance = 1e-13);

}  // namespace finslerq
