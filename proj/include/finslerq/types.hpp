#pragma once

#include <limits>

#include <Eigen/Dense>

namespace finslerq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Values above this are treated as diverging suprema.
inline constexpr double kDivergenceCap = 1e6;

}  // namespace finslerq
