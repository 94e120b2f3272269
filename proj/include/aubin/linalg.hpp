#pragma once

#include <Eigen/Dense>

namespace aubin {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace aubin
