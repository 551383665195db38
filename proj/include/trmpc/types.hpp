#pragma once

#include <Eigen/Dense>

namespace trmpc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace trmpc
