#pragma once

#include <Eigen/Core>

namespace infoflow {

using Mat = Eigen::MatrixXd;  // batches are row-per-sample
using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;

}  // namespace infoflow
