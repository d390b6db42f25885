#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace fpa {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
// Column-major: every hot kernel (block gradients, residual updates) walks
// column slabs of A.
using Matrix = Eigen::MatrixXd;

using IndexList = std::vector<Index>;

}  // namespace fpa
