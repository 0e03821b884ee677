#pragma once

#include <Eigen/Core>

namespace lbsvm {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Frames stored one per row.
template <typename Scalar>
using FrameMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Vector = VectorX<double>;
using FrameMatrix = FrameMatrixX<double>;
using Matrix = Eigen::MatrixXd;

}  // namespace lbsvm
