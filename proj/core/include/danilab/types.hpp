#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace danilab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Single threshold for every |det| test that guards a matrix inverse.
inline constexpr double kInvertTol = 1e-9;

// Default pivot threshold for rank-revealing eliminations.
inline constexpr double kRankTol = 1e-9;

}  // namespace danilab
