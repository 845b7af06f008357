#pragma once

#include "carnot/rational.hpp"

#include <Eigen/Dense>

#include <vector>

namespace carnot {

/// Numeric point in exponential coordinates of a graded basis; also used for
/// ambient tangent vectors.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Exact point with rational coordinates.
using RationalPoint = std::vector<Rational>;

}  // namespace carnot
