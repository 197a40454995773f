#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nlc {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr cd I{0.0, 1.0};

// Sites are 1-based throughout the public API, matching the chain labels
// n = 1..N. Storage vectors are 0-based, so site n lives at index n-1.

} // namespace nlc
