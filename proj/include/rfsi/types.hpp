#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rfsi {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RSparse = Eigen::SparseMatrix<double>;
using CSparse = Eigen::SparseMatrix<cplx>;
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace rfsi
