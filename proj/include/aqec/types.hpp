#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace aqec {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Largest statevector the simulator will allocate (qubits, or qudits of equal dimension
/// whose Hilbert space does not exceed 2^kMaxQubits).
inline constexpr int kMaxQubits = 20;

inline constexpr double kEuler = 2.718281828459045235360287471352662498;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace aqec
