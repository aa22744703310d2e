#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace irssec {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kLog2e = 1.44269504088896340736;

// Phases of the reflecting elements, one per element, kept in [0, 2pi).
using PhaseVector = RVec;

inline double wrap_phase(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline CVec unit_modulus(const PhaseVector& theta) {
  CVec v(theta.size());
  for (Eigen::Index m = 0; m < theta.size(); ++m) v(m) = std::polar(1.0, theta(m));
  return v;
}

}  // namespace irssec
