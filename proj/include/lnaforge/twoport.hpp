#pragma once

#include <Eigen/Dense>
#include <complex>

namespace lnaforge::twoport {

/// ABCD (chain) matrix. Port-2 current flows out of the network, so a
/// cascade is a plain matrix product.
template <typename Scalar>
using Chain = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

template <typename Scalar>
using Admittance = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

template <typename Scalar>
Chain<Scalar> identity() {
  return Chain<Scalar>::Identity();
}

template <typename Scalar>
Chain<Scalar> series(const std::complex<Scalar>& z) {
  Chain<Scalar> m;
  m << Scalar(1), z, Scalar(0), Scalar(1);
  return m;
}

template <typename Scalar>
Chain<Scalar> shunt(const std::complex<Scalar>& y) {
  Chain<Scalar> m;
  m << Scalar(1), Scalar(0), y, Scalar(1);
  return m;
}

/// Y-parameters (both currents into the network) to ABCD. Needs y21 != 0.
template <typename Scalar>
Chain<Scalar> from_admittance(const Admittance<Scalar>& y) {
  const std::complex<Scalar> y21 = y(1, 0);
  const std::complex<Scalar> det = y(0, 0) * y(1, 1) - y(0, 1) * y(1, 0);
  Chain<Scalar> m;
  m << -y(1, 1) / y21, Scalar(-1) / y21, -det / y21, -y(0, 0) / y21;
  return m;
}

/// Impedance looking into port 1 with `z_load` on port 2.
template <typename Scalar>
std::complex<Scalar> input_impedance(const Chain<Scalar>& m, const std::complex<Scalar>& z_load) {
  return (m(0, 0) * z_load + m(0, 1)) / (m(1, 0) * z_load + m(1, 1));
}

/// Impedance looking into port 2 with `z_source` on port 1.
template <typename Scalar>
std::complex<Scalar> output_impedance(const Chain<Scalar>& m, const std::complex<Scalar>& z_source) {
  return (m(1, 1) * z_source + m(0, 1)) / (m(1, 0) * z_source + m(0, 0));
}

/// S-parameters for real reference resistances r1 (port 1) and r2 (port 2).
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 2, 2> to_s(const Chain<Scalar>& m, Scalar r1, Scalar r2) {
  const auto a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const std::complex<Scalar> den = a * r2 + b + c * r1 * r2 + d * r1;
  const Scalar root = std::sqrt(r1 * r2);
  Eigen::Matrix<std::complex<Scalar>, 2, 2> s;
  s(0, 0) = (a * r2 + b - c * r1 * r2 - d * r1) / den;
  s(0, 1) = Scalar(2) * (a * d - b * c) * root / den;
  s(1, 0) = Scalar(2) * root / den;
  s(1, 1) = (-a * r2 + b - c * r1 * r2 + d * r1) / den;
  return s;
}

}  // namespace lnaforge::twoport
