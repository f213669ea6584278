// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>

#include <Eigen/Core>

namespace aqfc {

/// Implicit quadric
///   q(x,y,z) = a11 x^2 + a22 y^2 + a33 z^2 + a12 xy + a13 xz + a23 yz
///            + a14 x + a24 y + a34 z + a44
/// with coefficients stored in exactly that order everywhere (fits, dumps).
template <typename Scalar>
struct Quadric {
  using Coefficients = Eigen::Matrix<Scalar, 10, 1>;
  enum Slot { A11 = 0, A22, A33, A12, A13, A23, A14, A24, A34, A44 };

  Coefficients coeffs = Coefficients::Zero();

  Quadric() = default;
  explicit Quadric(const Coefficients& c) : coeffs(c) {}

  Scalar operator[](int i) const { return coeffs[i]; }
  Scalar& operator[](int i) { return coeffs[i]; }

  /// x^2 + y^2 + z^2 - r^2 scaled by 1/2, so that the gradient is the position.
  static Quadric sphere(Scalar radius = Scalar(1)) {
    Quadric q;
    q.coeffs << Scalar(0.5), Scalar(0.5), Scalar(0.5), 0, 0, 0, 0, 0, 0, Scalar(-0.5) * radius * radius;
    return q;
  }
};

using Quadricd = Quadric<double>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// Monomial basis (x^2, y^2, z^2, xy, xz, yz, x, y, z, 1).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 10, 1> monomials(const Eigen::MatrixBase<Derived>& p) {
  using S = typename Derived::Scalar;
  const S x = p[0], y = p[1], z = p[2];
  Eigen::Matrix<S, 10, 1> b;
  b << x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, S(1);
  return b;
}

/// Gradient of each monomial: column k is the gradient of monomials(p)[k].
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 10> monomial_gradients(const Eigen::MatrixBase<Derived>& p) {
  using S = typename Derived::Scalar;
  const S x = p[0], y = p[1], z = p[2];
  Eigen::Matrix<S, 3, 10> J;
  // clang-format off
  J << 2 * x, 0,     0,     y, z, 0, 1, 0, 0, 0,
       0,     2 * y, 0,     x, 0, z, 0, 1, 0, 0,
       0,     0,     2 * z, 0, x, y, 0, 0, 1, 0;
  // clang-format on
  return J;
}

template <typename Scalar, typename Derived>
Scalar evaluate(const Quadric<Scalar>& q, const Eigen::MatrixBase<Derived>& p) {
  const Scalar x = p[0], y = p[1], z = p[2];
  const auto& a = q.coeffs;
  return x * (a[0] * x + a[3] * y + a[4] * z + a[6]) + y * (a[1] * y + a[5] * z + a[7]) +
         z * (a[2] * z + a[8]) + a[9];
}

template <typename Scalar, typename Derived>
Vector3<Scalar> gradient(const Quadric<Scalar>& q, const Eigen::MatrixBase<Derived>& p) {
  const Scalar x = p[0], y = p[1], z = p[2];
  const auto& a = q.coeffs;
  return {2 * a[0] * x + a[3] * y + a[4] * z + a[6], a[3] * x + 2 * a[1] * y + a[5] * z + a[7],
          a[4] * x + a[5] * y + 2 * a[2] * z + a[8]};
}

template <typename Scalar>
Matrix3<Scalar> hessian(const Quadric<Scalar>& q) {
  const auto& a = q.coeffs;
  Matrix3<Scalar> h;
  h << 2 * a[0], a[3], a[4], a[3], 2 * a[1], a[5], a[4], a[5], 2 * a[2];
  return h;
}

/// Returns r with r(x) = q(x - offset). Moves a quadric fitted in a frame
/// centred at `offset` back to the original coordinates.
template <typename Scalar, typename Derived>
Quadric<Scalar> shifted(const Quadric<Scalar>& q, const Eigen::MatrixBase<Derived>& offset) {
  const Vector3<Scalar> c = offset;
  const Vector3<Scalar> lin(q[Quadric<Scalar>::A14], q[Quadric<Scalar>::A24], q[Quadric<Scalar>::A34]);
  const Vector3<Scalar> moved = lin - hessian(q) * c;
  Quadric<Scalar> r = q;
  r[Quadric<Scalar>::A14] = moved[0];
  r[Quadric<Scalar>::A24] = moved[1];
  r[Quadric<Scalar>::A34] = moved[2];
  r[Quadric<Scalar>::A44] = evaluate(q, Vector3<Scalar>(-c));
  return r;
}

/// No second-order term is significant relative to the first-order ones.
template <typename Scalar>
bool degenerate_to_plane(const Quadric<Scalar>& q) {
  const Scalar quad = q.coeffs.template head<6>().cwiseAbs().maxCoeff();
  const Scalar lin = q.coeffs.template segment<3>(6).cwiseAbs().maxCoeff();
  return quad <= Scalar(1e-10) * lin;
}

}  // namespace aqfc
