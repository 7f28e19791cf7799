#include "wabe/core/math.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace wabe {

double activate_opacity(double opacity_logit) {
  // Split by sign so exp never overflows.
  if (opacity_logit >= 0.0) {
    return 1.0 / (1.0 + std::exp(-opacity_logit));
  }
  const double e = std::exp(opacity_logit);
  return e / (1.0 + e);
}

double opacity_logit_from(double opacity) { return std::log(opacity / (1.0 - opacity)); }

Quat normalized(const Quat& q) { return q / q.norm(); }

Mat3 rotation_matrix(const Quat& q_raw) {
  const Quat q = normalized(q_raw);
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
       2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
       2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return r;
}

Vec4 rotation_matrix_backward(const Quat& q_raw, const Mat3& g) {
  const double norm = q_raw.norm();
  const Quat q = q_raw / norm;
  const double w = q[0], x = q[1], y = q[2], z = q[3];

  // Gradient with respect to the normalized quaternion.
  Vec4 d_unit;
  d_unit[0] = 2.0 * (-z * g(0, 1) + y * g(0, 2) + z * g(1, 0) - x * g(1, 2) - y * g(2, 0) +
                     x * g(2, 1));
  d_unit[1] = 2.0 * (y * g(0, 1) + z * g(0, 2) + y * g(1, 0) - 2.0 * x * g(1, 1) -
                     w * g(1, 2) + z * g(2, 0) + w * g(2, 1) - 2.0 * x * g(2, 2));
  d_unit[2] = 2.0 * (-2.0 * y * g(0, 0) + x * g(0, 1) + w * g(0, 2) + x * g(1, 0) +
                     z * g(1, 2) - w * g(2, 0) + z * g(2, 1) - 2.0 * y * g(2, 2));
  d_unit[3] = 2.0 * (-2.0 * z * g(0, 0) - w * g(0, 1) + x * g(0, 2) + w * g(1, 0) -
                     2.0 * z * g(1, 1) + y * g(1, 2) + x * g(2, 0) + y * g(2, 1));

  // d(q/|q|)/dq = (I - q q^T) / |q|
  return (d_unit - q * q.dot(d_unit)) / norm;
}

Quat quat_multiply(const Quat& a, const Quat& b) { return quat_left_matrix(a) * b; }

Eigen::Matrix4d quat_left_matrix(const Quat& a) {
  const double w = a[0], x = a[1], y = a[2], z = a[3];
  Eigen::Matrix4d l;
  l << w, -x, -y, -z,
       x,  w, -z,  y,
       y,  z,  w, -x,
       z, -y,  x,  w;
  return l;
}

Quat quat_from_matrix(const Mat3& rotation) {
  const Eigen::Quaterniond q(rotation);
  return Quat(q.w(), q.x(), q.y(), q.z());
}

Mat3 assemble_covariance(const Quat& rotation, const Vec3& log_scale) {
  const Mat3 r = rotation_matrix(rotation);
  const Vec3 variance = (2.0 * log_scale).array().exp();
  return r * variance.asDiagonal() * r.transpose();
}

}  // namespace wabe
