#pragma once

#include "wabe/core/types.hpp"

namespace wabe {

/// Logistic map from stored logit to opacity in (0, 1).
double activate_opacity(double opacity_logit);
double opacity_logit_from(double opacity);

/// Rotation matrix of q / |q|.
Mat3 rotation_matrix(const Quat& q);

/// Pulls dL/dR back to dL/dq through R = rotation_matrix(q), including the
/// normalization, so the result is tangent to the sphere at q.
Vec4 rotation_matrix_backward(const Quat& q, const Mat3& dL_dR);

/// Hamilton product a * b.
Quat quat_multiply(const Quat& a, const Quat& b);

/// 4x4 matrix L(a) with quat_multiply(a, b) == L(a) * b.
Eigen::Matrix4d quat_left_matrix(const Quat& a);

Quat quat_from_matrix(const Mat3& rotation);
Quat normalized(const Quat& q);

/// Sigma = R S S^T R^T with S = diag(exp(log_scale)).
Mat3 assemble_covariance(const Quat& rotation, const Vec3& log_scale);

}  // namespace wabe
