#pragma once

#include <Eigen/Dense>

namespace bagrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rotation matrices are plain Eigen 3x3 doubles. Frames are right-handed and
/// the world frame coincides with the arm base frame. Anything written to disk
/// is emitted row by row.
using RotationMatrix = Mat3;

/// Skew-symmetric matrix such that hat(v) * u == v.cross(u).
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws Error(NotSkewSymmetric) if |M + M^T| >= 1e-8.
Vec3 vee(const Mat3& m);

/// Rodrigues formula. Below |w| = 1e-8 the second-order series is used.
RotationMatrix exp_so3(const Vec3& w);

/// Rotation vector of R with angle in [0, pi).
///
/// The angle is atan2(|vee(R - R^T)| / 2, (tr R - 1) / 2) with the cosine
/// clamped to [-1, 1]; the axis is vee(R - R^T). Throws Error(LogNearAntipode)
/// when the angle is within 1e-6 of pi, where that axis extraction degenerates.
Vec3 log_so3(const RotationMatrix& r);

RotationMatrix rot_z(double theta);

/// Gripper-down end-effector orientation for yaw 0.
RotationMatrix downward_orientation();

/// downward_orientation() * rot_z(theta_d). Third column is always (0,0,-1).
RotationMatrix grasp_orientation(double theta_d);

/// Orientation error sum_i desired.col(i) x current.col(i).
/// Zero when the two agree; magnitude 2 sin(phi) for a single-axis offset phi.
Vec3 rotation_error(const RotationMatrix& desired, const RotationMatrix& current);

/// True when R^T R = I and det R = 1, both within tol.
bool is_rotation(const Mat3& r, double tol = 1e-9);

/// Angle of the relative rotation a^T b, in [0, pi].
double rotation_angle_between(const RotationMatrix& a, const RotationMatrix& b);

}  // namespace bagrasp
