#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <optional>
#include <string>

#include "bagrasp/so3.hpp"
#include "bagrasp/trajectory.hpp"

namespace bagrasp {

inline constexpr int kArmDof = 7;

using JointVector = Eigen::Matrix<double, kArmDof, 1>;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Jacobian = Eigen::Matrix<double, 6, kArmDof>;
using JacobianPinv = Eigen::Matrix<double, kArmDof, 6>;

/// Revolute joint: unit rotation axis through `point`, both in the base frame
/// at the zero configuration.
struct Joint {
    Vec3 axis = Vec3::UnitZ();
    Vec3 point = Vec3::Zero();
    double lower = -3.05;
    double upper = 3.05;
};

struct ArmModel {
    Pose zero_pose;
    std::array<Joint, kArmDof> joints;
};

/// Plain-text arm description:
///
///   zero_pose px py pz r00 r01 r02 r10 r11 r12 r20 r21 r22
///   joint ax ay az qx qy qz lower upper      (exactly 7 lines, base first)
///
/// '#' starts a comment. Axes must be unit length within 1e-9.
ArmModel load_arm(const std::filesystem::path& path);
ArmModel parse_arm(const std::string& text);

/// Product of exponentials, base joint first, applied to the zero pose.
Pose fk(const ArmModel& arm, const JointVector& q);

/// Joint velocity -> (end-effector point velocity; world angular velocity).
/// Column j stacks w_j x (p - q_j) over w_j, where w_j and q_j are joint j's
/// current axis and axis point and p is the end-effector position. Rows are
/// ordered linear then angular to line up with [e_p; e_o].
Jacobian spatial_jacobian(const ArmModel& arm, const JointVector& q);

/// Damped least squares J^T (J J^T + lambda^2 I)^-1. With lambda = 0 this is
/// the Moore-Penrose inverse of a full-row-rank J; a singular J J^T then
/// throws Error(SingularJacobian).
JacobianPinv pinv(const Jacobian& j, double lambda);

struct ErrorTwist {
    Vec3 e_p = Vec3::Zero();
    Vec3 e_o = Vec3::Zero();

    Vector6 stacked() const {
        Vector6 e;
        e << e_p, e_o;
        return e;
    }
};

/// e_p = p - p_d, e_o = rotation_error(R_d, R).
ErrorTwist compute_error(const Pose& current, const TrajectorySample& desired);

struct Gains {
    double kp = 0.8;
    double kd = 0.4;
};

struct ControlLimits {
    double damping = 1e-3;
    double qdot_max = 1.5;
};

struct ControlOutput {
    JointVector qdot_d = JointVector::Zero();
    ErrorTwist error;
    /// -K_p e - K_d edot + V_d, before projection through the pseudo-inverse.
    Vector6 workspace_command = Vector6::Zero();
};

/// One step of qdot_d = J^+ (-K_p e - K_d edot + V_d).
///
/// edot is the backward difference (e - prev_e) / dt, or zero when prev_e is
/// empty (first step). The result is clamped per joint to +-qdot_max.
ControlOutput control_step(const ArmModel& arm, const JointVector& q,
                           const TrajectorySample& desired, const Gains& gains,
                           const std::optional<Vector6>& prev_e, double dt,
                           const ControlLimits& limits = {});

}  // namespace bagrasp
