#pragma once

#include <array>

#include "bagrasp/proposal.hpp"
#include "bagrasp/so3.hpp"

namespace bagrasp {

struct Pose {
    Vec3 position = Vec3::Zero();
    RotationMatrix rotation = RotationMatrix::Identity();
};

/// x(t) = a + b t + c t^2 + d t^3
struct Cubic {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    double value(double t) const { return a + t * (b + t * (c + t * d)); }
    double rate(double t) const { return b + t * (2.0 * c + 3.0 * t * d); }
};

/// Rest-to-rest cubic: x(t_i) = x_i, x(t_f) = x_f, zero velocity at both ends.
/// Solves the 4x4 boundary system by partial-pivot LU and checks the residual.
Cubic cubic_coeffs(double t_i, double t_f, double x_i, double x_f);

struct CubicTrajectory {
    double t_i = 0.0;
    double t_f = 1.0;
    std::array<Cubic, 3> position;  // per world axis
    std::array<Cubic, 3> rotation;  // per rotation-vector component, start frame
    RotationMatrix r_start = RotationMatrix::Identity();
    Vec3 w_final = Vec3::Zero();
};

struct TrajectorySample {
    Vec3 p_d = Vec3::Zero();
    Vec3 pdot_d = Vec3::Zero();
    RotationMatrix r_d = RotationMatrix::Identity();
    /// Angular feedforward in the world frame, r_start * d/dt w(t).
    Vec3 w_ff = Vec3::Zero();
};

/// Position cubics toward `goal.position`; rotation-vector cubics from 0 to
/// log(start^T goal). Throws Error(LogNearAntipode) when the relative
/// rotation is a half turn.
CubicTrajectory plan_to_pose(const Pose& start, const Pose& goal, double t_i, double t_f);

/// Goal = (proposal.x, proposal.y, grasp_z) with the gripper-down orientation
/// at yaw proposal.theta.
CubicTrajectory plan(const Pose& start, const GraspProposal& target, double grasp_z, double t_i,
                     double t_f);

/// Evaluate at t, clamped to [t_i, t_f].
TrajectorySample sample(const CubicTrajectory& traj, double t);

}  // namespace bagrasp
