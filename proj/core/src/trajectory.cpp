#include "bagrasp/trajectory.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "bagrasp/error.hpp"

namespace bagrasp {

Cubic cubic_coeffs(double t_i, double t_f, double x_i, double x_f) {
    if (!(t_f > t_i)) {
        throw Error(ErrorCode::InvalidArgument, "cubic_coeffs: t_f must exceed t_i");
    }
    Eigen::Matrix4d a;
    a << 1.0, t_i, t_i * t_i, t_i * t_i * t_i,
         1.0, t_f, t_f * t_f, t_f * t_f * t_f,
         0.0, 1.0, 2.0 * t_i, 3.0 * t_i * t_i,
         0.0, 1.0, 2.0 * t_f, 3.0 * t_f * t_f;
    const Eigen::Vector4d q(x_i, x_f, 0.0, 0.0);
    const Eigen::Vector4d p = a.partialPivLu().solve(q);
    const double scale = std::max({1.0, std::abs(x_i), std::abs(x_f)});
    if ((a * p - q).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw Error(ErrorCode::InvalidArgument, "cubic_coeffs: boundary system ill-conditioned");
    }
    return {p[0], p[1], p[2], p[3]};
}

CubicTrajectory plan_to_pose(const Pose& start, const Pose& goal, double t_i, double t_f) {
    if (!(t_f > t_i)) {
        throw Error(ErrorCode::InvalidArgument, "plan: t_f must exceed t_i");
    }
    CubicTrajectory traj;
    traj.t_i = t_i;
    traj.t_f = t_f;
    traj.r_start = start.rotation;
    // w_init = log(I) = 0; w_final = log(R_start^T R_goal).
    traj.w_final = log_so3(start.rotation.transpose() * goal.rotation);
    for (int k = 0; k < 3; ++k) {
        traj.position[k] = cubic_coeffs(t_i, t_f, start.position[k], goal.position[k]);
        traj.rotation[k] = cubic_coeffs(t_i, t_f, 0.0, traj.w_final[k]);
    }
    return traj;
}

CubicTrajectory plan(const Pose& start, const GraspProposal& target, double grasp_z, double t_i,
                     double t_f) {
    Pose goal;
    goal.position = Vec3(target.target.x(), target.target.y(), grasp_z);
    goal.rotation = grasp_orientation(target.theta);
    return plan_to_pose(start, goal, t_i, t_f);
}

TrajectorySample sample(const CubicTrajectory& traj, double t) {
    const double tc = std::clamp(t, traj.t_i, traj.t_f);
    TrajectorySample s;
    Vec3 w, wdot;
    for (int k = 0; k < 3; ++k) {
        s.p_d[k] = traj.position[k].value(tc);
        s.pdot_d[k] = traj.position[k].rate(tc);
        w[k] = traj.rotation[k].value(tc);
        wdot[k] = traj.rotation[k].rate(tc);
    }
    if (t >= traj.t_f) {
        s.pdot_d.setZero();
        wdot.setZero();
    }
    s.r_d = traj.r_start * exp_so3(w);
    s.w_ff = traj.r_start * wdot;
    return s;
}

}  // namespace bagrasp
