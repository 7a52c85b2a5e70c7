#include "bagrasp/kinematics.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "bagrasp/error.hpp"

namespace bagrasp {

namespace {

struct Rigid {
    Mat3 r = Mat3::Identity();
    Vec3 p = Vec3::Zero();

    Rigid operator*(const Rigid& o) const { return {r * o.r, r * o.p + p}; }
};

// exp of a pure-rotation screw about `axis` through `point`.
Rigid joint_motion(const Joint& j, double angle) {
    Rigid t;
    t.r = exp_so3(j.axis * angle);
    t.p = (Mat3::Identity() - t.r) * j.point;
    return t;
}

}  // namespace

ArmModel parse_arm(const std::string& text) {
    ArmModel arm;
    bool have_zero = false;
    int njoints = 0;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw Error(ErrorCode::ParseError, "arm line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        std::vector<double> v;
        double x;
        while (ls >> x) v.push_back(x);
        if (!ls.eof()) fail("non-numeric field");
        if (tag == "zero_pose") {
            if (v.size() != 12) fail("zero_pose needs 12 numbers");
            arm.zero_pose.position = Vec3(v[0], v[1], v[2]);
            Mat3 r;
            r << v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11];
            if (!is_rotation(r, 1e-9)) fail("zero_pose rotation is not in SO(3)");
            arm.zero_pose.rotation = r;
            have_zero = true;
        } else if (tag == "joint") {
            if (v.size() != 8) fail("joint needs 8 numbers");
            if (njoints == kArmDof) fail("more than 7 joints");
            Joint& j = arm.joints[njoints++];
            j.axis = Vec3(v[0], v[1], v[2]);
            if (std::abs(j.axis.norm() - 1.0) > 1e-9) fail("joint axis is not unit length");
            j.point = Vec3(v[3], v[4], v[5]);
            j.lower = v[6];
            j.upper = v[7];
            if (!(j.lower < j.upper)) fail("joint limits must satisfy lower < upper");
        } else {
            fail("unknown record '" + tag + "'");
        }
    }
    if (!have_zero) throw Error(ErrorCode::ParseError, "arm: missing zero_pose");
    if (njoints != kArmDof) throw Error(ErrorCode::ParseError, "arm: expected exactly 7 joints");
    return arm;
}

ArmModel load_arm(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileOpen, "cannot open arm file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_arm(ss.str());
}

Pose fk(const ArmModel& arm, const JointVector& q) {
    Rigid t;
    for (int k = 0; k < kArmDof; ++k) t = t * joint_motion(arm.joints[k], q[k]);
    Pose out;
    out.rotation = t.r * arm.zero_pose.rotation;
    out.position = t.r * arm.zero_pose.position + t.p;
    return out;
}

Jacobian spatial_jacobian(const ArmModel& arm, const JointVector& q) {
    // Current axis of joint k is the zero-configuration axis carried by the
    // motion of joints 0..k-1.
    Jacobian jac;
    std::array<Vec3, kArmDof> axes, points;
    Rigid t;
    for (int k = 0; k < kArmDof; ++k) {
        axes[k] = t.r * arm.joints[k].axis;
        points[k] = t.r * arm.joints[k].point + t.p;
        t = t * joint_motion(arm.joints[k], q[k]);
    }
    const Vec3 p = t.r * arm.zero_pose.position + t.p;
    for (int k = 0; k < kArmDof; ++k) {
        jac.col(k).head<3>() = axes[k].cross(p - points[k]);
        jac.col(k).tail<3>() = axes[k];
    }
    return jac;
}

JacobianPinv pinv(const Jacobian& j, double lambda) {
    const Eigen::Matrix<double, 6, 6> gram =
        j * j.transpose() + lambda * lambda * Eigen::Matrix<double, 6, 6>::Identity();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(gram, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().maxCoeff();
    // LDLT's rcond estimate misses exact rank loss, so look at the spectrum.
    if (eig.info() != Eigen::Success || !(top > 0.0) || eig.eigenvalues().minCoeff() <= 1e-14 * top) {
        throw Error(ErrorCode::SingularJacobian,
                    "pinv: J J^T + lambda^2 I is singular; use a damping lambda > 0");
    }
    return gram.ldlt().solve(j).transpose();
}

ErrorTwist compute_error(const Pose& current, const TrajectorySample& desired) {
    ErrorTwist e;
    e.e_p = current.position - desired.p_d;
    e.e_o = rotation_error(desired.r_d, current.rotation);
    return e;
}

ControlOutput control_step(const ArmModel& arm, const JointVector& q,
                           const TrajectorySample& desired, const Gains& gains,
                           const std::optional<Vector6>& prev_e, double dt,
                           const ControlLimits& limits) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "control_step: dt must be > 0");
    ControlOutput out;
    out.error = compute_error(fk(arm, q), desired);
    const Vector6 e = out.error.stacked();
    const Vector6 edot = prev_e ? Vector6((e - *prev_e) / dt) : Vector6::Zero();
    Vector6 v_d;
    v_d << desired.pdot_d, desired.w_ff;
    out.workspace_command = -gains.kp * e - gains.kd * edot + v_d;
    out.qdot_d = pinv(spatial_jacobian(arm, q), limits.damping) * out.workspace_command;
    out.qdot_d = out.qdot_d.cwiseMax(-limits.qdot_max).cwiseMin(limits.qdot_max);
    return out;
}

}  // namespace bagrasp
