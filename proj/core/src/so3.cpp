#include "bagrasp/so3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bagrasp/error.hpp"

namespace bagrasp {

namespace {
constexpr double kSmallAngle = 1e-8;
constexpr double kAntipodeMargin = 1e-6;
constexpr double kSkewTol = 1e-8;
}  // namespace

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid argument";
        case ErrorCode::NotSkewSymmetric: return "matrix is not skew-symmetric";
        case ErrorCode::LogNearAntipode: return "log near antipode";
        case ErrorCode::FileOpen: return "cannot open file";
        case ErrorCode::BadMagic: return "bad magic number";
        case ErrorCode::BadHeader: return "malformed header";
        case ErrorCode::UnsupportedFormat: return "unsupported format";
        case ErrorCode::TruncatedPayload: return "truncated payload";
        case ErrorCode::ShapeMismatch: return "shape mismatch";
        case ErrorCode::ImageTooSmall: return "image too small";
        case ErrorCode::BallNotFound: return "ball not found";
        case ErrorCode::NoViableContour: return "no viable contour";
        case ErrorCode::DegeneratePolygon: return "degenerate polygon";
        case ErrorCode::OutOfOrderTimestamp: return "out-of-order timestamp";
        case ErrorCode::NoProposals: return "no proposals";
        case ErrorCode::SingularJacobian: return "singular jacobian";
        case ErrorCode::EmptyDataset: return "empty dataset";
        case ErrorCode::ConfigError: return "config error";
        case ErrorCode::ParseError: return "parse error";
    }
    return "unknown error";
}

Mat3 hat(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

Vec3 vee(const Mat3& m) {
    if ((m + m.transpose()).norm() >= kSkewTol) {
        throw Error(ErrorCode::NotSkewSymmetric, "vee: input is not skew-symmetric");
    }
    return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

RotationMatrix exp_so3(const Vec3& w) {
    const double angle = w.norm();
    const Mat3 k = hat(w);
    if (angle < kSmallAngle) {
        return Mat3::Identity() + k + 0.5 * k * k;
    }
    const double a = std::sin(angle) / angle;
    const double b = (1.0 - std::cos(angle)) / (angle * angle);
    return Mat3::Identity() + a * k + b * k * k;
}

Vec3 log_so3(const RotationMatrix& r) {
    const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
    const Mat3 skew = r - r.transpose();
    const Vec3 axis2s(skew(2, 1), skew(0, 2), skew(1, 0));  // 2 sin(phi) * axis
    // acos loses digits near 0 and pi; atan2 on the same (sin, cos) pair does
    // not and equals arccos(c) for any proper rotation.
    const double phi = std::atan2(0.5 * axis2s.norm(), c);
    if (phi < kSmallAngle) {
        return 0.5 * axis2s;
    }
    if (std::numbers::pi - phi < kAntipodeMargin) {
        throw Error(ErrorCode::LogNearAntipode,
                    "log near antipode; axis ill-conditioned by this formula");
    }
    return (phi / (2.0 * std::sin(phi))) * axis2s;
}

RotationMatrix rot_z(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Mat3 m;
    m << c, -s, 0.0,
         s, c, 0.0,
         0.0, 0.0, 1.0;
    return m;
}

RotationMatrix downward_orientation() {
    Mat3 m;
    m << -1.0, 0.0, 0.0,
         0.0, 1.0, 0.0,
         0.0, 0.0, -1.0;
    return m;
}

RotationMatrix grasp_orientation(double theta_d) {
    return downward_orientation() * rot_z(theta_d);
}

Vec3 rotation_error(const RotationMatrix& desired, const RotationMatrix& current) {
    Vec3 e = Vec3::Zero();
    for (int i = 0; i < 3; ++i) {
        e += desired.col(i).cross(current.col(i));
    }
    return e;
}

bool is_rotation(const Mat3& r, double tol) {
    if (!r.allFinite()) return false;
    return (r.transpose() * r - Mat3::Identity()).norm() < tol &&
           std::abs(r.determinant() - 1.0) < tol;
}

double rotation_angle_between(const RotationMatrix& a, const RotationMatrix& b) {
    const Mat3 rel = a.transpose() * b;
    const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
    const Mat3 skew = rel - rel.transpose();
    const double s = 0.5 * Vec3(skew(2, 1), skew(0, 2), skew(1, 0)).norm();
    return std::atan2(s, c);
}

}  // namespace bagrasp
