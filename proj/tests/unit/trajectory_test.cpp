#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "bagrasp/trajectory.hpp"
#include "test_util.hpp"

using namespace bagrasp;
using bagrasp::testing::error_code_of;

namespace {

constexpr double kPi = std::numbers::pi;

Pose random_start(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-0.5, 0.5), yaw(-1.2, 1.2);
    return {Vec3(0.6 + d(rng), d(rng), 0.2 + 0.2 * d(rng)), grasp_orientation(yaw(rng))};
}

GraspProposal random_target(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-0.3, 0.3), yaw(-1.5, 1.5);
    GraspProposal g;
    g.target = {0.6 + d(rng), d(rng)};
    g.theta = yaw(rng);
    return g;
}

}  // namespace

TEST(CubicCoeffs, UnitMotion) {
    const Cubic c = cubic_coeffs(0.0, 1.0, 0.0, 1.0);
    EXPECT_NEAR(c.a, 0.0, 1e-12);
    EXPECT_NEAR(c.b, 0.0, 1e-12);
    EXPECT_NEAR(c.c, 3.0, 1e-12);
    EXPECT_NEAR(c.d, -2.0, 1e-12);
    EXPECT_NEAR(c.value(0.5), 0.5, 1e-12);
}

TEST(CubicCoeffs, StationarySolution) {
    const Cubic c = cubic_coeffs(2.0, 7.0, 0.42, 0.42);
    EXPECT_NEAR(c.a, 0.42, 1e-12);
    EXPECT_NEAR(c.b, 0.0, 1e-12);
    EXPECT_NEAR(c.c, 0.0, 1e-12);
    EXPECT_NEAR(c.d, 0.0, 1e-12);
}

TEST(CubicCoeffs, BoundaryConditionsAndShift) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> t0(-5, 5), len(0.2, 8), x(-2, 2);
    for (int i = 0; i < 100; ++i) {
        const double ti = t0(rng), tf = ti + len(rng), xi = x(rng), xf = x(rng);
        const Cubic c = cubic_coeffs(ti, tf, xi, xf);
        EXPECT_NEAR(c.value(ti), xi, 1e-12);
        EXPECT_NEAR(c.value(tf), xf, 1e-12);
        EXPECT_NEAR(c.rate(ti), 0.0, 1e-12);
        EXPECT_NEAR(c.rate(tf), 0.0, 1e-12);
        const double shift = x(rng) * 3;
        const Cubic s = cubic_coeffs(ti + shift, tf + shift, xi, xf);
        for (double u = 0; u <= 1.0; u += 0.125) {
            const double t = ti + u * (tf - ti);
            EXPECT_NEAR(s.value(t + shift), c.value(t), 1e-9);
        }
    }
}

TEST(CubicCoeffs, MonotoneWithoutOvershoot) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> x(-2, 2);
    for (int i = 0; i < 50; ++i) {
        const double xi = x(rng), xf = x(rng);
        const Cubic c = cubic_coeffs(0.0, 3.0, xi, xf);
        double prev = xi;
        for (int k = 0; k <= 300; ++k) {
            const double v = c.value(0.01 * k);
            EXPECT_GE(v, std::min(xi, xf) - 1e-12);
            EXPECT_LE(v, std::max(xi, xf) + 1e-12);
            EXPECT_GE((xf - xi) * (v - prev), -1e-15);
            prev = v;
        }
    }
}

TEST(CubicCoeffs, RejectsEmptyInterval) {
    EXPECT_EQ(error_code_of([] { cubic_coeffs(1.0, 1.0, 0, 1); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(error_code_of([] { cubic_coeffs(2.0, 1.0, 0, 1); }), ErrorCode::InvalidArgument);
}

TEST(Plan, StationaryWhenAlreadyAtTarget) {
    const Pose start{Vec3(0.6, 0.1, 0.01), grasp_orientation(0.4)};
    GraspProposal g;
    g.target = {0.6, 0.1};
    g.theta = 0.4;
    const CubicTrajectory traj = plan(start, g, 0.01, 0.0, 5.0);
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(traj.position[k].b, 0, 1e-12);
        EXPECT_NEAR(traj.position[k].c, 0, 1e-12);
        EXPECT_NEAR(traj.position[k].d, 0, 1e-12);
        EXPECT_NEAR(traj.rotation[k].a, 0, 1e-12);
        EXPECT_NEAR(traj.rotation[k].c, 0, 1e-12);
        EXPECT_NEAR(traj.rotation[k].d, 0, 1e-12);
    }
}

TEST(Plan, FinalRotationVectorFromDownwardStart) {
    // R_c^T R_c R_z(0.5) = R_z(0.5), whose log is +0.5 about z.
    const Pose start{Vec3(0.7, 0, 0.2), downward_orientation()};
    GraspProposal g;
    g.target = {0.6, 0.0};
    g.theta = 0.5;
    const CubicTrajectory traj = plan(start, g, 0.01, 0.0, 5.0);
    const Vec3 oracle = log_so3(downward_orientation().transpose() * downward_orientation() * rot_z(0.5));
    EXPECT_LT((traj.w_final - oracle).norm(), 1e-12);
    EXPECT_LT((traj.w_final - Vec3(0, 0, 0.5)).norm(), 1e-12);
}

TEST(Plan, BoundaryConditionsOverRandomPlans) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const Pose start = random_start(rng);
        const GraspProposal g = random_target(rng);
        const CubicTrajectory traj = plan(start, g, 0.01, 1.0, 6.0);
        const TrajectorySample s0 = sample(traj, 1.0), s1 = sample(traj, 6.0);
        const Vec3 goal(g.target.x(), g.target.y(), 0.01);
        const RotationMatrix rf = grasp_orientation(g.theta);
        EXPECT_LT((s0.p_d - start.position).norm(), 1e-9);
        EXPECT_LT((s1.p_d - goal).norm(), 1e-9);
        EXPECT_LT(s0.pdot_d.norm(), 1e-9);
        EXPECT_LT(s1.pdot_d.norm(), 1e-9);
        EXPECT_LT((s0.r_d - start.rotation).norm(), 1e-9);
        EXPECT_LT((s1.r_d - rf).norm(), 1e-9);
        EXPECT_LT((s1.r_d.col(2) - Vec3(0, 0, -1)).norm(), 1e-9);
        for (int k = 0; k < 3; ++k) {
            EXPECT_NEAR(traj.rotation[k].value(1.0), 0.0, 1e-9);
            EXPECT_NEAR(traj.rotation[k].value(6.0), traj.w_final[k], 1e-9);
        }
    }
}

TEST(Plan, HalfTurnIsAPlanningError) {
    const Pose start{Vec3(0.6, 0, 0.1), grasp_orientation(0.0)};
    const Pose goal{Vec3(0.6, 0, 0.1), grasp_orientation(kPi)};
    EXPECT_EQ(error_code_of([&] { plan_to_pose(start, goal, 0, 1); }), ErrorCode::LogNearAntipode);
}

TEST(Sample, RotationsStayValidAndClampHolds) {
    std::mt19937_64 rng(4);
    const Pose start = random_start(rng);
    const CubicTrajectory traj = plan(start, random_target(rng), 0.01, 0.0, 5.0);
    for (double t = -1.0; t <= 6.0; t += 0.05) EXPECT_TRUE(is_rotation(sample(traj, t).r_d));
    const TrajectorySample end = sample(traj, 5.0), after = sample(traj, 9.0);
    EXPECT_EQ(end.p_d, after.p_d);
    EXPECT_EQ(end.r_d, after.r_d);
    EXPECT_EQ(after.pdot_d, Vec3::Zero());
    EXPECT_EQ(after.w_ff, Vec3::Zero());
    const TrajectorySample before = sample(traj, -3.0);
    EXPECT_LT((before.p_d - start.position).norm(), 1e-12);
}

TEST(Sample, MidpointOfUnitMotion) {
    const Pose start{Vec3(0, 0, 0), downward_orientation()};
    const Pose goal{Vec3(1, 0, 0), downward_orientation()};
    const auto traj = plan_to_pose(start, goal, 0.0, 1.0);
    EXPECT_NEAR(sample(traj, 0.5).p_d.x(), 0.5, 1e-12);
    EXPECT_NEAR(sample(traj, 0.5).pdot_d.x(), 1.5, 1e-12);
}

TEST(Sample, FeedforwardMatchesNumericalAngularVelocity) {
    // For the planner's single-axis rotations, w_ff is the exact world angular
    // velocity of R_d: compare with vee(dR R^T) by central differences.
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Pose start = random_start(rng);
        const CubicTrajectory traj = plan(start, random_target(rng), 0.01, 0.0, 5.0);
        for (double t = 0.3; t < 5.0; t += 0.7) {
            const double h = 1e-6;
            const Mat3 dr = (sample(traj, t + h).r_d - sample(traj, t - h).r_d) / (2 * h);
            const Mat3 omega_hat = dr * sample(traj, t).r_d.transpose();
            const Vec3 omega(omega_hat(2, 1), omega_hat(0, 2), omega_hat(1, 0));
            EXPECT_LT((sample(traj, t).w_ff - omega).norm(), 1e-6);
            const Vec3 v = (sample(traj, t + h).p_d - sample(traj, t - h).p_d) / (2 * h);
            EXPECT_LT((sample(traj, t).pdot_d - v).norm(), 1e-6);
        }
    }
}
