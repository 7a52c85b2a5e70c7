#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "bagrasp/classical_vision.hpp"
#include "bagrasp/proposal.hpp"
#include "bagrasp/scene.hpp"
#include "bagrasp/sim.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace bagrasp;
using bagrasp::testing::error_code_of;
using bagrasp::testing::fixture;
using bagrasp::testing::read_bytes;
using bagrasp::testing::scratch_dir;

namespace {

ArmModel bundled_arm() { return load_arm(std::filesystem::path(BAGRASP_DATA_DIR) / "sawyer_like.arm"); }

Config noiseless() {
    Config cfg;
    cfg.sim.noise_sigma = 0.0;
    return cfg;
}

VisionSource file_source(const std::string& name) {
    VisionSource v;
    v.mode = VisionMode::File;
    std::ifstream in(fixture(name));
    v.file_proposals = read_json_lines(in);
    return v;
}

}  // namespace

TEST(Scene, DeterministicPerSeed) {
    const Scene a = generate_scene(77), b = generate_scene(77), c = generate_scene(78);
    EXPECT_EQ(a.rgb, b.rgb);
    EXPECT_EQ(a.depth, b.depth);
    EXPECT_NE(a.rgb, c.rgb);
}

TEST(Scene, FlatHasNoCreasesOrLabel) {
    SceneOptions opt;
    opt.flat = true;
    const Scene s = generate_scene(5, opt);
    EXPECT_TRUE(s.truth.creases.empty());
    EXPECT_FALSE(s.truth.label);
    EXPECT_EQ(error_code_of([&] { to_labeled_scene(s); }), ErrorCode::InvalidArgument);
}

TEST(Scene, TruthConsistency) {
    for (int seed = 0; seed < 30; ++seed) {
        const Scene s = generate_scene(seed);
        ASSERT_TRUE(s.truth.label);
        EXPECT_GE(s.truth.creases.size(), 2u);
        EXPECT_LE(s.truth.creases.size(), 5u);
        for (const auto& c : s.truth.creases) {
            EXPECT_GE(c.width, 2.0);
            EXPECT_LE(c.width, 4.0);
            for (const auto& e : {c.a, c.b}) {
                EXPECT_TRUE(s.rgb.contains(static_cast<int>(e.x()), static_cast<int>(e.y())));
            }
        }
        // Label is the crease whose midpoint distance is nearest 1.1 r.
        double best = 1e9;
        const Crease* pick = nullptr;
        for (const auto& c : s.truth.creases) {
            const double score = std::abs((c.midpoint() - s.truth.ball_center).norm() - 1.1 * s.truth.ball_radius);
            if (score < best) best = score, pick = &c;
        }
        EXPECT_LT((s.truth.label->pixel - pick->midpoint()).norm(), 1e-12);
        EXPECT_EQ(s.truth.label->theta, pick->angle());
        // Depth: table plane far from everything, raised at the ball.
        EXPECT_LT(s.depth.at(static_cast<int>(s.truth.ball_center.x()), static_cast<int>(s.truth.ball_center.y())),
                  kTableDepthMm - 10);
    }
}

TEST(Scene, NoiseIsSeededAndBounded) {
    const Scene s = generate_scene(3);
    std::mt19937_64 a(1), b(1);
    const RgbImage na = add_pixel_noise(s.rgb, 2.0, a), nb = add_pixel_noise(s.rgb, 2.0, b);
    EXPECT_EQ(na, nb);
    EXPECT_NE(na, s.rgb);
    std::mt19937_64 c(1);
    EXPECT_EQ(add_pixel_noise(s.rgb, 0.0, c), s.rgb);
}

TEST(StepPlant, Examples) {
    const ArmModel arm = bundled_arm();
    JointVector q;
    q << 0.1, -0.2, 0.3, 0.4, -0.5, 0.6, -0.7;
    EXPECT_EQ(step_plant(arm, q, JointVector::Zero(), 0.01), q);
    JointVector qd;
    qd << 0.3, -0.1, 0.2, 0.05, 0.0, -0.2, 0.1;
    JointVector x = q;
    for (int k = 0; k < 50; ++k) x = step_plant(arm, x, qd, 0.01);
    EXPECT_LT((x - (q + 50 * 0.01 * qd)).norm(), 1e-12);
    JointVector edge = q;
    edge[1] = arm.joints[1].upper - 0.001;
    JointVector push = JointVector::Zero();
    push[1] = 1.0;
    EXPECT_EQ(step_plant(arm, edge, push, 0.01)[1], arm.joints[1].upper);
    push[1] = -100.0;
    EXPECT_EQ(step_plant(arm, edge, push, 0.1)[1], arm.joints[1].lower);
}

TEST(RunEpisode, NoiselessClassicalSucceeds) {
    const ArmModel arm = bundled_arm();
    const Config cfg = noiseless();
    const EpisodeReport r = run_episode(generate_scene(11), arm, cfg, VisionSource{}, 11);
    EXPECT_TRUE(r.success) << r.failure_reason;
    EXPECT_LT(r.pos_err, 1e-3);
    EXPECT_EQ(r.frames, 10);
    EXPECT_EQ(r.frames_failed, 0);
    EXPECT_EQ(r.steps, 700);
    EXPECT_EQ(r.trace.size(), 701u);
    EXPECT_LT(r.proposal_px_err, 10.0);
}

TEST(RunEpisode, FileProposalReachable) {
    const ArmModel arm = bundled_arm();
    const EpisodeReport r = run_episode(generate_scene(1), arm, Config{}, file_source("reachable.jsonl"), 1);
    EXPECT_TRUE(r.success) << r.failure_reason;
    ASSERT_TRUE(r.proposal);
    EXPECT_NEAR(r.proposal->target.x(), 0.6205, 1e-12);
    EXPECT_LT(r.pos_err, 1e-3);
    EXPECT_LT(r.yaw_err, 0.5 * std::numbers::pi / 180);
}

TEST(RunEpisode, UnreachableTargetFailsTolerance) {
    const ArmModel arm = bundled_arm();
    const EpisodeReport r = run_episode(generate_scene(1), arm, Config{}, file_source("unreachable.jsonl"), 1);
    EXPECT_FALSE(r.success);
    EXPECT_EQ(r.failure_reason, "tracking tolerance not met");
    EXPECT_GT(r.pos_err, 0.005);
}

TEST(RunEpisode, FlatSceneReportsVisionFailure) {
    const ArmModel arm = bundled_arm();
    SceneOptions flat;
    flat.flat = true;
    const EpisodeReport r = run_episode(generate_scene(2, flat), arm, Config{}, VisionSource{}, 2);
    EXPECT_FALSE(r.success);
    EXPECT_EQ(r.frames_failed, 10);
    EXPECT_NE(r.failure_reason.find("no viable contour"), std::string::npos) << r.failure_reason;
    EXPECT_FALSE(r.proposal);
}

TEST(RunEpisode, LearnedWithoutParamsIsAnError) {
    VisionSource v;
    v.mode = VisionMode::Learned;
    EXPECT_EQ(error_code_of([&] { run_episode(generate_scene(1), bundled_arm(), Config{}, v, 1); }),
              ErrorCode::InvalidArgument);
}

TEST(RunEpisode, LearnedVisionRuns) {
    VisionSource v;
    v.mode = VisionMode::Learned;
    v.params = ModelParams::initialize(1);
    const EpisodeReport r = run_episode(generate_scene(4), bundled_arm(), Config{}, v, 4);
    EXPECT_EQ(r.frames_failed, 0);
    EXPECT_TRUE(r.proposal);
    EXPECT_EQ(r.vision, "learned");
}

TEST(RunEpisode, Deterministic) {
    const ArmModel arm = bundled_arm();
    const Scene s = generate_scene(21);
    const EpisodeReport a = run_episode(s, arm, Config{}, VisionSource{}, 99);
    const EpisodeReport b = run_episode(s, arm, Config{}, VisionSource{}, 99);
    EXPECT_EQ(report_json(a), report_json(b));
    EXPECT_EQ(a.raw_proposal_px_errs, b.raw_proposal_px_errs);
}

TEST(RunBatch, EmptyBatch) {
    const BatchSummary s = run_batch(0, bundled_arm(), Config{}, VisionSource{}, 1);
    EXPECT_TRUE(s.episodes.empty());
    EXPECT_EQ(s.success_rate, 0.0);
}

TEST(RunBatch, NoiselessTwentyAllSucceedAndThreadsAgree) {
    const ArmModel arm = bundled_arm();
    const Config cfg = noiseless();
    const BatchSummary a = run_batch(20, arm, cfg, VisionSource{}, 5, 1);
    const BatchSummary b = run_batch(20, arm, cfg, VisionSource{}, 5, 4);
    EXPECT_EQ(a.success_rate, 1.0);
    ASSERT_EQ(b.episodes.size(), 20u);
    for (std::size_t i = 0; i < a.episodes.size(); ++i) EXPECT_EQ(report_json(a.episodes[i]), report_json(b.episodes[i]));
    for (const auto& r : a.episodes) {
        if (r.success) {
            EXPECT_LT(r.pos_err, cfg.sim.pos_tol);
            EXPECT_LT(r.yaw_err, cfg.sim.ang_tol_deg * std::numbers::pi / 180);
        }
    }
}

TEST(EpisodeSeed, DistinctPerEpisode) {
    EXPECT_NE(episode_seed(7, 0), episode_seed(7, 1));
    EXPECT_NE(episode_seed(7, 0), episode_seed(8, 0));
    EXPECT_EQ(episode_seed(7, 3), episode_seed(7, 3));
}

TEST(Artifacts, WrittenAndReproducible) {
    const ArmModel arm = bundled_arm();
    const Config cfg;
    const auto d1 = scratch_dir("artifacts1"), d2 = scratch_dir("artifacts2");
    for (const auto& d : {d1, d2}) {
        write_batch_artifacts(run_batch(2, arm, cfg, VisionSource{}, 7), batch_scenes(2, cfg, 7), d);
    }
    for (const char* f : {"report.json", "summary.csv", "episode_0000/report.json", "episode_0000/trace.csv",
                          "episode_0001/overlay.ppm"}) {
        ASSERT_TRUE(std::filesystem::exists(d1 / f)) << f;
        EXPECT_EQ(read_bytes(d1 / f), read_bytes(d2 / f)) << f;
    }
    std::ifstream csv(d1 / "summary.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "episode,success,pos_err,yaw_err,proposal_px_err");
    const auto report = nlohmann::json::parse(std::ifstream(d1 / "report.json"));
    EXPECT_EQ(report["episodes"], 2);
    EXPECT_EQ(report["reports"].size(), 2u);
    const RgbImage overlay = load_ppm(d1 / "episode_0001" / "overlay.ppm");
    EXPECT_EQ(overlay.width, 256);
}

TEST(RenderOverlay, DrawsDotAndLine) {
    const RgbImage base(40, 30, 0);
    const RgbImage o = render_overlay(base, {20, 15}, 0.0);
    EXPECT_EQ(o.at(20, 15, 0), 255);
    EXPECT_EQ(o.at(20, 15, 1), 0);
    EXPECT_EQ(o.at(30, 15, 1), 255);  // cyan line along x
    EXPECT_EQ(o.at(30, 15, 2), 255);
    EXPECT_EQ(o.at(20, 25, 0), 0);
}
