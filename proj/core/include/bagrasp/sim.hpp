#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bagrasp/config.hpp"
#include "bagrasp/kinematics.hpp"
#include "bagrasp/learned_vision.hpp"
#include "bagrasp/proposal.hpp"
#include "bagrasp/scene.hpp"

namespace bagrasp {

/// Perfect velocity tracking: q + qdot dt, clamped to the joint limits.
JointVector step_plant(const ArmModel& arm, const JointVector& q, const JointVector& qdot, double dt);

enum class VisionMode { Classical, Learned, File };

const char* to_string(VisionMode mode);
VisionMode parse_vision_mode(const std::string& s);

struct VisionSource {
    VisionMode mode = VisionMode::Classical;
    std::optional<ModelParams> params;             // Learned
    std::vector<GraspProposal> file_proposals;     // File
};

struct TraceRow {
    double t = 0.0;
    Vec3 p = Vec3::Zero();
    Vec3 p_d = Vec3::Zero();
    double pos_err = 0.0;  // |e_p|
    double rot_err = 0.0;  // |e_o|
    JointVector q = JointVector::Zero();
};

struct EpisodeReport {
    int episode = 0;
    std::uint64_t seed = 0;
    std::string vision;
    bool success = false;
    std::string failure_reason;  // empty on success

    int frames = 0;
    int frames_failed = 0;
    std::vector<double> raw_proposal_px_errs;  // per successful frame, when labeled

    std::optional<GraspProposal> proposal;     // denoised
    std::optional<Eigen::Vector2d> proposal_pixel;
    std::optional<Eigen::Vector2d> label_pixel;
    double proposal_px_err = std::nan("");

    double pos_err = std::nan("");  // m, final
    double yaw_err = std::nan("");  // rad, final relative rotation angle
    double max_tracking_err = 0.0;  // m, over the run
    int steps = 0;
    double sim_time = 0.0;

    std::vector<TraceRow> trace;
};

/// Vision stream -> denoise -> plan -> 100 Hz PD control loop -> tolerance
/// check. Vision failures and planning errors end the episode with
/// success = false and a reason. Deterministic in (scene, config, seed).
EpisodeReport run_episode(const Scene& scene, const ArmModel& arm, const Config& cfg,
                          const VisionSource& vision, std::uint64_t seed, int episode = 0);

struct BatchSummary {
    std::vector<EpisodeReport> episodes;
    double success_rate = 0.0;
    double good_grasp_rate = 0.0;  // proposals within good_grasp_px of the label
};

/// Episode i uses scene and noise seed derived from (seed, i). `threads` > 1
/// runs episodes concurrently; results are identical either way.
BatchSummary run_batch(int n, const ArmModel& arm, const Config& cfg, const VisionSource& vision,
                       std::uint64_t seed, int threads = 1);

std::uint64_t episode_seed(std::uint64_t seed, int episode);

/// Red grasp dot and cyan theta line over the scene image.
RgbImage render_overlay(const RgbImage& rgb, const Eigen::Vector2d& pixel, double theta);

std::string report_json(const EpisodeReport& r);
void write_trace_csv(const EpisodeReport& r, const std::filesystem::path& path);

/// out/report.json, out/summary.csv, and out/episode_####/{report.json,
/// trace.csv, overlay.ppm}.
void write_batch_artifacts(const BatchSummary& summary, const std::vector<Scene>& scenes,
                           const std::filesystem::path& out_dir);

/// Scenes in the order run_batch uses them.
std::vector<Scene> batch_scenes(int n, const Config& cfg, std::uint64_t seed);

/// Arm file named in the config, else the bundled default.
ArmModel load_configured_arm(const Config& cfg);
std::filesystem::path default_arm_path();

}  // namespace bagrasp
