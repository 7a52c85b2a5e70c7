#include "bagrasp/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <thread>

#include "bagrasp/classical_vision.hpp"
#include "bagrasp/denoise.hpp"
#include "bagrasp/error.hpp"
#include "bagrasp/trajectory.hpp"
#include "json.hpp"

#ifndef BAGRASP_DEFAULT_DATA_DIR
#define BAGRASP_DEFAULT_DATA_DIR "data"
#endif

namespace bagrasp {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

nlohmann::ordered_json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json report_object(const EpisodeReport& r) {
    nlohmann::ordered_json j;
    j["episode"] = r.episode;
    j["seed"] = r.seed;
    j["vision"] = r.vision;
    j["success"] = r.success;
    j["failure_reason"] = r.failure_reason;
    j["frames"] = r.frames;
    j["frames_failed"] = r.frames_failed;
    if (r.proposal) {
        j["proposal"] = {{"x", r.proposal->target.x()},
                         {"y", r.proposal->target.y()},
                         {"theta", r.proposal->theta},
                         {"t", r.proposal->timestamp}};
    } else {
        j["proposal"] = nullptr;
    }
    if (r.proposal_pixel) {
        j["proposal_pixel"] = {r.proposal_pixel->x(), r.proposal_pixel->y()};
    } else {
        j["proposal_pixel"] = nullptr;
    }
    if (r.label_pixel) {
        j["label_pixel"] = {r.label_pixel->x(), r.label_pixel->y()};
    } else {
        j["label_pixel"] = nullptr;
    }
    j["proposal_px_err"] = number_or_null(r.proposal_px_err);
    j["median_raw_px_err"] = number_or_null(median(r.raw_proposal_px_errs));
    j["pos_err_m"] = number_or_null(r.pos_err);
    j["yaw_err_rad"] = number_or_null(r.yaw_err);
    j["max_tracking_err_m"] = r.max_tracking_err;
    j["steps"] = r.steps;
    j["sim_time_s"] = r.sim_time;
    return j;
}

std::string fmt_num(double v) {
    if (!std::isfinite(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

JointVector step_plant(const ArmModel& arm, const JointVector& q, const JointVector& qdot, double dt) {
    JointVector next = q + qdot * dt;
    for (int k = 0; k < kArmDof; ++k) next[k] = std::clamp(next[k], arm.joints[k].lower, arm.joints[k].upper);
    return next;
}

const char* to_string(VisionMode mode) {
    switch (mode) {
        case VisionMode::Classical: return "classical";
        case VisionMode::Learned: return "learned";
        case VisionMode::File: return "file";
    }
    return "?";
}

VisionMode parse_vision_mode(const std::string& s) {
    if (s == "classical") return VisionMode::Classical;
    if (s == "learned") return VisionMode::Learned;
    if (s == "file") return VisionMode::File;
    throw Error(ErrorCode::InvalidArgument, "unknown vision mode '" + s + "'");
}

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
    // splitmix64 step over (seed, episode)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(episode) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

EpisodeReport run_episode(const Scene& scene, const ArmModel& arm, const Config& cfg,
                          const VisionSource& vision, std::uint64_t seed, int episode) {
    EpisodeReport rep;
    rep.episode = episode;
    rep.seed = seed;
    rep.vision = to_string(vision.mode);
    if (scene.truth.label) rep.label_pixel = scene.truth.label->pixel;

    // Vision stream over the denoise window.
    ProposalBuffer buffer(cfg.denoise.window, cfg.denoise.distance_threshold);
    std::string last_vision_error;
    double now = 0.0;
    if (vision.mode == VisionMode::File) {
        std::vector<GraspProposal> props = vision.file_proposals;
        std::stable_sort(props.begin(), props.end(),
                         [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
        for (const auto& p : props) buffer.push(p);
        rep.frames = static_cast<int>(props.size());
        if (!props.empty()) now = props.back().timestamp;
        last_vision_error = "no proposals in file";
    } else {
        if (vision.mode == VisionMode::Learned && !vision.params) {
            throw Error(ErrorCode::InvalidArgument, "learned vision requires model params");
        }
        std::mt19937_64 noise_rng(seed ^ 0xa5a5a5a5deadbeefULL);
        for (int k = 0; k < cfg.sim.frames; ++k) {
            const double t = k / cfg.sim.frame_rate;
            now = t;
            ++rep.frames;
            const RgbImage frame = add_pixel_noise(scene.rgb, cfg.sim.noise_sigma, noise_rng);
            try {
                GraspProposal p;
                Eigen::Vector2d pixel;
                if (vision.mode == VisionMode::Classical) {
                    const auto res = classical_pipeline(frame, cfg.classical, cfg.camera, t);
                    p = res.proposal;
                    pixel = res.grasp.pixel;
                } else {
                    const auto res = learned_pipeline(*vision.params, frame, scene.depth, cfg.camera, t);
                    p = res.proposal;
                    pixel = res.source_pixel;
                }
                buffer.push(p);
                if (rep.label_pixel) rep.raw_proposal_px_errs.push_back((pixel - *rep.label_pixel).norm());
            } catch (const Error& e) {
                ++rep.frames_failed;
                last_vision_error = e.what();
            }
        }
    }

    buffer.window_filter(now);
    if (buffer.empty()) {
        rep.failure_reason = "vision failed: " + last_vision_error;
        return rep;
    }
    const GraspProposal goal = denoise(buffer, now, cfg.denoise.theta_bin_deg);
    rep.proposal = goal;
    rep.proposal_pixel = workspace_to_pixel(goal.target, cfg.camera);
    if (rep.label_pixel) rep.proposal_px_err = (*rep.proposal_pixel - *rep.label_pixel).norm();

    JointVector q = Eigen::Map<const JointVector>(cfg.sim.start_q.data());
    const Pose start = fk(arm, q);
    CubicTrajectory traj;
    try {
        traj = plan(start, goal, cfg.grasp_z, 0.0, cfg.sim.duration);
    } catch (const Error& e) {
        rep.failure_reason = std::string("planning failed: ") + e.what();
        return rep;
    }
    const Pose target_pose{Vec3(goal.target.x(), goal.target.y(), cfg.grasp_z), grasp_orientation(goal.theta)};

    const double dt = 1.0 / cfg.control.rate;
    const int steps = static_cast<int>(std::lround((cfg.sim.duration + cfg.sim.settle) * cfg.control.rate));
    const Gains gains{cfg.control.kp, cfg.control.kd};
    const ControlLimits limits{cfg.control.damping, cfg.control.qdot_max};
    std::optional<Vector6> prev_e;
    rep.trace.reserve(static_cast<std::size_t>(steps) + 1);
    try {
        for (int k = 0; k < steps; ++k) {
            const double t = k * dt;
            const TrajectorySample s = sample(traj, t);
            const ControlOutput out = control_step(arm, q, s, gains, prev_e, dt, limits);
            prev_e = out.error.stacked();
            TraceRow row;
            row.t = t;
            row.p = s.p_d + out.error.e_p;
            row.p_d = s.p_d;
            row.pos_err = out.error.e_p.norm();
            row.rot_err = out.error.e_o.norm();
            row.q = q;
            rep.trace.push_back(row);
            rep.max_tracking_err = std::max(rep.max_tracking_err, row.pos_err);
            q = step_plant(arm, q, out.qdot_d, dt);
        }
    } catch (const Error& e) {
        rep.failure_reason = std::string("control failed: ") + e.what();
        return rep;
    }
    rep.steps = steps;
    rep.sim_time = steps * dt;

    const Pose final_pose = fk(arm, q);
    TraceRow last;
    last.t = rep.sim_time;
    last.p = final_pose.position;
    last.p_d = target_pose.position;
    last.pos_err = (final_pose.position - target_pose.position).norm();
    last.rot_err = rotation_error(target_pose.rotation, final_pose.rotation).norm();
    last.q = q;
    rep.trace.push_back(last);

    rep.pos_err = last.pos_err;
    rep.yaw_err = rotation_angle_between(target_pose.rotation, final_pose.rotation);
    rep.success = rep.pos_err < cfg.sim.pos_tol &&
                  rep.yaw_err < cfg.sim.ang_tol_deg * std::numbers::pi / 180.0;
    if (!rep.success) rep.failure_reason = "tracking tolerance not met";
    return rep;
}

std::vector<Scene> batch_scenes(int n, const Config& cfg, std::uint64_t seed) {
    SceneOptions opt;
    opt.flat = cfg.sim.flat_scenes;
    opt.min_creases = cfg.sim.min_creases;
    opt.max_creases = cfg.sim.max_creases;
    std::vector<Scene> scenes;
    scenes.reserve(std::max(0, n));
    for (int i = 0; i < n; ++i) scenes.push_back(generate_scene(episode_seed(seed, i), opt));
    return scenes;
}

BatchSummary run_batch(int n, const ArmModel& arm, const Config& cfg, const VisionSource& vision,
                       std::uint64_t seed, int threads) {
    BatchSummary summary;
    if (n <= 0) return summary;
    const std::vector<Scene> scenes = batch_scenes(n, cfg, seed);
    summary.episodes.resize(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            summary.episodes[i] = run_episode(scenes[i], arm, cfg, vision, episode_seed(seed, i), i);
        }
    };
    const int workers = std::clamp(threads, 1, n);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    int successes = 0, good = 0;
    for (const auto& r : summary.episodes) {
        successes += r.success ? 1 : 0;
        good += std::isfinite(r.proposal_px_err) && r.proposal_px_err <= cfg.sim.good_grasp_px ? 1 : 0;
    }
    summary.success_rate = static_cast<double>(successes) / n;
    summary.good_grasp_rate = static_cast<double>(good) / n;
    return summary;
}

RgbImage render_overlay(const RgbImage& rgb, const Eigen::Vector2d& pixel, double theta) {
    RgbImage out = rgb;
    const double half = 15.0;
    const Eigen::Vector2d d(std::cos(theta), std::sin(theta));
    draw_line(out, pixel.x() - half * d.x(), pixel.y() - half * d.y(), pixel.x() + half * d.x(),
              pixel.y() + half * d.y(), Rgb{0, 255, 255});
    draw_disc(out, pixel.x(), pixel.y(), 2.5, Rgb{255, 0, 0});
    return out;
}

std::string report_json(const EpisodeReport& r) { return report_object(r).dump(2) + "\n"; }

void write_trace_csv(const EpisodeReport& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileOpen, "cannot write " + path.string());
    out << "t,px,py,pz,pdx,pdy,pdz,pos_err,rot_err,q1,q2,q3,q4,q5,q6,q7\n";
    for (const auto& row : r.trace) {
        out << fmt_num(row.t);
        for (int k = 0; k < 3; ++k) out << ',' << fmt_num(row.p[k]);
        for (int k = 0; k < 3; ++k) out << ',' << fmt_num(row.p_d[k]);
        out << ',' << fmt_num(row.pos_err) << ',' << fmt_num(row.rot_err);
        for (int k = 0; k < kArmDof; ++k) out << ',' << fmt_num(row.q[k]);
        out << '\n';
    }
}

void write_batch_artifacts(const BatchSummary& summary, const std::vector<Scene>& scenes,
                           const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir / "summary.csv", std::ios::trunc);
    if (!csv) throw Error(ErrorCode::FileOpen, "cannot write " + (out_dir / "summary.csv").string());
    csv << "episode,success,pos_err,yaw_err,proposal_px_err\n";

    nlohmann::ordered_json top;
    top["episodes"] = summary.episodes.size();
    top["success_rate"] = summary.success_rate;
    top["good_grasp_rate"] = summary.good_grasp_rate;
    top["reports"] = nlohmann::ordered_json::array();

    for (std::size_t i = 0; i < summary.episodes.size(); ++i) {
        const EpisodeReport& r = summary.episodes[i];
        csv << r.episode << ',' << (r.success ? 1 : 0) << ',' << fmt_num(r.pos_err) << ','
            << fmt_num(r.yaw_err) << ',' << fmt_num(r.proposal_px_err) << '\n';
        top["reports"].push_back(report_object(r));

        char name[32];
        std::snprintf(name, sizeof name, "episode_%04d", r.episode);
        const auto dir = out_dir / name;
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "report.json", std::ios::trunc) << report_json(r);
        write_trace_csv(r, dir / "trace.csv");
        if (i < scenes.size()) {
            const RgbImage overlay = r.proposal_pixel
                                         ? render_overlay(scenes[i].rgb, *r.proposal_pixel, r.proposal->theta)
                                         : scenes[i].rgb;
            save_ppm(overlay, dir / "overlay.ppm");
        }
    }
    std::ofstream(out_dir / "report.json", std::ios::trunc) << top.dump(2) << "\n";
}

std::filesystem::path default_arm_path() {
    if (const char* env = std::getenv("BAGRASP_DATA_DIR")) return std::filesystem::path(env) / "sawyer_like.arm";
    return std::filesystem::path(BAGRASP_DEFAULT_DATA_DIR) / "sawyer_like.arm";
}

ArmModel load_configured_arm(const Config& cfg) {
    return load_arm(cfg.sim.arm_file.empty() ? default_arm_path() : std::filesystem::path(cfg.sim.arm_file));
}

}  // namespace bagrasp
