// bagrasp: command-line front end for the vision, denoise, planning,
// training and simulation stages.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bagrasp/classical_vision.hpp"
#include "bagrasp/config.hpp"
#include "bagrasp/denoise.hpp"
#include "bagrasp/error.hpp"
#include "bagrasp/kinematics.hpp"
#include "bagrasp/learned_vision.hpp"
#include "bagrasp/proposal.hpp"
#include "bagrasp/scene.hpp"
#include "bagrasp/sim.hpp"
#include "bagrasp/trajectory.hpp"

namespace fs = std::filesystem;
using namespace bagrasp;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Bad or unreadable input is a usage problem; everything else happened while
// doing the work.
int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::FileOpen:
        case ErrorCode::BadMagic:
        case ErrorCode::BadHeader:
        case ErrorCode::UnsupportedFormat:
        case ErrorCode::TruncatedPayload:
        case ErrorCode::ShapeMismatch:
        case ErrorCode::ConfigError:
        case ErrorCode::ParseError:
            return kExitUsage;
        default:
            return kExitRuntime;
    }
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw UsageError(std::string("missing ") + what);
    if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " not found: " + path);
}

struct Globals {
    std::string config_file;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    std::string out;
};

Config resolve_config(const Globals& g) {
    Config cfg;
    if (!g.config_file.empty()) {
        require_file(g.config_file, "config file");
        cfg = load_config(g.config_file);
    }
    for (const auto& kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct VisionArgs {
    std::string mode = "classical";
    std::string rgb, depth, params, overlay;
    double t = 0.0;
};

int cmd_vision(const Globals& g, const VisionArgs& a) {
    const Config cfg = resolve_config(g);
    const VisionMode mode = parse_vision_mode(a.mode);
    if (mode == VisionMode::File) throw UsageError("vision --mode must be classical or learned");
    require_file(a.rgb, "--rgb image");
    const RgbImage rgb = load_ppm(a.rgb);

    GraspProposal proposal;
    Eigen::Vector2d pixel;
    if (mode == VisionMode::Classical) {
        const auto res = classical_pipeline(rgb, cfg.classical, cfg.camera, a.t);
        proposal = res.proposal;
        pixel = res.grasp.pixel;
    } else {
        require_file(a.depth, "--depth image");
        require_file(a.params, "--params file");
        const DepthImage depth = load_pgm(a.depth);
        const ModelParams params = load_params(a.params);
        const auto res = learned_pipeline(params, rgb, depth, cfg.camera, a.t);
        proposal = res.proposal;
        pixel = res.source_pixel;
    }
    if (!a.overlay.empty()) save_ppm(render_overlay(rgb, pixel, proposal.theta), a.overlay);
    std::cout << to_json_line(proposal) << '\n';
    return 0;
}

int cmd_denoise(const Globals& g, std::optional<double> now) {
    const Config cfg = resolve_config(g);
    const auto proposals = read_json_lines(std::cin);
    if (proposals.empty()) throw Error(ErrorCode::NoProposals, "denoise: no proposals on stdin");
    ProposalBuffer buffer(cfg.denoise.window, cfg.denoise.distance_threshold);
    for (const auto& p : proposals) buffer.push(p);
    const double t_now = now.value_or(proposals.back().timestamp);
    std::cout << to_json_line(denoise(buffer, t_now, cfg.denoise.theta_bin_deg)) << '\n';
    return 0;
}

struct PlanArgs {
    std::string proposal_file;
    std::optional<double> x, y, theta;
    double dt = 0.0;  // 0: control period
};

int cmd_plan(const Globals& g, const PlanArgs& a) {
    const Config cfg = resolve_config(g);
    GraspProposal target;
    if (!a.proposal_file.empty()) {
        require_file(a.proposal_file, "--proposal file");
        std::ifstream in(a.proposal_file);
        const auto props = read_json_lines(in);
        if (props.empty()) throw UsageError("--proposal file holds no proposals");
        target = props.back();
    } else if (a.x && a.y) {
        target.target = {*a.x, *a.y};
        target.theta = wrap_half_turn(a.theta.value_or(0.0));
    } else {
        throw UsageError("plan needs --proposal FILE or --x and --y");
    }
    const ArmModel arm = load_configured_arm(cfg);
    const JointVector q0 = Eigen::Map<const JointVector>(cfg.sim.start_q.data());
    const CubicTrajectory traj = plan(fk(arm, q0), target, cfg.grasp_z, 0.0, cfg.sim.duration);

    const double dt = a.dt > 0.0 ? a.dt : 1.0 / cfg.control.rate;
    const auto n = static_cast<long>(std::llround(cfg.sim.duration / dt));

    std::ofstream file;
    if (!g.out.empty()) {
        fs::create_directories(g.out);
        file.open(fs::path(g.out) / "trajectory.csv", std::ios::trunc);
        if (!file) throw Error(ErrorCode::FileOpen, "cannot write trajectory.csv in " + g.out);
    }
    std::ostream& out = g.out.empty() ? std::cout : file;
    out << "t,px,py,pz,vx,vy,vz,r00,r01,r02,r10,r11,r12,r20,r21,r22,wffx,wffy,wffz\n";
    for (long k = 0; k <= n; ++k) {
        const double t = k == n ? cfg.sim.duration : k * dt;
        const TrajectorySample s = sample(traj, t);
        out << fmt(t);
        for (int i = 0; i < 3; ++i) out << ',' << fmt(s.p_d[i]);
        for (int i = 0; i < 3; ++i) out << ',' << fmt(s.pdot_d[i]);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) out << ',' << fmt(s.r_d(r, c));
        for (int i = 0; i < 3; ++i) out << ',' << fmt(s.w_ff[i]);
        out << '\n';
    }
    return 0;
}

struct SimArgs {
    int batch = 1;
    std::string vision = "classical";
    std::string proposals, params;
    int threads = 1;
    bool flat = false;
};

int cmd_simulate(const Globals& g, const SimArgs& a) {
    Config cfg = resolve_config(g);
    if (a.flat) cfg.sim.flat_scenes = true;
    if (a.batch < 0) throw UsageError("--batch must be >= 0");
    VisionSource vision;
    vision.mode = parse_vision_mode(a.vision);
    if (vision.mode == VisionMode::Learned) {
        require_file(a.params, "--params file");
        vision.params = load_params(a.params);
    } else if (vision.mode == VisionMode::File) {
        require_file(a.proposals, "--proposals file");
        std::ifstream in(a.proposals);
        vision.file_proposals = read_json_lines(in);
    }
    const ArmModel arm = load_configured_arm(cfg);
    const fs::path out_dir = g.out.empty() ? fs::path("sim_out") : fs::path(g.out);

    const BatchSummary summary = run_batch(a.batch, arm, cfg, vision, g.seed, a.threads);
    write_batch_artifacts(summary, batch_scenes(a.batch, cfg, g.seed), out_dir);

    int successes = 0;
    for (const auto& r : summary.episodes) {
        successes += r.success ? 1 : 0;
        if (!r.success) {
            std::cerr << "episode " << r.episode << ": " << r.failure_reason << '\n';
        }
    }
    std::cout << "{\"episodes\":" << summary.episodes.size() << ",\"successes\":" << successes
              << ",\"success_rate\":" << fmt(summary.success_rate)
              << ",\"good_grasp_rate\":" << fmt(summary.good_grasp_rate) << ",\"out\":\""
              << out_dir.generic_string() << "\"}\n";
    return 0;
}

struct TrainArgs {
    std::string data;
    std::optional<int> epochs, batch;
    std::optional<double> lr;
    bool cosine = false;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
    const Config cfg = resolve_config(g);
    if (a.data.empty()) throw UsageError("train needs --data DIR");
    if (!fs::is_regular_file(fs::path(a.data) / "labels.csv")) {
        throw UsageError("no labels.csv in " + a.data);
    }
    const auto dataset = load_dataset(a.data);
    TrainOptions opt;
    opt.epochs = a.epochs.value_or(cfg.train.epochs);
    opt.batch = a.batch.value_or(cfg.train.batch);
    opt.lr = a.lr.value_or(cfg.train.lr);
    opt.seed = g.seed;
    opt.cosine_decay = a.cosine;
    if (opt.epochs < 0 || opt.batch < 1 || !(opt.lr > 0.0)) {
        throw UsageError("need --epochs >= 0, --batch >= 1, --lr > 0");
    }

    const fs::path out_dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
    fs::create_directories(out_dir);
    std::ofstream loss(out_dir / "loss.csv", std::ios::trunc);
    if (!loss) throw Error(ErrorCode::FileOpen, "cannot write loss.csv in " + out_dir.string());
    loss << "epoch,loss\n";
    const TrainResult result = train(dataset, opt, [&](int epoch, double l) {
        loss << epoch << ',' << fmt(l) << '\n';
        std::cerr << "epoch " << epoch << " loss " << l << '\n';
    });
    save_params(result.params, out_dir / "params.bin");
    std::cout << "{\"epochs\":" << opt.epochs << ",\"initial_loss\":" << fmt(result.epoch_loss.front())
              << ",\"final_loss\":" << fmt(result.epoch_loss.back()) << ",\"params\":\""
              << (out_dir / "params.bin").generic_string() << "\"}\n";
    return 0;
}

struct GenArgs {
    int n = 10;
    bool flat = false;
    bool full = false;
};

// Full-resolution scenes with labels in source pixels; meant for `vision`.
void save_full_scenes(const std::vector<Scene>& scenes, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream labels(dir / "labels.csv", std::ios::trunc);
    if (!labels) throw Error(ErrorCode::FileOpen, "cannot write labels.csv in " + dir.string());
    labels << "id,px,py,theta\n";
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "scene_%04zu", i);
        save_ppm(scenes[i].rgb, dir / (std::string(stem) + ".ppm"));
        save_pgm(scenes[i].depth, dir / (std::string(stem) + ".pgm"));
        const auto& label = scenes[i].truth.label;
        labels << i << ',' << (label ? fmt(label->pixel.x()) : "nan") << ','
               << (label ? fmt(label->pixel.y()) : "nan") << ',' << (label ? fmt(label->theta) : "nan")
               << '\n';
    }
}

int cmd_genscenes(const Globals& g, const GenArgs& a) {
    const Config cfg = resolve_config(g);
    if (g.out.empty()) throw UsageError("genscenes needs --out DIR");
    if (a.n < 0) throw UsageError("--n must be >= 0");
    if (a.flat && !a.full) throw UsageError("--flat scenes carry no label; combine with --full");
    SceneOptions opt;
    opt.flat = a.flat;
    opt.min_creases = cfg.sim.min_creases;
    opt.max_creases = cfg.sim.max_creases;
    if (a.full) {
        std::vector<Scene> scenes;
        for (int i = 0; i < a.n; ++i) scenes.push_back(generate_scene(g.seed + i, opt));
        save_full_scenes(scenes, g.out);
    } else {
        save_dataset(generate_dataset(static_cast<std::size_t>(a.n), g.seed, opt), g.out);
    }
    std::cout << "{\"scenes\":" << a.n << ",\"out\":\"" << fs::path(g.out).generic_string() << "\"}\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grasp planning and arm control on synthetic bag scenes"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config_file, "key=value config file");
    app.add_option("--set", g.overrides, "Override one config key (key=value); repeatable");
    app.add_option("--seed", g.seed, "Seed for scene generation, noise and training");
    app.add_option("--out", g.out, "Output directory");

    int rc = 0;

    VisionArgs va;
    auto* vision = app.add_subcommand("vision", "Propose a grasp from one image");
    vision->add_option("--mode", va.mode, "classical or learned")->check(CLI::IsMember({"classical", "learned"}));
    vision->add_option("--rgb", va.rgb, "RGB image (binary PPM)")->required();
    vision->add_option("--depth", va.depth, "Depth image (16-bit PGM), learned mode");
    vision->add_option("--params", va.params, "Model parameters, learned mode");
    vision->add_option("--overlay", va.overlay, "Write the image with the grasp drawn on it");
    vision->add_option("--t", va.t, "Timestamp attached to the proposal");
    vision->callback([&] { rc = cmd_vision(g, va); });

    std::optional<double> now;
    auto* den = app.add_subcommand("denoise", "Cluster JSON-lines proposals from stdin");
    den->add_option("--now", now, "Query time (default: newest timestamp)");
    den->callback([&] { rc = cmd_denoise(g, now); });

    PlanArgs pa;
    auto* pl = app.add_subcommand("plan", "Sample the trajectory toward a grasp as CSV");
    pl->add_option("--proposal", pa.proposal_file, "JSON-lines file; the last proposal is used");
    pl->add_option("--x", pa.x, "Target x, m");
    pl->add_option("--y", pa.y, "Target y, m");
    pl->add_option("--theta", pa.theta, "Target yaw, rad");
    pl->add_option("--dt", pa.dt, "Sample period, s (default: control period)");
    pl->callback([&] { rc = cmd_plan(g, pa); });

    SimArgs sa;
    auto* sim = app.add_subcommand("simulate", "Run seeded closed-loop episodes");
    sim->add_option("--batch", sa.batch, "Number of episodes");
    sim->add_option("--vision", sa.vision, "classical, learned or file")
        ->check(CLI::IsMember({"classical", "learned", "file"}));
    sim->add_option("--proposals", sa.proposals, "JSON-lines proposals for --vision file");
    sim->add_option("--params", sa.params, "Model parameters for --vision learned");
    sim->add_option("--threads", sa.threads, "Worker threads")->check(CLI::PositiveNumber);
    sim->add_flag("--flat", sa.flat, "Scenes without creases");
    sim->callback([&] { rc = cmd_simulate(g, sa); });

    TrainArgs ta;
    auto* tr = app.add_subcommand("train", "Train the two-branch regressor");
    tr->add_option("--data", ta.data, "Dataset directory from genscenes");
    tr->add_option("--epochs", ta.epochs, "Epochs (default from config)");
    tr->add_option("--batch", ta.batch, "Batch size (default from config)");
    tr->add_option("--lr", ta.lr, "Learning rate (default from config)");
    tr->add_flag("--cosine", ta.cosine, "Cosine-anneal the learning rate to zero");
    tr->callback([&] { rc = cmd_train(g, ta); });

    GenArgs ga;
    auto* gen = app.add_subcommand("genscenes", "Write a synthetic labeled dataset");
    gen->add_option("--n", ga.n, "Number of scenes");
    gen->add_flag("--flat", ga.flat, "Scenes without creases (requires --full)");
    gen->add_flag("--full", ga.full, "Full-resolution scenes instead of 64x36 network inputs");
    gen->callback([&] { rc = cmd_genscenes(g, ga); });

    auto* cfgcmd = app.add_subcommand("config", "Print the effective configuration");
    cfgcmd->callback([&] { std::cout << resolve_config(g).to_text(); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "bagrasp: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "bagrasp: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "bagrasp: " << e.what() << '\n';
        return kExitRuntime;
    }
    return rc;
}
