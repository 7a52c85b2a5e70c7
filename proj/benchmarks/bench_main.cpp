#include <benchmark/benchmark.h>

#include "bagrasp/classical_vision.hpp"
#include "bagrasp/config.hpp"
#include "bagrasp/denoise.hpp"
#include "bagrasp/kinematics.hpp"
#include "bagrasp/learned_vision.hpp"
#include "bagrasp/scene.hpp"
#include "bagrasp/sim.hpp"
#include "bagrasp/so3.hpp"
#include "bagrasp/trajectory.hpp"

using namespace bagrasp;

namespace {

const ArmModel& arm() {
    static const ArmModel a = load_arm(default_arm_path());
    return a;
}

JointVector some_q() {
    JointVector q;
    q << 0.1, -0.5, 0.2, 1.1, -0.1, -0.6, 0.3;
    return q;
}

void BM_ExpLog(benchmark::State& st) {
    const Vec3 w(0.3, -1.2, 0.7);
    for (auto _ : st) benchmark::DoNotOptimize(log_so3(exp_so3(w)));
}
BENCHMARK(BM_ExpLog);

void BM_Canny(benchmark::State& st) {
    const GrayImage g = gaussian_blur(to_gray(generate_scene(1).rgb), 1.4);
    for (auto _ : st) benchmark::DoNotOptimize(canny(g, 0.1, 0.2));
}
BENCHMARK(BM_Canny)->Unit(benchmark::kMicrosecond);

void BM_ClassicalPipeline(benchmark::State& st) {
    const Config cfg;
    const Scene s = generate_scene(2);
    for (auto _ : st) benchmark::DoNotOptimize(classical_pipeline(s.rgb, cfg.classical, cfg.camera));
}
BENCHMARK(BM_ClassicalPipeline)->Unit(benchmark::kMicrosecond);

void BM_Cluster(benchmark::State& st) {
    std::vector<GraspProposal> ps(static_cast<std::size_t>(st.range(0)));
    for (std::size_t i = 0; i < ps.size(); ++i) {
        ps[i].target = {0.5 + 0.003 * static_cast<double>(i % 7), 0.01 * static_cast<double>(i % 5)};
        ps[i].timestamp = static_cast<double>(i);
    }
    for (auto _ : st) benchmark::DoNotOptimize(cluster(ps, 0.02));
}
BENCHMARK(BM_Cluster)->Arg(10)->Arg(100);

void BM_Fk(benchmark::State& st) {
    const JointVector q = some_q();
    for (auto _ : st) benchmark::DoNotOptimize(fk(arm(), q));
}
BENCHMARK(BM_Fk);

void BM_Jacobian(benchmark::State& st) {
    const JointVector q = some_q();
    for (auto _ : st) benchmark::DoNotOptimize(spatial_jacobian(arm(), q));
}
BENCHMARK(BM_Jacobian);

void BM_ControlStep(benchmark::State& st) {
    const JointVector q = some_q();
    const Pose start = fk(arm(), q);
    GraspProposal g;
    g.target = {0.6, 0.02};
    g.theta = 0.4;
    const CubicTrajectory traj = plan(start, g, 0.01, 0.0, 5.0);
    const TrajectorySample d = sample(traj, 2.0);
    const Vector6 prev = Vector6::Zero();
    for (auto _ : st) benchmark::DoNotOptimize(control_step(arm(), q, d, Gains{}, prev, 0.01));
}
BENCHMARK(BM_ControlStep);

void BM_Forward(benchmark::State& st) {
    const Sample s = make_sample(generate_dataset(1, 3).front());
    const ModelParams p = ModelParams::initialize(1);
    for (auto _ : st) benchmark::DoNotOptimize(forward(p, s.rgb, s.depth));
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMicrosecond);

void BM_Backward(benchmark::State& st) {
    std::vector<Sample> samples;
    for (const auto& sc : generate_dataset(4, 3)) samples.push_back(make_sample(sc));
    std::vector<const Sample*> ptrs;
    for (const auto& s : samples) ptrs.push_back(&s);
    const ModelParams p = ModelParams::initialize(1);
    for (auto _ : st) benchmark::DoNotOptimize(backward(p, ptrs));
}
BENCHMARK(BM_Backward)->Unit(benchmark::kMicrosecond);

void BM_Episode(benchmark::State& st) {
    Config cfg;
    cfg.sim.noise_sigma = 0.0;
    const Scene s = generate_scene(4);
    for (auto _ : st) benchmark::DoNotOptimize(run_episode(s, arm(), cfg, VisionSource{}, 4));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
