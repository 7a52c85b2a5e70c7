#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "bagrasp/image.hpp"

namespace bagrasp {

struct ClassicalConfig {
    double sigma = 1.4;
    double canny_low = 0.1;
    double canny_high = 0.2;
    double perimeter_min = 60.0;
    Rgb color_low{200, 80, 0};
    Rgb color_high{255, 200, 70};
};

/// Pixel -> workspace affine map, per axis: target = scale * pixel + shift.
struct CameraCalibration {
    double scale_x = 0.0015;
    double scale_y = 0.0015;
    double shift_x = 0.45;
    double shift_y = -0.108;
};

struct DenoiseConfig {
    double window = 10.0;              // s
    double distance_threshold = 0.02;  // m
    double theta_bin_deg = 5.0;
};

struct ControlConfig {
    double kp = 0.8;
    double kd = 0.4;
    double damping = 1e-3;
    double qdot_max = 1.5;  // rad/s
    double rate = 100.0;    // Hz
};

struct SimConfig {
    double duration = 5.0;  // t_f - t_i, s
    double settle = 2.0;    // s after t_f
    int frames = 10;
    double frame_rate = 1.0;    // Hz
    double noise_sigma = 2.0;   // intensity levels, per frame
    double pos_tol = 0.005;     // m
    double ang_tol_deg = 2.0;
    double good_grasp_px = 10.0;
    std::array<double, 7> start_q{0.0, -0.5, 0.0, 1.1, 0.0, -0.6, 0.0};
    std::string arm_file;  // empty: data dir default
    bool flat_scenes = false;
    int min_creases = 2;
    int max_creases = 5;
};

struct TrainConfig {
    double lr = 1e-3;
    int batch = 4;
    int epochs = 50;
};

/// Every tunable in one place. Loaded from a key=value text file, then
/// optionally overridden key by key from the command line.
struct Config {
    ClassicalConfig classical;
    CameraCalibration camera;
    double grasp_z = 0.01;  // m, table_z + 1 cm
    DenoiseConfig denoise;
    ControlConfig control;
    SimConfig sim;
    TrainConfig train;

    /// Throws Error(ConfigError) for unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);

    /// Cross-field checks (thresholds ordered, gains positive, ...).
    void validate() const;

    /// Round-trippable key=value dump.
    std::string to_text() const;
};

/// '#' starts a comment; blank lines ignored; each other line is key=value.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text);

}  // namespace bagrasp
