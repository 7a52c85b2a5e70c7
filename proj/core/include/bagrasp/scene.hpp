#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "bagrasp/image.hpp"
#include "bagrasp/learned_vision.hpp"

namespace bagrasp {

/// Raised fold in the bag, drawn as a bright band.
struct Crease {
    Eigen::Vector2d a = Eigen::Vector2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    double width = 3.0;         // px
    double elevation_mm = 10.0;

    Eigen::Vector2d midpoint() const { return 0.5 * (a + b); }
    double length() const { return (b - a).norm(); }
    /// Direction in pixel coordinates (y down), in (-pi/2, pi/2].
    double angle() const;
};

struct GraspLabel {
    Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
    double theta = 0.0;
};

struct SceneTruth {
    Eigen::Vector2d ball_center = Eigen::Vector2d::Zero();
    double ball_radius = 0.0;
    std::vector<Crease> creases;
    std::optional<GraspLabel> label;  // absent for flat scenes
};

struct Scene {
    RgbImage rgb;
    DepthImage depth;
    SceneTruth truth;
};

struct SceneOptions {
    int width = 256;
    int height = 144;
    bool flat = false;
    int min_creases = 2;
    int max_creases = 5;
};

inline constexpr Rgb kBallColor{255, 140, 20};
inline constexpr Rgb kBackgroundColor{70, 70, 72};
inline constexpr Rgb kCreaseColor{235, 235, 240};
inline constexpr double kTableDepthMm = 600.0;

/// Deterministic per seed. A "crumpled" scene has one crease whose midpoint
/// sits just outside 1.1 ball radii from the ball plus distractor creases
/// well away from that ring; a flat scene has none.
Scene generate_scene(std::uint64_t seed, const SceneOptions& options = {});

/// Crease whose midpoint distance to the ball center is nearest 1.1 radii
/// (ties: longest); its midpoint and direction.
std::optional<GraspLabel> label_for(const SceneTruth& truth);

/// Per-channel additive Gaussian noise, rounded and clamped.
RgbImage add_pixel_noise(const RgbImage& rgb, double sigma, std::mt19937_64& rng);

/// Crop + resize to the network frame with the label mapped along.
/// Throws Error(InvalidArgument) for unlabeled scenes.
LabeledScene to_labeled_scene(const Scene& scene);

std::vector<LabeledScene> generate_dataset(std::size_t n, std::uint64_t seed,
                                           const SceneOptions& options = {});

}  // namespace bagrasp
