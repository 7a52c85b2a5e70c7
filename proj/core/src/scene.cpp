#include "bagrasp/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bagrasp/error.hpp"
#include "bagrasp/proposal.hpp"

namespace bagrasp {

namespace {

constexpr double kPreferredFactor = 1.1;
constexpr double kPi = std::numbers::pi;

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

bool segments_cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                    const Eigen::Vector2d& d) {
    auto orient = [](const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r) {
        const double v = (q - p).x() * (r - p).y() - (q - p).y() * (r - p).x();
        return (v > 0) - (v < 0);
    };
    return orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0;
}

double segment_distance(const Crease& s, const Crease& t) {
    if (segments_cross(s.a, s.b, t.a, t.b)) return 0.0;
    return std::min({point_segment_distance(s.a, t.a, t.b), point_segment_distance(s.b, t.a, t.b),
                     point_segment_distance(t.a, s.a, s.b), point_segment_distance(t.b, s.a, s.b)});
}

bool inside(const Crease& c, int w, int h, double margin) {
    for (const auto& p : {c.a, c.b})
        if (p.x() < margin || p.y() < margin || p.x() > w - 1 - margin || p.y() > h - 1 - margin) return false;
    return true;
}

Crease make_crease(const Eigen::Vector2d& mid, double angle, double length, double width, double elevation) {
    const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
    return {mid - 0.5 * length * dir, mid + 0.5 * length * dir, width, elevation};
}

double score(const Crease& c, const Eigen::Vector2d& center, double radius) {
    return std::abs((c.midpoint() - center).norm() - kPreferredFactor * radius);
}

void render(Scene& scene) {
    const auto& truth = scene.truth;
    RgbImage& rgb = scene.rgb;
    DepthImage& depth = scene.depth;
    const double r = truth.ball_radius;
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x) {
            const Eigen::Vector2d p(x, y);
            double alpha = 0.0;
            double elevation = 0.0;
            for (const auto& c : truth.creases) {
                const double d = point_segment_distance(p, c.a, c.b);
                alpha = std::max(alpha, std::clamp(0.5 * c.width + 0.5 - d, 0.0, 1.0));
                elevation += c.elevation_mm * std::exp(-0.5 * d * d / (c.width * c.width));
            }
            const double dc = (p - truth.ball_center).norm();
            elevation += 25.0 * std::exp(-0.5 * dc * dc / (r * r));
            Rgb color;
            if (dc <= r) {
                color = kBallColor;
            } else {
                auto mix = [&](std::uint8_t bg, std::uint8_t fg) {
                    return static_cast<std::uint8_t>(std::lround(bg + alpha * (fg - bg)));
                };
                color = {mix(kBackgroundColor.r, kCreaseColor.r), mix(kBackgroundColor.g, kCreaseColor.g),
                         mix(kBackgroundColor.b, kCreaseColor.b)};
            }
            rgb.at(x, y, 0) = color.r;
            rgb.at(x, y, 1) = color.g;
            rgb.at(x, y, 2) = color.b;
            depth.at(x, y) = static_cast<std::uint16_t>(std::lround(kTableDepthMm - elevation));
        }
    }
}

}  // namespace

double Crease::angle() const {
    const Eigen::Vector2d d = b - a;
    return wrap_half_turn(std::atan2(d.y(), d.x()));
}

std::optional<GraspLabel> label_for(const SceneTruth& truth) {
    const Crease* best = nullptr;
    double best_score = 0.0;
    for (const auto& c : truth.creases) {
        const double s = score(c, truth.ball_center, truth.ball_radius);
        if (!best || s < best_score || (s == best_score && c.length() > best->length())) {
            best = &c;
            best_score = s;
        }
    }
    if (!best) return std::nullopt;
    return GraspLabel{best->midpoint(), best->angle()};
}

Scene generate_scene(std::uint64_t seed, const SceneOptions& opt) {
    if (opt.width < 64 || opt.height < 36) {
        throw Error(ErrorCode::InvalidArgument, "generate_scene: canvas must be at least 64x36");
    }
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    Scene scene{RgbImage(opt.width, opt.height), DepthImage(opt.width, opt.height), {}};
    SceneTruth& truth = scene.truth;
    const double cx0 = 0.5 * opt.width, cy0 = 0.5 * opt.height;
    truth.ball_center = {cx0 + uniform(-0.08, 0.08) * opt.width, cy0 + uniform(-0.1, 0.1) * opt.height};
    truth.ball_radius = uniform(7.0, 8.5);
    const double r = truth.ball_radius;

    if (!opt.flat) {
        const int count = std::uniform_int_distribution<int>(opt.min_creases, opt.max_creases)(rng);
        // Target: near-tangent crease just outside the preferred ring.
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const double bearing = uniform(-kPi, kPi);
            const double dist = kPreferredFactor * r + uniform(4.0, 8.0);
            const Eigen::Vector2d mid = truth.ball_center + dist * Eigen::Vector2d(std::cos(bearing), std::sin(bearing));
            const double angle = bearing + 0.5 * kPi + uniform(-kPi / 6, kPi / 6);
            const Crease c = make_crease(mid, angle, uniform(40.0, 70.0), uniform(2.0, 4.0), uniform(5.0, 15.0));
            if (!inside(c, opt.width, opt.height, 8.0)) continue;
            if (point_segment_distance(truth.ball_center, c.a, c.b) < r + 3.0 + 0.5 * c.width) continue;
            truth.creases.push_back(c);
            break;
        }
        if (truth.creases.empty()) {
            throw Error(ErrorCode::InvalidArgument, "generate_scene: could not place the target crease");
        }
        const double target_score = score(truth.creases.front(), truth.ball_center, r);
        for (int placed = 1, attempt = 0; placed < count && attempt < 2000; ++attempt) {
            const Eigen::Vector2d mid(uniform(10.0, opt.width - 10.0), uniform(10.0, opt.height - 10.0));
            const Crease c = make_crease(mid, uniform(-kPi, kPi), uniform(30.0, 70.0), uniform(2.0, 4.0),
                                         uniform(5.0, 15.0));
            if (!inside(c, opt.width, opt.height, 8.0)) continue;
            if (score(c, truth.ball_center, r) < target_score + 20.0) continue;
            if (point_segment_distance(truth.ball_center, c.a, c.b) < r + 8.0) continue;
            bool clear = true;
            for (const auto& other : truth.creases) clear = clear && segment_distance(c, other) >= 12.0;
            if (!clear) continue;
            truth.creases.push_back(c);
            ++placed;
        }
    }
    truth.label = label_for(truth);
    render(scene);
    return scene;
}

RgbImage add_pixel_noise(const RgbImage& rgb, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0.0) return rgb;
    std::normal_distribution<double> noise(0.0, sigma);
    RgbImage out = rgb;
    for (auto& v : out.pixels) v = detail::store_sample<std::uint8_t>(v + noise(rng));
    return out;
}

LabeledScene to_labeled_scene(const Scene& scene) {
    if (!scene.truth.label) throw Error(ErrorCode::InvalidArgument, "to_labeled_scene: scene has no label");
    const Preprocessed pre = preprocess(scene.rgb, scene.depth);
    LabeledScene out;
    out.rgb = pre.rgb;
    out.depth = pre.depth;
    out.label_pixel = source_to_network_pixel(scene.truth.label->pixel, pre.window);
    out.label_theta = scene.truth.label->theta;
    return out;
}

std::vector<LabeledScene> generate_dataset(std::size_t n, std::uint64_t seed, const SceneOptions& options) {
    SceneOptions opt = options;
    opt.flat = false;
    std::vector<LabeledScene> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(to_labeled_scene(generate_scene(seed + i, opt)));
    return out;
}

}  // namespace bagrasp
