#include "bagrasp/classical_vision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bagrasp/error.hpp"

namespace bagrasp {

namespace {

constexpr double kBallDistanceFactor = 1.1;

double clamped(const GrayImage& img, int x, int y) {
    x = std::clamp(x, 0, img.width - 1);
    y = std::clamp(y, 0, img.height - 1);
    return img.at(x, y);
}

// Clockwise in image coordinates (y down), starting west.
constexpr std::array<std::array<int, 2>, 8> kRing{{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1},
}};

int ring_index(int dx, int dy) {
    for (int k = 0; k < 8; ++k)
        if (kRing[k][0] == dx && kRing[k][1] == dy) return k;
    return -1;
}

Polygon trace_boundary(const std::vector<int>& labels, int width, int height, int label,
                       int sx, int sy, std::size_t component_size) {
    auto inside = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < width && y < height &&
               labels[static_cast<std::size_t>(y) * width + x] == label;
    };
    Polygon pts{{static_cast<double>(sx), static_cast<double>(sy)}};
    int cx = sx, cy = sy;
    int back = 0;  // west of the start pixel is background (raster order)
    bool have_first = false;
    int fx = 0, fy = 0;
    const std::size_t max_steps = 4 * component_size + 16;
    for (std::size_t step = 0; step < max_steps; ++step) {
        int d = -1;
        for (int k = 1; k <= 8; ++k) {
            const int cand = (back + k) % 8;
            if (inside(cx + kRing[cand][0], cy + kRing[cand][1])) {
                d = cand;
                break;
            }
        }
        if (d < 0) break;  // isolated pixel
        const int nx = cx + kRing[d][0];
        const int ny = cy + kRing[d][1];
        if (cx == sx && cy == sy && have_first && nx == fx && ny == fy) break;
        if (!have_first) {
            have_first = true;
            fx = nx;
            fy = ny;
        }
        const int bx = cx + kRing[(d + 7) % 8][0];
        const int by = cy + kRing[(d + 7) % 8][1];
        back = ring_index(bx - nx, by - ny);
        cx = nx;
        cy = ny;
        pts.emplace_back(cx, cy);
    }
    if (pts.size() > 1 && pts.back() == pts.front()) pts.pop_back();
    return pts;
}

}  // namespace

GrayImage gaussian_blur(const GrayImage& image, double sigma) {
    if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gaussian_blur: sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    GrayImage tmp(image.width, image.height);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * clamped(image, x + i, y);
            tmp.at(x, y) = acc;
        }
    GrayImage out(image.width, image.height);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * clamped(tmp, x, y + i);
            out.at(x, y) = acc;
        }
    return out;
}

Gradient sobel(const GrayImage& image) {
    Gradient g{GrayImage(image.width, image.height), GrayImage(image.width, image.height),
               GrayImage(image.width, image.height)};
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            auto p = [&](int dx, int dy) { return clamped(image, x + dx, y + dy); };
            const double gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
            const double gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
            g.gx.at(x, y) = gx;
            g.gy.at(x, y) = gy;
            g.magnitude.at(x, y) = std::sqrt(gx * gx + gy * gy) / 4.0;
        }
    }
    return g;
}

Mask canny(const GrayImage& image, double low, double high) {
    if (!(low > 0.0 && low < high && high <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "canny: need 0 < low < high <= 1");
    }
    const Gradient g = sobel(image);
    const int w = image.width, h = image.height;
    auto mag = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return g.magnitude.at(x, y);
    };

    GrayImage thin(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double m = g.magnitude.at(x, y);
            if (m < low) continue;
            double angle = std::atan2(g.gy.at(x, y), g.gx.at(x, y)) * 180.0 / std::numbers::pi;
            if (angle < 0) angle += 180.0;
            int dx, dy;
            if (angle < 22.5 || angle >= 157.5) {
                dx = 1; dy = 0;
            } else if (angle < 67.5) {
                dx = 1; dy = 1;
            } else if (angle < 112.5) {
                dx = 0; dy = 1;
            } else {
                dx = -1; dy = 1;
            }
            // Strict on the forward side, non-strict behind, so a two-pixel
            // plateau keeps exactly one pixel.
            if (m >= mag(x - dx, y - dy) && m > mag(x + dx, y + dy)) thin.at(x, y) = m;
        }
    }

    Mask out(w, h, 0);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (thin.at(x, y) >= high && !out.at(x, y)) {
                out.at(x, y) = 1;
                stack.emplace_back(x, y);
                while (!stack.empty()) {
                    const auto [cx, cy] = stack.back();
                    stack.pop_back();
                    for (const auto& d : kRing) {
                        const int nx = cx + d[0], ny = cy + d[1];
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        if (!out.at(nx, ny) && thin.at(nx, ny) >= low) {
                            out.at(nx, ny) = 1;
                            stack.emplace_back(nx, ny);
                        }
                    }
                }
            }
    return out;
}

BallDetection detect_ball(const RgbImage& image, Rgb low, Rgb high) {
    double sx = 0.0, sy = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const auto r = image.at(x, y, 0), g = image.at(x, y, 1), b = image.at(x, y, 2);
            if (r >= low.r && r <= high.r && g >= low.g && g <= high.g && b >= low.b && b <= high.b) {
                sx += x;
                sy += y;
                ++count;
            }
        }
    }
    if (count == 0) throw Error(ErrorCode::BallNotFound, "ball not found");
    BallDetection ball;
    ball.center = {sx / count, sy / count};
    ball.radius = std::sqrt(static_cast<double>(count) / std::numbers::pi);
    return ball;
}

std::vector<Polygon> find_contours(const Mask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<int> labels(static_cast<std::size_t>(w) * h, -1);
    std::vector<Polygon> polygons;
    std::vector<std::pair<int, int>> stack;
    int next_label = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y) || labels[static_cast<std::size_t>(y) * w + x] >= 0) continue;
            const int label = next_label++;
            std::size_t size = 0;
            labels[static_cast<std::size_t>(y) * w + x] = label;
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                ++size;
                for (const auto& d : kRing) {
                    const int nx = cx + d[0], ny = cy + d[1];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    auto& l = labels[static_cast<std::size_t>(ny) * w + nx];
                    if (mask.at(nx, ny) && l < 0) {
                        l = label;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            if (size < 3) continue;
            polygons.push_back(trace_boundary(labels, w, h, label, x, y, size));
        }
    }
    return polygons;
}

PixelPoint polygon_mean(const Polygon& p) {
    if (p.empty()) throw Error(ErrorCode::DegeneratePolygon, "polygon_mean: empty polygon");
    PixelPoint sum = PixelPoint::Zero();
    for (const auto& v : p) sum += v;
    return sum / static_cast<double>(p.size());
}

double polygon_theta(const Polygon& p) {
    if (p.size() < 2) throw Error(ErrorCode::DegeneratePolygon, "polygon_theta: need >= 2 points");
    const PixelPoint m = polygon_mean(p);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& v : p) {
        const PixelPoint d = v - m;
        sxx += d.x() * d.x();
        sxy += d.x() * d.y();
        syy += d.y() * d.y();
    }
    const double n = static_cast<double>(p.size());
    if (sxx / n < 1e-9) {
        if (syy / n < 1e-9) {
            throw Error(ErrorCode::DegeneratePolygon, "polygon_theta: all points identical");
        }
        return std::numbers::pi / 2;
    }
    return std::atan(sxy / sxx);
}

double perimeter(const Polygon& p) {
    double len = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) len += (p[(i + 1) % p.size()] - p[i]).norm();
    return len;
}

GraspPixel select_grasp(const std::vector<Polygon>& polygons, const BallDetection& ball,
                        double perimeter_min) {
    if (!(perimeter_min > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "select_grasp: perimeter_min must be > 0");
    }
    const double preferred = kBallDistanceFactor * ball.radius;
    bool found = false;
    std::size_t best = 0;
    double best_score = 0.0, best_perimeter = 0.0;
    for (std::size_t i = 0; i < polygons.size(); ++i) {
        const double per = perimeter(polygons[i]);
        if (!(per > perimeter_min)) continue;
        const double score = std::abs((polygon_mean(polygons[i]) - ball.center).norm() - preferred);
        if (!found || score < best_score || (score == best_score && per > best_perimeter)) {
            found = true;
            best = i;
            best_score = score;
            best_perimeter = per;
        }
    }
    if (!found) throw Error(ErrorCode::NoViableContour, "no viable contour");
    return {best, polygon_mean(polygons[best]), polygon_theta(polygons[best])};
}

GraspProposal pixel_to_workspace(const PixelPoint& p, double theta, const CameraCalibration& cal,
                                 double timestamp) {
    GraspProposal out;
    out.target = {cal.scale_x * p.x() + cal.shift_x, cal.scale_y * p.y() + cal.shift_y};
    out.theta = theta;
    out.timestamp = timestamp;
    return out;
}

PixelPoint workspace_to_pixel(const Eigen::Vector2d& target, const CameraCalibration& cal) {
    return {(target.x() - cal.shift_x) / cal.scale_x, (target.y() - cal.shift_y) / cal.scale_y};
}

ClassicalResult classical_pipeline(const RgbImage& rgb, const ClassicalConfig& cfg,
                                   const CameraCalibration& cal, double timestamp) {
    ClassicalResult r;
    const Mask edges = canny(gaussian_blur(to_gray(rgb), cfg.sigma), cfg.canny_low, cfg.canny_high);
    r.ball = detect_ball(rgb, cfg.color_low, cfg.color_high);
    r.contours = find_contours(edges);
    r.grasp = select_grasp(r.contours, r.ball, cfg.perimeter_min);
    r.proposal = pixel_to_workspace(r.grasp.pixel, r.grasp.theta, cal, timestamp);
    return r;
}

}  // namespace bagrasp
