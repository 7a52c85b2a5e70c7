#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bagrasp/config.hpp"
#include "bagrasp/image.hpp"
#include "bagrasp/proposal.hpp"

namespace bagrasp {

using PixelPoint = Eigen::Vector2d;
/// Ordered pixel points; the loop is closed implicitly (last -> first).
using Polygon = std::vector<PixelPoint>;

struct BallDetection {
    PixelPoint center = PixelPoint::Zero();
    double radius = 0.0;
};

/// Separable Gaussian, kernel radius ceil(3 sigma), normalized, clamp-to-edge.
GrayImage gaussian_blur(const GrayImage& image, double sigma);

struct Gradient {
    GrayImage gx;
    GrayImage gy;
    /// sqrt(gx^2 + gy^2) / 4, so an unblurred unit step has magnitude 1.
    GrayImage magnitude;
};

/// 3x3 Sobel with clamp-to-edge borders.
Gradient sobel(const GrayImage& image);

/// Sobel -> non-maximum suppression over 4 quantized directions ->
/// hysteresis (strong: magnitude >= high; weak pixels >= low survive only
/// when 8-connected to a strong one). Thresholds are on the normalized
/// magnitude above. Output pixels are 0 or 1.
Mask canny(const GrayImage& image, double low, double high);

/// Centroid of the pixels inside [low, high] per channel; radius of the disc
/// with the same area. Throws Error(BallNotFound) if no pixel matches.
BallDetection detect_ball(const RgbImage& image, Rgb low, Rgb high);

/// 8-connected components of nonzero mask pixels, each traced into its outer
/// boundary with Moore-neighbour tracing. Components under 3 pixels are
/// dropped. Order follows the raster position of each component's first pixel.
std::vector<Polygon> find_contours(const Mask& mask);

PixelPoint polygon_mean(const Polygon& p);

/// atan of the least-squares slope of y on x, in (-pi/2, pi/2]. A vertical
/// point set (x variance < 1e-9) gives pi/2. Throws Error(DegeneratePolygon)
/// for fewer than two points or all points identical.
double polygon_theta(const Polygon& p);

/// Closed-loop length.
double perimeter(const Polygon& p);

struct GraspPixel {
    std::size_t index = 0;  // into the polygon list
    PixelPoint pixel = PixelPoint::Zero();
    double theta = 0.0;
};

/// Among polygons with perimeter > perimeter_min, the one whose mean lies
/// closest to 1.1 ball radii from the ball center. Ties go to the longer
/// perimeter, then to the earlier polygon. Throws Error(NoViableContour).
GraspPixel select_grasp(const std::vector<Polygon>& polygons, const BallDetection& ball,
                        double perimeter_min);

GraspProposal pixel_to_workspace(const PixelPoint& p, double theta, const CameraCalibration& cal,
                                 double timestamp);
PixelPoint workspace_to_pixel(const Eigen::Vector2d& target, const CameraCalibration& cal);

struct ClassicalResult {
    GraspProposal proposal;
    GraspPixel grasp;
    BallDetection ball;
    std::vector<Polygon> contours;
};

/// Full classical path: gray -> blur -> Canny, ball by color threshold,
/// contours, heuristic selection, calibration.
ClassicalResult classical_pipeline(const RgbImage& rgb, const ClassicalConfig& cfg,
                                   const CameraCalibration& cal, double timestamp = 0.0);

}  // namespace bagrasp
