#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <type_traits>
#include <vector>

#include "bagrasp/error.hpp"

namespace bagrasp {

/// Row-major interleaved raster.
template <typename T, int Channels>
struct Image {
    using value_type = T;
    static constexpr int channels = Channels;

    int width = 0;
    int height = 0;
    std::vector<T> pixels;

    Image() = default;
    Image(int w, int h, T fill = T{}) : width(w), height(h) {
        if (w < 1 || h < 1) {
            throw Error(ErrorCode::InvalidArgument, "image dimensions must be >= 1");
        }
        pixels.assign(static_cast<std::size_t>(w) * h * Channels, fill);
    }

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width + x) * Channels + c;
    }
    T& at(int x, int y, int c = 0) { return pixels[index(x, y, c)]; }
    const T& at(int x, int y, int c = 0) const { return pixels[index(x, y, c)]; }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

    bool operator==(const Image&) const = default;
};

using RgbImage = Image<std::uint8_t, 3>;
/// Depth in millimeters.
using DepthImage = Image<std::uint16_t, 1>;
/// Intensities in [0, 1].
using GrayImage = Image<double, 1>;
using Mask = Image<std::uint8_t, 1>;

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

RgbImage load_ppm(const std::filesystem::path& path);
void save_ppm(const RgbImage& image, const std::filesystem::path& path);
DepthImage load_pgm(const std::filesystem::path& path);
void save_pgm(const DepthImage& image, const std::filesystem::path& path);

/// In-memory codecs; the file functions are thin wrappers around these.
RgbImage decode_ppm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_ppm(const RgbImage& image);
DepthImage decode_pgm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pgm(const DepthImage& image);

/// Luminance 0.299 R + 0.587 G + 0.114 B scaled to [0, 1].
GrayImage to_gray(const RgbImage& image);

struct CropWindow {
    int x0 = 0, y0 = 0, width = 0, height = 0;
};

/// Central half-width by half-height window (a quarter of the area).
CropWindow center_quarter_window(int width, int height);

template <typename T, int C>
Image<T, C> crop(const Image<T, C>& image, const CropWindow& win) {
    Image<T, C> out(win.width, win.height);
    for (int y = 0; y < win.height; ++y)
        for (int x = 0; x < win.width; ++x)
            for (int c = 0; c < C; ++c) out.at(x, y, c) = image.at(win.x0 + x, win.y0 + y, c);
    return out;
}

/// Throws Error(ImageTooSmall) below 4x4.
template <typename T, int C>
Image<T, C> crop_center_quarter(const Image<T, C>& image) {
    return crop(image, center_quarter_window(image.width, image.height));
}

namespace detail {
template <typename T>
T store_sample(double v) {
    if constexpr (std::is_floating_point_v<T>) {
        return static_cast<T>(v);
    } else {
        const double hi = static_cast<double>(std::numeric_limits<T>::max());
        const double r = std::round(v);
        return static_cast<T>(r < 0.0 ? 0.0 : (r > hi ? hi : r));
    }
}
}  // namespace detail

/// Bilinear resampling with pixel-center alignment: output pixel i samples the
/// source at (i + 0.5) * in / out - 0.5, clamped to the border. Integer
/// rasters round to nearest.
template <typename T, int C>
Image<T, C> resize_bilinear(const Image<T, C>& image, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw Error(ErrorCode::InvalidArgument, "resize: output dimensions must be >= 1");
    }
    Image<T, C> out(out_w, out_h);
    const double sx = static_cast<double>(image.width) / out_w;
    const double sy = static_cast<double>(image.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = fy < 0.0 ? 0.0 : (fy > image.height - 1 ? image.height - 1 : fy);
        const int y0 = static_cast<int>(fy);
        const int y1 = y0 + 1 < image.height ? y0 + 1 : y0;
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = fx < 0.0 ? 0.0 : (fx > image.width - 1 ? image.width - 1 : fx);
            const int x0 = static_cast<int>(fx);
            const int x1 = x0 + 1 < image.width ? x0 + 1 : x0;
            const double wx = fx - x0;
            for (int c = 0; c < C; ++c) {
                const double top = (1.0 - wx) * image.at(x0, y0, c) + wx * image.at(x1, y0, c);
                const double bot = (1.0 - wx) * image.at(x0, y1, c) + wx * image.at(x1, y1, c);
                out.at(x, y, c) = detail::store_sample<T>((1.0 - wy) * top + wy * bot);
            }
        }
    }
    return out;
}

// Drawing helpers used for overlays.
void draw_disc(RgbImage& image, double cx, double cy, double radius, Rgb color);
void draw_line(RgbImage& image, double x0, double y0, double x1, double y1, Rgb color);

}  // namespace bagrasp
