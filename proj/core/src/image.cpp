#include "bagrasp/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

namespace bagrasp {


namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileOpen, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileOpen, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::FileOpen, "write failed for " + path.string());
}

// Netpbm header: magic, then width, height, maxval as ASCII integers separated
// by whitespace, '#' comments running to end of line, then exactly one
// whitespace byte before the raster.
struct NetpbmHeader {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t data_offset = 0;
};

NetpbmHeader parse_header(const std::vector<std::uint8_t>& bytes, const char* magic) {
    if (bytes.size() < 2 || bytes[0] != magic[0] || bytes[1] != magic[1]) {
        throw Error(ErrorCode::BadMagic, std::string("expected netpbm magic ") + magic);
    }
    std::size_t pos = 2;
    auto skip_space_and_comments = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&](const char* what) {
        skip_space_and_comments();
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
            throw Error(ErrorCode::BadHeader, std::string("netpbm header: missing ") + what);
        }
        long value = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            value = value * 10 + (bytes[pos] - '0');
            if (value > std::numeric_limits<int>::max()) {
                throw Error(ErrorCode::BadHeader, std::string("netpbm header: oversized ") + what);
            }
            ++pos;
        }
        return static_cast<int>(value);
    };
    NetpbmHeader h;
    h.width = read_int("width");
    h.height = read_int("height");
    h.maxval = read_int("maxval");
    if (h.width < 1 || h.height < 1) {
        throw Error(ErrorCode::BadHeader, "netpbm header: zero dimension");
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw Error(ErrorCode::BadHeader, "netpbm header: missing separator before raster");
    }
    h.data_offset = pos + 1;
    return h;
}

std::string header_text(const char* magic, int w, int h, int maxval) {
    return std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n" +
           std::to_string(maxval) + "\n";
}

}  // namespace

RgbImage decode_ppm(const std::vector<std::uint8_t>& bytes) {
    const NetpbmHeader h = parse_header(bytes, "P6");
    if (h.maxval != 255) {
        throw Error(ErrorCode::UnsupportedFormat, "PPM: only maxval 255 is supported");
    }
    const std::size_t need = static_cast<std::size_t>(h.width) * h.height * 3;
    if (bytes.size() - h.data_offset < need) {
        throw Error(ErrorCode::TruncatedPayload, "PPM: raster shorter than header declares");
    }
    RgbImage img(h.width, h.height);
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(h.data_offset), need,
                img.pixels.begin());
    return img;
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& image) {
    const std::string head = header_text("P6", image.width, image.height, 255);
    std::vector<std::uint8_t> out(head.begin(), head.end());
    out.insert(out.end(), image.pixels.begin(), image.pixels.end());
    return out;
}

DepthImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
    const NetpbmHeader h = parse_header(bytes, "P5");
    if (h.maxval != 65535) {
        throw Error(ErrorCode::UnsupportedFormat, "PGM: only 16-bit maxval 65535 is supported");
    }
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    if (bytes.size() - h.data_offset < 2 * n) {
        throw Error(ErrorCode::TruncatedPayload, "PGM: raster shorter than header declares");
    }
    DepthImage img(h.width, h.height);
    const std::uint8_t* p = bytes.data() + h.data_offset;
    for (std::size_t i = 0; i < n; ++i) {
        img.pixels[i] = static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
    }
    return img;
}

std::vector<std::uint8_t> encode_pgm(const DepthImage& image) {
    const std::string head = header_text("P5", image.width, image.height, 65535);
    std::vector<std::uint8_t> out(head.begin(), head.end());
    out.reserve(out.size() + 2 * image.pixels.size());
    for (std::uint16_t v : image.pixels) {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    return out;
}

RgbImage load_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }
void save_ppm(const RgbImage& image, const std::filesystem::path& path) {
    write_file(encode_ppm(image), path);
}
DepthImage load_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }
void save_pgm(const DepthImage& image, const std::filesystem::path& path) {
    write_file(encode_pgm(image), path);
}

GrayImage to_gray(const RgbImage& image) {
    GrayImage out(image.width, image.height);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const double lum = 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
                               0.114 * image.at(x, y, 2);
            out.at(x, y) = std::clamp(lum / 255.0, 0.0, 1.0);
        }
    }
    return out;
}

CropWindow center_quarter_window(int width, int height) {
    if (width < 4 || height < 4) {
        throw Error(ErrorCode::ImageTooSmall, "crop_center_quarter: image must be at least 4x4");
    }
    CropWindow w;
    w.width = width / 2;
    w.height = height / 2;
    w.x0 = (width - w.width) / 2;
    w.y0 = (height - w.height) / 2;
    return w;
}

void draw_disc(RgbImage& image, double cx, double cy, double radius, Rgb color) {
    const int x_lo = static_cast<int>(std::floor(cx - radius));
    const int x_hi = static_cast<int>(std::ceil(cx + radius));
    const int y_lo = static_cast<int>(std::floor(cy - radius));
    const int y_hi = static_cast<int>(std::ceil(cy + radius));
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            if (!image.contains(x, y)) continue;
            const double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy <= radius * radius) {
                image.at(x, y, 0) = color.r;
                image.at(x, y, 1) = color.g;
                image.at(x, y, 2) = color.b;
            }
        }
    }
}

void draw_line(RgbImage& image, double x0, double y0, double x1, double y1, Rgb color) {
    const double len = std::hypot(x1 - x0, y1 - y0);
    const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
        const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
        if (!image.contains(x, y)) continue;
        image.at(x, y, 0) = color.r;
        image.at(x, y, 1) = color.g;
        image.at(x, y, 2) = color.b;
    }
}

}  // namespace bagrasp
