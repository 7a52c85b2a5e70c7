#include "bagrasp/learned_vision.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "bagrasp/classical_vision.hpp"
#include "bagrasp/error.hpp"

namespace bagrasp {

namespace {

constexpr int kConv1Channels = 8;
constexpr int kConv2Channels = 16;
constexpr int kKernel = 3;
constexpr int kStride = 2;
constexpr int kEmbedHeight = 8;
constexpr int kEmbedWidth = 15;
constexpr int kEmbedding = kConv2Channels * kEmbedHeight * kEmbedWidth;
constexpr double kDepthScaleMm = 50.0;
constexpr char kMagic[8] = {'B', 'G', 'N', 'N', 'P', 'A', 'R', '1'};

using Slot = ModelParams::Slot;

std::vector<std::uint32_t> expected_shape(Slot s) {
    switch (s) {
        case Slot::RgbConv1W: return {kConv1Channels, 3, kKernel, kKernel};
        case Slot::DepthConv1W: return {kConv1Channels, 1, kKernel, kKernel};
        case Slot::RgbConv1B:
        case Slot::DepthConv1B: return {kConv1Channels};
        case Slot::RgbConv2W:
        case Slot::DepthConv2W: return {kConv2Channels, kConv1Channels, kKernel, kKernel};
        case Slot::RgbConv2B:
        case Slot::DepthConv2B: return {kConv2Channels};
        case Slot::PosW: return {2, kEmbedding};
        case Slot::PosB: return {2};
        case Slot::ThetaW: return {1, kEmbedding};
        case Slot::ThetaB: return {1};
        case Slot::kSlotCount: break;
    }
    return {};
}

std::size_t element_count(const std::vector<std::uint32_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           [](std::size_t a, std::uint32_t b) { return a * b; });
}

struct BranchCache {
    Tensor z1, a1, z2, a2;
};

BranchCache branch_forward(const ModelParams& p, const Tensor& x, Slot w1, Slot b1, Slot w2, Slot b2) {
    BranchCache c;
    c.z1 = conv2d_forward(x, p[w1], p[b1], kStride);
    c.a1 = relu_forward(c.z1);
    c.z2 = conv2d_forward(c.a1, p[w2], p[b2], kStride);
    c.a2 = relu_forward(c.z2);
    return c;
}

void check_input(const Tensor& t, int channels, const char* what) {
    if (t.channels != channels || t.height != kNetInputHeight || t.width != kNetInputWidth) {
        throw Error(ErrorCode::ShapeMismatch,
                    std::string("model input '") + what + "' must be " + std::to_string(channels) +
                        "x36x64");
    }
}

Eigen::VectorXd embedding(const BranchCache& rgb, const BranchCache& depth) {
    Eigen::VectorXd e(kEmbedding);
    for (int i = 0; i < kEmbedding; ++i) e[i] = rgb.a2.values[i] + depth.a2.values[i];
    return e;
}

// Accumulates dL/dW, dL/db into gw, gb; writes dL/dinput into grad_in when given.
void conv2d_backward(const Tensor& input, const ParamTensor& weight, const Tensor& grad_out,
                     int stride, ParamTensor& gw, ParamTensor& gb, Tensor* grad_in) {
    const int out_c = static_cast<int>(weight.shape[0]);
    const int in_c = static_cast<int>(weight.shape[1]);
    const int k = static_cast<int>(weight.shape[2]);
    if (grad_in) *grad_in = Tensor(input.channels, input.height, input.width);
    for (int o = 0; o < out_c; ++o) {
        for (int y = 0; y < grad_out.height; ++y) {
            for (int x = 0; x < grad_out.width; ++x) {
                const double g = grad_out.at(o, y, x);
                if (g == 0.0) continue;
                gb.values[o] += g;
                for (int i = 0; i < in_c; ++i)
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx) {
                            const std::size_t widx = ((static_cast<std::size_t>(o) * in_c + i) * k + ky) * k + kx;
                            const int iy = y * stride + ky, ix = x * stride + kx;
                            gw.values[widx] += g * input.at(i, iy, ix);
                            if (grad_in) grad_in->at(i, iy, ix) += g * weight.values[widx];
                        }
            }
        }
    }
}

Tensor relu_mask(const Tensor& grad, const Tensor& pre) {
    Tensor out = grad;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!(pre.values[i] > 0.0)) out.values[i] = 0.0;
    return out;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        return std::bit_cast<double>(v);
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) {
        if (bytes_.size() - pos_ < n) {
            throw Error(ErrorCode::TruncatedPayload, "params file: unexpected end of data");
        }
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

const char* slot_name(ModelParams::Slot slot) {
    static constexpr const char* names[] = {
        "rgb_conv1_w", "rgb_conv1_b", "rgb_conv2_w", "rgb_conv2_b",
        "depth_conv1_w", "depth_conv1_b", "depth_conv2_w", "depth_conv2_b",
        "pos_w", "pos_b", "theta_w", "theta_b"};
    return slot < ModelParams::kSlotCount ? names[slot] : "?";
}

ModelParams ModelParams::zeros() {
    ModelParams p;
    for (std::size_t s = 0; s < kSlotCount; ++s) {
        p.tensors[s].shape = expected_shape(static_cast<Slot>(s));
        p.tensors[s].values.assign(element_count(p.tensors[s].shape), 0.0);
    }
    return p;
}

ModelParams ModelParams::initialize(std::uint64_t seed) {
    ModelParams p = zeros();
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < kSlotCount; ++s) {
        auto& t = p.tensors[s];
        if (t.shape.size() == 1) continue;  // biases stay zero
        const std::size_t fan_in = t.values.size() / t.shape[0];
        const bool head = s == Slot::PosW || s == Slot::ThetaW;
        // He init for relu layers; heads are linear so use 1/fan_in variance.
        const double stddev = std::sqrt((head ? 1.0 : 2.0) / static_cast<double>(fan_in));
        std::normal_distribution<double> dist(0.0, stddev);
        for (double& v : t.values) v = dist(rng);
    }
    return p;
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.values.size();
    return n;
}

bool ModelParams::operator==(const ModelParams& o) const {
    for (std::size_t s = 0; s < kSlotCount; ++s)
        if (tensors[s].shape != o.tensors[s].shape || tensors[s].values != o.tensors[s].values) return false;
    return true;
}

Tensor conv2d_forward(const Tensor& input, const ParamTensor& weight, const ParamTensor& bias,
                      int stride) {
    if (weight.shape.size() != 4 || weight.shape[2] != weight.shape[3]) {
        throw Error(ErrorCode::ShapeMismatch, "conv2d: weight must be (out, in, k, k)");
    }
    const int out_c = static_cast<int>(weight.shape[0]);
    const int in_c = static_cast<int>(weight.shape[1]);
    const int k = static_cast<int>(weight.shape[2]);
    if (stride < 1) throw Error(ErrorCode::InvalidArgument, "conv2d: stride must be >= 1");
    if (in_c != input.channels || k > input.height || k > input.width) {
        throw Error(ErrorCode::ShapeMismatch, "conv2d: kernel does not fit input");
    }
    if (bias.values.size() != static_cast<std::size_t>(out_c)) {
        throw Error(ErrorCode::ShapeMismatch, "conv2d: bias length must equal output channels");
    }
    const int oh = (input.height - k) / stride + 1;
    const int ow = (input.width - k) / stride + 1;
    Tensor out(out_c, oh, ow);
    for (int o = 0; o < out_c; ++o) {
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                double acc = bias.values[o];
                for (int i = 0; i < in_c; ++i) {
                    const double* w = &weight.values[(static_cast<std::size_t>(o) * in_c + i) * k * k];
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx)
                            acc += w[ky * k + kx] * input.at(i, y * stride + ky, x * stride + kx);
                }
                out.at(o, y, x) = acc;
            }
        }
    }
    return out;
}

Tensor relu_forward(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.values) v = v > 0.0 ? v : 0.0;
    return out;
}

Eigen::VectorXd linear_forward(const ParamTensor& weight, const ParamTensor& bias,
                               const Eigen::VectorXd& x) {
    if (weight.shape.size() != 2 || weight.shape[1] != x.size() || bias.values.size() != weight.shape[0]) {
        throw Error(ErrorCode::ShapeMismatch, "linear: shapes do not agree");
    }
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(
        weight.values.data(), weight.shape[0], weight.shape[1]);
    const Eigen::Map<const Eigen::VectorXd> b(bias.values.data(), bias.values.size());
    return w * x + b;
}

Tensor rgb_tensor(const RgbImage& rgb) {
    Tensor t(3, rgb.height, rgb.width);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < rgb.height; ++y)
            for (int x = 0; x < rgb.width; ++x) t.at(c, y, x) = rgb.at(x, y, c) / 255.0;
    return t;
}

Tensor depth_tensor(const DepthImage& depth) {
    Tensor t(1, depth.height, depth.width);
    double mean = 0.0;
    for (auto v : depth.pixels) mean += v;
    mean /= static_cast<double>(depth.pixels.size());
    for (int y = 0; y < depth.height; ++y)
        for (int x = 0; x < depth.width; ++x) t.at(0, y, x) = (depth.at(x, y) - mean) / kDepthScaleMm;
    return t;
}

Eigen::Vector3d forward(const ModelParams& p, const Tensor& rgb, const Tensor& depth) {
    check_input(rgb, 3, "rgb");
    check_input(depth, 1, "depth");
    const auto br = branch_forward(p, rgb, Slot::RgbConv1W, Slot::RgbConv1B, Slot::RgbConv2W, Slot::RgbConv2B);
    const auto bd = branch_forward(p, depth, Slot::DepthConv1W, Slot::DepthConv1B, Slot::DepthConv2W,
                                   Slot::DepthConv2B);
    const Eigen::VectorXd e = embedding(br, bd);
    const Eigen::VectorXd pos = linear_forward(p[Slot::PosW], p[Slot::PosB], e);
    const Eigen::VectorXd th = linear_forward(p[Slot::ThetaW], p[Slot::ThetaB], e);
    return {pos[0], pos[1], th[0]};
}

Prediction model_forward(const ModelParams& params, const Tensor& rgb, const Tensor& depth) {
    const Eigen::Vector3d raw = forward(params, rgb, depth);
    Prediction pred;
    pred.pixel = {raw[0] * kNetInputWidth, raw[1] * kNetInputHeight};
    pred.theta = raw[2] * std::numbers::pi / 2.0;
    return pred;
}

Eigen::Vector3d normalize_label(const Eigen::Vector2d& pixel, double theta) {
    return {pixel.x() / kNetInputWidth, pixel.y() / kNetInputHeight, theta / (std::numbers::pi / 2.0)};
}

L1Result l1_loss(const Eigen::Vector3d& pred, const Eigen::Vector3d& label) {
    L1Result r;
    for (int k = 0; k < 3; ++k) {
        const double d = pred[k] - label[k];
        r.loss += std::abs(d) / 3.0;
        r.grad[k] = d > 0.0 ? 1.0 / 3.0 : (d < 0.0 ? -1.0 / 3.0 : 0.0);
    }
    return r;
}

Sample make_sample(const LabeledScene& scene) {
    return {rgb_tensor(scene.rgb), depth_tensor(scene.depth),
            normalize_label(scene.label_pixel, scene.label_theta)};
}

BatchGradient backward(const ModelParams& p, const std::vector<const Sample*>& batch,
                       const Eigen::Vector3d& output_mask) {
    BatchGradient out{0.0, ModelParams::zeros()};
    if (batch.empty()) return out;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    ModelParams& g = out.grad;
    const auto& wpos = p[Slot::PosW].values;
    const auto& wth = p[Slot::ThetaW].values;

    for (const Sample* s : batch) {
        check_input(s->rgb, 3, "rgb");
        check_input(s->depth, 1, "depth");
        const auto br = branch_forward(p, s->rgb, Slot::RgbConv1W, Slot::RgbConv1B, Slot::RgbConv2W,
                                       Slot::RgbConv2B);
        const auto bd = branch_forward(p, s->depth, Slot::DepthConv1W, Slot::DepthConv1B,
                                       Slot::DepthConv2W, Slot::DepthConv2B);
        const Eigen::VectorXd e = embedding(br, bd);
        const Eigen::VectorXd pos = linear_forward(p[Slot::PosW], p[Slot::PosB], e);
        const Eigen::VectorXd th = linear_forward(p[Slot::ThetaW], p[Slot::ThetaB], e);
        const Eigen::Vector3d pred(pos[0], pos[1], th[0]);

        L1Result l = l1_loss(pred.cwiseProduct(output_mask), s->target.cwiseProduct(output_mask));
        out.loss += l.loss * inv_b;
        const Eigen::Vector3d gout = l.grad.cwiseProduct(output_mask) * inv_b;

        // Heads.
        Tensor g_emb(kConv2Channels, kEmbedHeight, kEmbedWidth);
        for (int r = 0; r < 2; ++r) {
            g[Slot::PosB].values[r] += gout[r];
            for (int i = 0; i < kEmbedding; ++i) {
                g[Slot::PosW].values[static_cast<std::size_t>(r) * kEmbedding + i] += gout[r] * e[i];
                g_emb.values[i] += gout[r] * wpos[static_cast<std::size_t>(r) * kEmbedding + i];
            }
        }
        g[Slot::ThetaB].values[0] += gout[2];
        for (int i = 0; i < kEmbedding; ++i) {
            g[Slot::ThetaW].values[i] += gout[2] * e[i];
            g_emb.values[i] += gout[2] * wth[i];
        }

        // The embedding is a plain sum, so both branches receive g_emb.
        auto branch_back = [&](const Tensor& x, const BranchCache& c, Slot w1, Slot b1, Slot w2, Slot b2) {
            const Tensor g_z2 = relu_mask(g_emb, c.z2);
            Tensor g_a1;
            conv2d_backward(c.a1, p[w2], g_z2, kStride, g[w2], g[b2], &g_a1);
            const Tensor g_z1 = relu_mask(g_a1, c.z1);
            conv2d_backward(x, p[w1], g_z1, kStride, g[w1], g[b1], nullptr);
        };
        branch_back(s->rgb, br, Slot::RgbConv1W, Slot::RgbConv1B, Slot::RgbConv2W, Slot::RgbConv2B);
        branch_back(s->depth, bd, Slot::DepthConv1W, Slot::DepthConv1B, Slot::DepthConv2W, Slot::DepthConv2B);
    }
    return out;
}

double evaluate_loss(const ModelParams& params, const std::vector<Sample>& samples) {
    if (samples.empty()) return 0.0;
    double total = 0.0;
    for (const auto& s : samples) total += l1_loss(forward(params, s.rgb, s.depth), s.target).loss;
    return total / static_cast<double>(samples.size());
}

TrainResult train(const std::vector<LabeledScene>& dataset, const TrainOptions& options,
                  const std::function<void(int, double)>& on_epoch) {
    if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "train: empty dataset");
    if (options.epochs < 0 || options.batch < 1 || !(options.lr > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "train: need epochs >= 0, batch >= 1, lr > 0");
    }
    std::vector<Sample> samples;
    samples.reserve(dataset.size());
    for (const auto& scene : dataset) samples.push_back(make_sample(scene));

    TrainResult result{ModelParams::initialize(options.seed), {}};
    result.epoch_loss.push_back(evaluate_loss(result.params, samples));
    if (on_epoch) on_epoch(0, result.epoch_loss.back());

    // Separate stream from initialization so the shuffle order does not
    // depend on the parameter count.
    std::mt19937_64 shuffle_rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        const double lr = options.cosine_decay
                              ? 0.5 * options.lr *
                                    (1.0 + std::cos(std::numbers::pi * (epoch - 1) / options.epochs))
                              : options.lr;
        for (std::size_t start = 0; start < order.size(); start += options.batch) {
            std::vector<const Sample*> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + options.batch); ++i) {
                batch.push_back(&samples[order[i]]);
            }
            const BatchGradient bg = backward(result.params, batch);
            for (std::size_t s = 0; s < ModelParams::kSlotCount; ++s) {
                auto& v = result.params.tensors[s].values;
                const auto& gv = bg.grad.tensors[s].values;
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * gv[i];
            }
        }
        result.epoch_loss.push_back(evaluate_loss(result.params, samples));
        if (on_epoch) on_epoch(epoch, result.epoch_loss.back());
    }
    return result;
}

std::vector<std::uint8_t> encode_params(const ModelParams& params) {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_u32(out, static_cast<std::uint32_t>(ModelParams::kSlotCount));
    for (const auto& t : params.tensors) {
        put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        for (auto d : t.shape) put_u32(out, d);
    }
    for (const auto& t : params.tensors)
        for (double v : t.values) put_f64(out, v);
    return out;
}

ModelParams decode_params(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw Error(ErrorCode::BadMagic, "params file: bad magic");
    }
    const std::vector<std::uint8_t> body(bytes.begin() + sizeof(kMagic), bytes.end());
    Reader rd(body);
    const std::uint32_t count = rd.u32();
    if (count != ModelParams::kSlotCount) {
        throw Error(ErrorCode::ShapeMismatch, "params file: tensor count does not match the architecture");
    }
    ModelParams p = ModelParams::zeros();
    for (std::size_t s = 0; s < ModelParams::kSlotCount; ++s) {
        const std::uint32_t rank = rd.u32();
        if (rank > 8) throw Error(ErrorCode::ShapeMismatch, "params file: implausible tensor rank");
        std::vector<std::uint32_t> shape(rank);
        for (auto& d : shape) d = rd.u32();
        if (shape != p.tensors[s].shape) {
            throw Error(ErrorCode::ShapeMismatch, std::string("params file: shape of ") +
                                                      slot_name(static_cast<Slot>(s)) +
                                                      " does not match the architecture");
        }
    }
    for (auto& t : p.tensors)
        for (double& v : t.values) v = rd.f64();
    if (!rd.done()) throw Error(ErrorCode::BadHeader, "params file: trailing bytes");
    return p;
}

void save_params(const ModelParams& params, const std::filesystem::path& path) {
    const auto bytes = encode_params(params);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileOpen, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ModelParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileOpen, "cannot open " + path.string());
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return decode_params(bytes);
}

namespace {
std::string scene_stem(std::size_t id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%04zu", id);
    return buf;
}
}  // namespace

void save_dataset(const std::vector<LabeledScene>& scenes, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream labels(dir / "labels.csv", std::ios::trunc);
    if (!labels) throw Error(ErrorCode::FileOpen, "cannot write " + (dir / "labels.csv").string());
    labels << "id,px,py,theta\n";
    labels.precision(17);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        save_ppm(scenes[i].rgb, dir / (scene_stem(i) + ".ppm"));
        save_pgm(scenes[i].depth, dir / (scene_stem(i) + ".pgm"));
        labels << i << ',' << scenes[i].label_pixel.x() << ',' << scenes[i].label_pixel.y() << ','
               << scenes[i].label_theta << '\n';
    }
}

std::vector<LabeledScene> load_dataset(const std::filesystem::path& dir) {
    std::ifstream labels(dir / "labels.csv");
    if (!labels) throw Error(ErrorCode::FileOpen, "cannot open " + (dir / "labels.csv").string());
    std::string line;
    std::getline(labels, line);
    if (line.rfind("id,px,py,theta", 0) != 0) {
        throw Error(ErrorCode::BadHeader, "labels.csv: expected header id,px,py,theta");
    }
    std::vector<LabeledScene> out;
    while (std::getline(labels, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::size_t id;
        double px, py, th;
        char c1, c2, c3;
        if (!(ls >> id >> c1 >> px >> c2 >> py >> c3 >> th) || c1 != ',' || c2 != ',' || c3 != ',') {
            throw Error(ErrorCode::ParseError, "labels.csv: malformed row '" + line + "'");
        }
        LabeledScene s;
        s.rgb = load_ppm(dir / (scene_stem(id) + ".ppm"));
        s.depth = load_pgm(dir / (scene_stem(id) + ".pgm"));
        if (s.rgb.width != kNetInputWidth || s.rgb.height != kNetInputHeight ||
            s.depth.width != kNetInputWidth || s.depth.height != kNetInputHeight) {
            throw Error(ErrorCode::ShapeMismatch, "dataset: scene rasters must be 64x36");
        }
        s.label_pixel = {px, py};
        s.label_theta = th;
        out.push_back(std::move(s));
    }
    return out;
}

Preprocessed preprocess(const RgbImage& rgb, const DepthImage& depth) {
    if (rgb.width != depth.width || rgb.height != depth.height) {
        throw Error(ErrorCode::ShapeMismatch, "preprocess: RGB and depth sizes differ");
    }
    if (rgb.width == kNetInputWidth && rgb.height == kNetInputHeight) {
        return {rgb, depth, CropWindow{0, 0, rgb.width, rgb.height}};
    }
    const CropWindow win = center_quarter_window(rgb.width, rgb.height);
    return {resize_bilinear(crop(rgb, win), kNetInputWidth, kNetInputHeight),
            resize_bilinear(crop(depth, win), kNetInputWidth, kNetInputHeight), win};
}

Eigen::Vector2d network_to_source_pixel(const Eigen::Vector2d& p, const CropWindow& window) {
    const double sx = static_cast<double>(window.width) / kNetInputWidth;
    const double sy = static_cast<double>(window.height) / kNetInputHeight;
    return {window.x0 + (p.x() + 0.5) * sx - 0.5, window.y0 + (p.y() + 0.5) * sy - 0.5};
}

Eigen::Vector2d source_to_network_pixel(const Eigen::Vector2d& p, const CropWindow& window) {
    const double sx = static_cast<double>(window.width) / kNetInputWidth;
    const double sy = static_cast<double>(window.height) / kNetInputHeight;
    return {(p.x() - window.x0 + 0.5) / sx - 0.5, (p.y() - window.y0 + 0.5) / sy - 0.5};
}

LearnedResult learned_pipeline(const ModelParams& params, const RgbImage& rgb, const DepthImage& depth,
                               const CameraCalibration& cal, double timestamp) {
    const Preprocessed pre = preprocess(rgb, depth);
    LearnedResult r;
    r.prediction = model_forward(params, rgb_tensor(pre.rgb), depth_tensor(pre.depth));
    r.source_pixel = network_to_source_pixel(r.prediction.pixel, pre.window);
    const double theta = std::clamp(r.prediction.theta, -std::numbers::pi / 2, std::numbers::pi / 2);
    r.proposal = pixel_to_workspace(r.source_pixel, theta <= -std::numbers::pi / 2 ? std::numbers::pi / 2 : theta,
                                    cal, timestamp);
    return r;
}

}  // namespace bagrasp
