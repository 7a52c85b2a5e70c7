#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bagrasp/config.hpp"
#include "bagrasp/image.hpp"
#include "bagrasp/proposal.hpp"

namespace bagrasp {

inline constexpr int kNetInputHeight = 36;
inline constexpr int kNetInputWidth = 64;

/// Dense (channels, height, width) activation volume. A flat vector is
/// (n, 1, 1).
struct Tensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values;

    Tensor() = default;
    Tensor(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w), values(static_cast<std::size_t>(c) * h * w, fill) {}

    double& at(int c, int y, int x) { return values[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    double at(int c, int y, int x) const {
        return values[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    std::size_t size() const { return values.size(); }
};

/// One learnable array with its shape. Convolution kernels are
/// (out, in, k, k); linear weights are (out, in); biases are (out).
struct ParamTensor {
    std::vector<std::uint32_t> shape;
    std::vector<double> values;
};

/// Two parallel conv branches (RGB: 3 input channels, depth: 1), each
/// conv3x3/2 -> relu -> conv3x3/2 -> relu into 16 x 8 x 15. The branch
/// outputs are summed into one 1920-long embedding feeding a position head
/// (2 outputs) and a theta head (1 output).
struct ModelParams {
    enum Slot : std::size_t {
        RgbConv1W, RgbConv1B, RgbConv2W, RgbConv2B,
        DepthConv1W, DepthConv1B, DepthConv2W, DepthConv2B,
        PosW, PosB, ThetaW, ThetaB,
        kSlotCount
    };

    std::array<ParamTensor, kSlotCount> tensors;

    /// Correctly shaped, all zeros.
    static ModelParams zeros();
    /// He-normal weights, zero biases, from a seeded generator.
    static ModelParams initialize(std::uint64_t seed);

    ParamTensor& operator[](Slot s) { return tensors[s]; }
    const ParamTensor& operator[](Slot s) const { return tensors[s]; }
    std::size_t parameter_count() const;
    bool operator==(const ModelParams& o) const;
};

const char* slot_name(ModelParams::Slot slot);

/// Valid (unpadded) cross-correlation. weight is (out, in, k, k), bias (out).
/// Output is floor((in - k) / stride) + 1 per spatial axis. Throws
/// Error(ShapeMismatch) when the kernel does not fit.
Tensor conv2d_forward(const Tensor& input, const ParamTensor& weight, const ParamTensor& bias,
                      int stride);
Tensor relu_forward(const Tensor& x);
/// y = W x + b with W (out, in).
Eigen::VectorXd linear_forward(const ParamTensor& weight, const ParamTensor& bias,
                               const Eigen::VectorXd& x);

/// Network inputs built from rasters that are already kNetInputWidth x
/// kNetInputHeight: RGB scaled to [0, 1]; depth centered on its own mean and
/// divided by 50 mm.
Tensor rgb_tensor(const RgbImage& rgb);
Tensor depth_tensor(const DepthImage& depth);

/// Raw head outputs (x/64, y/36, theta/(pi/2)).
Eigen::Vector3d forward(const ModelParams& params, const Tensor& rgb, const Tensor& depth);

struct Prediction {
    Eigen::Vector2d pixel = Eigen::Vector2d::Zero();  // in the 64 x 36 frame
    double theta = 0.0;
};

/// Throws Error(ShapeMismatch) unless both inputs are 36 x 64.
Prediction model_forward(const ModelParams& params, const Tensor& rgb, const Tensor& depth);

/// Label in network units, the inverse of the Prediction scaling.
Eigen::Vector3d normalize_label(const Eigen::Vector2d& pixel, double theta);

struct L1Result {
    double loss = 0.0;
    Eigen::Vector3d grad = Eigen::Vector3d::Zero();
};

/// Mean absolute error over the three outputs; gradient sign(pred - label)/3
/// with sign(0) = 0.
L1Result l1_loss(const Eigen::Vector3d& pred, const Eigen::Vector3d& label);

struct LabeledScene {
    RgbImage rgb;
    DepthImage depth;
    Eigen::Vector2d label_pixel = Eigen::Vector2d::Zero();  // 64 x 36 frame
    double label_theta = 0.0;
};

struct Sample {
    Tensor rgb;
    Tensor depth;
    Eigen::Vector3d target;  // normalized
};

Sample make_sample(const LabeledScene& scene);

struct BatchGradient {
    double loss = 0.0;  // mean over the batch
    ModelParams grad;
};

/// Analytic gradient of the mean batch L1 loss. `output_mask` zeroes the
/// loss term of individual outputs (x, y, theta).
BatchGradient backward(const ModelParams& params, const std::vector<const Sample*>& batch,
                       const Eigen::Vector3d& output_mask = Eigen::Vector3d::Ones());

/// Mean L1 loss over the samples, no gradient.
double evaluate_loss(const ModelParams& params, const std::vector<Sample>& samples);

struct TrainOptions {
    int epochs = 50;
    double lr = 1e-3;
    int batch = 4;
    std::uint64_t seed = 0;
    /// Anneal the step size along half a cosine, from lr down to 0 at the
    /// last epoch. Off means constant lr.
    bool cosine_decay = false;
};

struct TrainResult {
    ModelParams params;
    /// Full-dataset loss before training (index 0) and after each epoch.
    std::vector<double> epoch_loss;
};

/// Plain minibatch SGD with a per-epoch shuffle drawn from `seed`.
/// Throws Error(EmptyDataset).
TrainResult train(const std::vector<LabeledScene>& dataset, const TrainOptions& options,
                  const std::function<void(int, double)>& on_epoch = {});

/// Binary params file: "BGNNPAR1", u32 tensor count, per tensor u32 rank and
/// u32 dims, then every value as a little-endian IEEE double.
std::vector<std::uint8_t> encode_params(const ModelParams& params);
ModelParams decode_params(const std::vector<std::uint8_t>& bytes);
void save_params(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path);

/// scene_####.ppm / scene_####.pgm plus labels.csv (id,px,py,theta).
void save_dataset(const std::vector<LabeledScene>& scenes, const std::filesystem::path& dir);
std::vector<LabeledScene> load_dataset(const std::filesystem::path& dir);

/// Crop to the central quarter and resize to 64 x 36, unless the input
/// already has that size.
struct Preprocessed {
    RgbImage rgb;
    DepthImage depth;
    CropWindow window;  // in the source image
};
Preprocessed preprocess(const RgbImage& rgb, const DepthImage& depth);

/// Map a 64 x 36 network pixel back into the source image.
Eigen::Vector2d network_to_source_pixel(const Eigen::Vector2d& p, const CropWindow& window);
Eigen::Vector2d source_to_network_pixel(const Eigen::Vector2d& p, const CropWindow& window);

struct LearnedResult {
    GraspProposal proposal;
    Eigen::Vector2d source_pixel = Eigen::Vector2d::Zero();
    Prediction prediction;
};

LearnedResult learned_pipeline(const ModelParams& params, const RgbImage& rgb,
                               const DepthImage& depth, const CameraCalibration& cal,
                               double timestamp = 0.0);

}  // namespace bagrasp
