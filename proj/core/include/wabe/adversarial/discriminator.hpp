#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wabe {

/// Channel-major C x H x W activation tensor.
struct FeatureMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(int c, int h, int w, double fill = 0.0)
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, fill) {}

  double& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  double at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
};

struct ConvSpec {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  int stride = 1;
  int padding = 0;
  bool leaky_relu = false;

  std::size_t weight_count() const {
    return static_cast<std::size_t>(out_channels) * in_channels * kernel * kernel;
  }
  bool operator==(const ConvSpec&) const = default;
};

/// Convolutional patch discriminator over 6-channel (anchor, difference)
/// inputs: 6->16->32->64 with 4x4 stride-2 convolutions and leaky ReLU, then
/// a 3x3 convolution to a one-channel logit map.
///
/// Parameters live in one flat vector, layer by layer, weights
/// [out][in][ky][kx] followed by biases.
class Discriminator {
 public:
  static constexpr double kLeakySlope = 0.2;
  static constexpr double kInitStddev = 0.02;

  static std::vector<ConvSpec> architecture();

  /// Weights ~ N(0, 0.02^2) from a seeded generator, biases zero.
  explicit Discriminator(std::uint64_t seed);
  /// Throws wabe::Error if `parameters` does not fit `layers`.
  Discriminator(std::vector<ConvSpec> layers, std::vector<double> parameters);

  const std::vector<ConvSpec>& layers() const { return layers_; }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  /// Activations kept for backward.
  struct Trace {
    std::vector<FeatureMap> inputs;          // input of each layer
    std::vector<FeatureMap> pre_activation;  // conv output of each layer
  };

  FeatureMap forward(const FeatureMap& input, Trace* trace = nullptr) const;

  /// Backpropagates dL/dlogits. Parameter gradients are added into
  /// `param_grad` when it is non-empty; the input gradient is written to
  /// `input_grad` when non-null.
  void backward(const Trace& trace, const FeatureMap& dL_dlogits, std::span<double> param_grad,
                FeatureMap* input_grad) const;

  /// FNV-1a over the parameter bytes.
  std::uint64_t checksum() const;

 private:
  std::vector<ConvSpec> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;

  void compute_offsets();
};

}  // namespace wabe
