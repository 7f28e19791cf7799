#include "wabe/adversarial/discriminator.hpp"

#include "wabe/core/error.hpp"
#include "wabe/core/types.hpp"

#include <random>
#include <string>

namespace wabe {

std::vector<ConvSpec> Discriminator::architecture() {
  return {
      {6, 16, 4, 2, 1, true},
      {16, 32, 4, 2, 1, true},
      {32, 64, 4, 2, 1, true},
      {64, 1, 3, 1, 1, false},
  };
}

Discriminator::Discriminator(std::uint64_t seed) : layers_(architecture()) {
  compute_offsets();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, kInitStddev);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const std::size_t n = layers_[l].weight_count();
    for (std::size_t i = 0; i < n; ++i) params_[offsets_[l] + i] = normal(rng);
  }
}

Discriminator::Discriminator(std::vector<ConvSpec> layers, std::vector<double> parameters)
    : layers_(std::move(layers)) {
  compute_offsets();
  if (parameters.size() != params_.size()) {
    throw Error("discriminator expects " + std::to_string(params_.size()) + " parameters, got " +
                std::to_string(parameters.size()));
  }
  params_ = std::move(parameters);
}

void Discriminator::compute_offsets() {
  offsets_.clear();
  std::size_t total = 0;
  for (const auto& l : layers_) {
    if (l.kernel <= 0 || l.stride <= 0 || l.in_channels <= 0 || l.out_channels <= 0 ||
        l.padding < 0) {
      throw Error("invalid discriminator layer shape");
    }
    offsets_.push_back(total);
    total += l.weight_count() + static_cast<std::size_t>(l.out_channels);
  }
  params_.assign(total, 0.0);
}

namespace {

int output_size(int in, const ConvSpec& l) { return (in + 2 * l.padding - l.kernel) / l.stride + 1; }

}  // namespace

FeatureMap Discriminator::forward(const FeatureMap& input, Trace* trace) const {
  if (input.channels != layers_.front().in_channels) {
    throw Error("discriminator expects " + std::to_string(layers_.front().in_channels) +
                " input channels, got " + std::to_string(input.channels));
  }
  if (trace) {
    trace->inputs.clear();
    trace->pre_activation.clear();
  }
  FeatureMap current = input;
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const ConvSpec& l = layers_[li];
    const int oh = output_size(current.height, l);
    const int ow = output_size(current.width, l);
    if (oh <= 0 || ow <= 0) throw Error("discriminator input is too small");
    const double* w = params_.data() + offsets_[li];
    const double* b = w + l.weight_count();

    FeatureMap out(l.out_channels, oh, ow);
    for (int o = 0; o < l.out_channels; ++o) {
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          double s = b[o];
          for (int i = 0; i < l.in_channels; ++i) {
            const double* wk = w + (static_cast<std::size_t>(o) * l.in_channels + i) * l.kernel *
                                       l.kernel;
            for (int ky = 0; ky < l.kernel; ++ky) {
              const int iy = oy * l.stride + ky - l.padding;
              if (iy < 0 || iy >= current.height) continue;
              for (int kx = 0; kx < l.kernel; ++kx) {
                const int ix = ox * l.stride + kx - l.padding;
                if (ix < 0 || ix >= current.width) continue;
                s += wk[ky * l.kernel + kx] * current.at(i, iy, ix);
              }
            }
          }
          out.at(o, oy, ox) = s;
        }
      }
    }
    if (trace) {
      trace->inputs.push_back(std::move(current));
      trace->pre_activation.push_back(out);
    }
    if (l.leaky_relu) {
      for (double& v : out.data) v = v > 0.0 ? v : kLeakySlope * v;
    }
    current = std::move(out);
  }
  return current;
}

void Discriminator::backward(const Trace& trace, const FeatureMap& dL_dlogits,
                             std::span<double> param_grad, FeatureMap* input_grad) const {
  if (trace.inputs.size() != layers_.size()) {
    throw ContractViolation("discriminator backward needs a forward trace");
  }
  if (!param_grad.empty() && param_grad.size() != params_.size()) {
    throw ContractViolation("parameter gradient buffer has the wrong size");
  }
  FeatureMap upstream = dL_dlogits;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const ConvSpec& l = layers_[li];
    const FeatureMap& in = trace.inputs[li];
    const FeatureMap& pre = trace.pre_activation[li];
    if (l.leaky_relu) {
      for (std::size_t i = 0; i < upstream.data.size(); ++i) {
        if (pre.data[i] <= 0.0) upstream.data[i] *= kLeakySlope;
      }
    }
    const double* w = params_.data() + offsets_[li];
    double* gw = param_grad.empty() ? nullptr : param_grad.data() + offsets_[li];
    double* gb = gw ? gw + l.weight_count() : nullptr;
    const bool need_input = li > 0 || input_grad != nullptr;
    FeatureMap down;
    if (need_input) down = FeatureMap(in.channels, in.height, in.width);

    for (int o = 0; o < l.out_channels; ++o) {
      for (int oy = 0; oy < upstream.height; ++oy) {
        for (int ox = 0; ox < upstream.width; ++ox) {
          const double g = upstream.at(o, oy, ox);
          if (g == 0.0) continue;
          if (gb) gb[o] += g;
          for (int i = 0; i < l.in_channels; ++i) {
            const std::size_t base =
                (static_cast<std::size_t>(o) * l.in_channels + i) * l.kernel * l.kernel;
            for (int ky = 0; ky < l.kernel; ++ky) {
              const int iy = oy * l.stride + ky - l.padding;
              if (iy < 0 || iy >= in.height) continue;
              for (int kx = 0; kx < l.kernel; ++kx) {
                const int ix = ox * l.stride + kx - l.padding;
                if (ix < 0 || ix >= in.width) continue;
                const std::size_t k = base + ky * l.kernel + kx;
                if (gw) gw[k] += g * in.at(i, iy, ix);
                if (need_input) down.at(i, iy, ix) += g * w[k];
              }
            }
          }
        }
      }
    }
    if (!need_input) break;
    upstream = std::move(down);
  }
  if (input_grad) *input_grad = std::move(upstream);
}

std::uint64_t Discriminator::checksum() const { return fnv1a64(params_); }

}  // namespace wabe
