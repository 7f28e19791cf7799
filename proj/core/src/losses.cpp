#include "wabe/losses/losses.hpp"

#include "wabe/core/error.hpp"

#include <cmath>

namespace wabe {

void LossWeights::validate() const {
  for (double w : {lambda1, lambda2, lambda3, lambda4}) {
    if (!std::isfinite(w) || w < 0.0) throw Error("loss weights must be finite and >= 0");
  }
}

ImageLoss l1_loss(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b, "l1_loss");
  ImageLoss out{0.0, ImageBuffer(a.width(), a.height())};
  const auto da = a.data();
  const auto db = b.data();
  auto g = out.gradient.data();
  const double n = static_cast<double>(da.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double diff = da[i] - db[i];
    sum += std::abs(diff);
    g[i] = diff > 0.0 ? 1.0 / n : (diff < 0.0 ? -1.0 / n : 0.0);
  }
  out.value = n > 0.0 ? sum / n : 0.0;
  return out;
}

BindingLoss const_loss(std::span<const Gaussian3D> gaussians) {
  BindingLoss out;
  out.gradient = GradBuffer(gaussians.size());
  if (gaussians.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(gaussians.size());

  for (std::size_t i = 0; i < gaussians.size(); ++i) {
    const auto& g = gaussians[i];
    auto& grad = out.gradient.entries[i];
    for (int k = 0; k < 3; ++k) {
      const double p = g.position_local[k];
      const double excess = std::abs(p) - kPositionThreshold;
      if (excess > 0.0) {
        out.position += excess * excess * inv_n;
        grad.position[k] = 2.0 * excess * (p > 0.0 ? 1.0 : -1.0) * inv_n;
      }
      const double s = std::exp(g.log_scale[k]);
      const double over = s - kScaleThreshold;
      if (over > 0.0) {
        out.scale += over * over * inv_n;
        grad.log_scale[k] = 2.0 * over * s * inv_n;
      }
    }
  }
  out.value = out.position + out.scale;
  return out;
}

TotalLoss total_loss(double recon, double d_loss, double g_loss, double binding,
                     const LossWeights& w) {
  TotalLoss out;
  out.gaussian_side = w.lambda1 * recon + w.lambda3 * g_loss + w.lambda4 * binding;
  out.discriminator_side = w.lambda2 * d_loss;
  out.value = out.gaussian_side + out.discriminator_side;
  return out;
}

}  // namespace wabe
