#pragma once

#include "wabe/core/image.hpp"
#include "wabe/core/types.hpp"

#include <span>

namespace wabe {

/// Default loss weights: reconstruction, discriminator, generator, binding.
struct LossWeights {
  double lambda1 = 10.0;
  double lambda2 = 0.01;
  double lambda3 = 0.01;
  double lambda4 = 10.0;

  /// Throws wabe::Error when any weight is negative or non-finite.
  void validate() const;
};

struct ImageLoss {
  double value = 0.0;
  ImageBuffer gradient;  // d value / d first argument
};

/// Mean absolute difference over all H*W*3 entries. Subgradient 0 at ties.
ImageLoss l1_loss(const ImageBuffer& a, const ImageBuffer& b);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

/// Mean SSIM over channels and all window positions fully inside the image
/// (11x11 Gaussian window, sigma 1.5, C1 = 0.01^2, C2 = 0.03^2).
double ssim(const ImageBuffer& a, const ImageBuffer& b);

/// 1 - ssim(a, b) with its analytic gradient with respect to `a`.
/// Throws wabe::Error on shape mismatch or images smaller than the window.
ImageLoss dssim_loss(const ImageBuffer& a, const ImageBuffer& b);

/// Hinge thresholds of the binding regularizer, in triangle-frame units.
inline constexpr double kPositionThreshold = 1.0;
inline constexpr double kScaleThreshold = 0.6;

struct BindingLoss {
  double position = 0.0;  // mean over Gaussians of sum_k max(0, |p_k| - eps_pos)^2
  double scale = 0.0;     // mean over Gaussians of sum_k max(0, exp(s_k) - eps_scale)^2
  double value = 0.0;     // position + scale
  GradBuffer gradient;    // position and log_scale entries only
};

BindingLoss const_loss(std::span<const Gaussian3D> gaussians);

struct TotalLoss {
  double value = 0.0;               // lambda-weighted sum of all four terms
  double gaussian_side = 0.0;       // lambda1, lambda3, lambda4 terms
  double discriminator_side = 0.0;  // lambda2 term
};

TotalLoss total_loss(double recon, double d_loss, double g_loss, double binding,
                     const LossWeights& weights);

}  // namespace wabe
