#pragma once

#include "wabe/autodiff/backward.hpp"
#include "wabe/avatar/rig.hpp"
#include "wabe/core/image.hpp"
#include "wabe/rasterizer/rasterizer.hpp"

#include <span>
#include <string>

namespace wabe {

/// A scalar loss on an image with its pixel gradient.
class ImageFunctional {
 public:
  virtual ~ImageFunctional() = default;
  virtual double value(const ImageBuffer& image) const = 0;
  virtual ImageBuffer gradient(const ImageBuffer& image) const = 0;

  /// value(a) - value(b). Overridden where a direct formula avoids the
  /// cancellation of subtracting two large sums.
  virtual double difference(const ImageBuffer& a, const ImageBuffer& b) const {
    return value(a) - value(b);
  }
};

/// Mean over all H*W*3 entries of (x - target)^2.
class SquaredErrorLoss final : public ImageFunctional {
 public:
  explicit SquaredErrorLoss(ImageBuffer target) : target_(std::move(target)) {}

  double value(const ImageBuffer& image) const override;
  ImageBuffer gradient(const ImageBuffer& image) const override;
  double difference(const ImageBuffer& a, const ImageBuffer& b) const override;

 private:
  ImageBuffer target_;
};

struct GradcheckOptions {
  double step = 1e-5;
  double quaternion_step = 1e-5;
  double denominator_floor = 1e-8;
};

/// Worst relative error found for one parameter class.
struct ParameterError {
  double max_relative_error = 0.0;
  int gaussian = -1;
  int component = -1;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradcheckReport {
  ParameterError position;
  ParameterError rotation;
  ParameterError log_scale;
  ParameterError opacity_logit;
  ParameterError color;
  std::size_t parameters_checked = 0;

  double max_relative_error() const;
  /// "class max_rel_error" lines followed by a "max" line.
  std::string to_text() const;
};

/// Re-evaluates the compositing of `base` for perturbed Gaussians while
/// holding every discrete decision fixed: the per-pixel record lists and
/// their order, and which alphas were clamped. Under Detached the layer
/// weights are recomputed from the cached transmittances rather than the
/// perturbed ones.
ImageBuffer render_frozen_support(const RenderOutput& base,
                                  std::span<const WorldGaussian> gaussians,
                                  const BlendMode& mode, WeightGradient policy);

/// Compares the analytic gradient of loss(render(bind(gaussians))) against
/// central differences of the frozen-support forward, for every parameter
/// of every Gaussian. Relative error is |a - f| / max(|a|, |f|, floor).
GradcheckReport gradcheck(std::span<const Gaussian3D> gaussians,
                          std::span<const TriangleFrame> frames, const Camera& camera,
                          const BlendMode& mode, const BackwardConfig& config,
                          const ImageFunctional& loss, const GradcheckOptions& options = {});

}  // namespace wabe
