#pragma once

#include "wabe/core/image.hpp"
#include "wabe/core/types.hpp"
#include "wabe/rasterizer/rasterizer.hpp"

#include <span>
#include <vector>

namespace wabe {

/// How the WABE layer weights w_k enter the backward pass.
///   Detached: w_k is a constant; occluded layers only see w_k-scaled gradients.
///   Full:     w_k is differentiated through T_k into the alphas in front.
enum class WeightGradient { Detached, Full };

/// Tile-local gradients are always reduced in fixed tile order.
enum class AccumulateOrder { Deterministic };

struct BackwardConfig {
  WeightGradient wabe_weight_gradient = WeightGradient::Detached;
  AccumulateOrder accumulate_order = AccumulateOrder::Deterministic;
  int threads = 0;
};

/// Gradient with respect to one screen-space splat. `inv_cov` is the full
/// (symmetric) gradient with respect to the inverse 2D covariance.
struct SplatGrad {
  Vec2 mean = Vec2::Zero();
  Mat2 inv_cov = Mat2::Zero();
  double peak_opacity = 0.0;
  Vec3 color = Vec3::Zero();
};

/// Backward through compositing only; result is indexed like output.splats.
std::vector<SplatGrad> backward_splats(const RenderOutput& output, const ImageBuffer& dL_dpixels,
                                       const BlendMode& mode, const BackwardConfig& config = {});

/// Backward through project(): screen-space splat gradients to world-space
/// Gaussian parameters (indexed like `gaussians`, via Splat2D::source_index).
GradBuffer backward_projection(std::span<const WorldGaussian> gaussians, const Camera& camera,
                               std::span<const Splat2D> splats,
                               std::span<const SplatGrad> splat_grads);

/// Full backward of render_gaussians(): gradients for every world Gaussian in
/// output.sources. Gaussians with no contribution record get exact zeros.
///
/// Throws ContractViolation when the output has no cache, no sources, or
/// was rendered under a different blend mode; throws wabe::Error naming the
/// first pixel (row-major) whose incoming gradient is not finite.
GradBuffer backward(const RenderOutput& output, const ImageBuffer& dL_dpixels,
                    const BlendMode& mode, const BackwardConfig& config = {});

}  // namespace wabe
