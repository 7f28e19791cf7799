#pragma once

#include "wabe/avatar/scene.hpp"
#include "wabe/core/image.hpp"

#include <string>
#include <vector>

namespace wabe {

inline constexpr double kPsnrCap = 99.0;

/// 10 log10(1 / MSE) for images in [0, 1], capped at 99 dB.
double psnr(const ImageBuffer& a, const ImageBuffer& b);
double psnr_from_mse(double mse);
double mean_squared_error(const ImageBuffer& a, const ImageBuffer& b);
double mean_absolute_difference(const ImageBuffer& a, const ImageBuffer& b);

/// targets[view][frame], matching the scene's cameras and timeline.
using TargetGrid = std::vector<std::vector<ImageBuffer>>;

struct ViewMetrics {
  double psnr = 0.0;
  double ssim = 0.0;
  double flicker_excess = 0.0;
};

struct EvalReport {
  std::vector<ViewMetrics> views;
  ViewMetrics aggregate;

  std::string to_text() const;
};

/// Renders every (camera, frame) in Standard mode and compares against the
/// targets. PSNR aggregates MSE before taking the log; SSIM and flicker excess
/// are averaged. Flicker excess is the mean L1 between consecutive rendered
/// frames minus the same statistic on the targets.
EvalReport evaluate(const Scene& scene, const TargetGrid& targets, int threads = 0);

/// Standard-mode renders of every (camera, frame).
TargetGrid render_grid(const Scene& scene, int threads = 0);

}  // namespace wabe
