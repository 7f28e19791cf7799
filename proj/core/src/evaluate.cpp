#include "wabe/trainer/evaluate.hpp"

#include "wabe/core/error.hpp"
#include "wabe/losses/losses.hpp"
#include "wabe/trainer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace wabe {

double mean_squared_error(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b, "mse inputs");
  auto x = a.data();
  auto y = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double mean_absolute_difference(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b, "L1 inputs");
  auto x = a.data();
  auto y = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  return psnr_from_mse(mean_squared_error(a, b));
}

TargetGrid render_grid(const Scene& scene, int threads) {
  TargetGrid grid(scene.cameras.size());
  for (std::size_t v = 0; v < scene.cameras.size(); ++v) {
    for (std::size_t f = 0; f < scene.frame_count(); ++f) {
      grid[v].push_back(render_frame(scene, v, f, BlendMode::standard(), threads));
    }
  }
  return grid;
}

namespace {

double mean_consecutive_l1(const std::vector<ImageBuffer>& frames) {
  if (frames.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t f = 1; f < frames.size(); ++f) {
    s += mean_absolute_difference(frames[f], frames[f - 1]);
  }
  return s / static_cast<double>(frames.size() - 1);
}

}  // namespace

EvalReport evaluate(const Scene& scene, const TargetGrid& targets, int threads) {
  if (targets.size() != scene.cameras.size()) {
    throw Error("evaluation targets cover " + std::to_string(targets.size()) + " views, scene has " +
                std::to_string(scene.cameras.size()));
  }
  for (std::size_t v = 0; v < targets.size(); ++v) {
    if (targets[v].size() != scene.frame_count()) {
      throw Error("evaluation targets for view " + std::to_string(v) + " cover " +
                  std::to_string(targets[v].size()) + " frames, timeline has " +
                  std::to_string(scene.frame_count()));
    }
  }
  const TargetGrid renders = render_grid(scene, threads);

  EvalReport report;
  double total_mse = 0.0;
  double total_ssim = 0.0;
  double total_flicker = 0.0;
  std::size_t count = 0;
  for (std::size_t v = 0; v < targets.size(); ++v) {
    double mse = 0.0;
    double ss = 0.0;
    for (std::size_t f = 0; f < targets[v].size(); ++f) {
      mse += mean_squared_error(renders[v][f], targets[v][f]);
      ss += ssim(renders[v][f], targets[v][f]);
    }
    const double n = static_cast<double>(targets[v].size());
    ViewMetrics vm;
    vm.psnr = psnr_from_mse(mse / n);
    vm.ssim = ss / n;
    vm.flicker_excess = mean_consecutive_l1(renders[v]) - mean_consecutive_l1(targets[v]);
    report.views.push_back(vm);
    total_mse += mse;
    total_ssim += ss;
    total_flicker += vm.flicker_excess;
    count += targets[v].size();
  }
  if (count > 0) {
    report.aggregate.psnr = psnr_from_mse(total_mse / static_cast<double>(count));
    report.aggregate.ssim = total_ssim / static_cast<double>(count);
    report.aggregate.flicker_excess = total_flicker / static_cast<double>(targets.size());
  }
  return report;
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  for (std::size_t v = 0; v < views.size(); ++v) {
    out << "view=" << v << " psnr=" << views[v].psnr << " ssim=" << views[v].ssim
        << " flicker_excess=" << views[v].flicker_excess << '\n';
  }
  out << "all psnr=" << aggregate.psnr << " ssim=" << aggregate.ssim
      << " flicker_excess=" << aggregate.flicker_excess << '\n';
  return out.str();
}

}  // namespace wabe
