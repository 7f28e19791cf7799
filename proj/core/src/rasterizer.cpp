#include "wabe/rasterizer/rasterizer.hpp"

#include "wabe/core/error.hpp"
#include "wabe/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

namespace wabe {
namespace {

std::atomic<std::uint64_t> g_wabe_weight_evaluations{0};

// Slack on the footprint box so pixels on the exact boundary are kept.
constexpr double kBoxSlack = 1e-7;

struct PixelBox {
  int x0, y0, x1, y1;
  bool empty() const { return x0 > x1 || y0 > y1; }
};

PixelBox footprint(const Splat2D& s, int width, int height) {
  PixelBox b;
  b.x0 = std::max(0, static_cast<int>(std::ceil(s.mean2d.x() - s.extent_x - kBoxSlack)));
  b.y0 = std::max(0, static_cast<int>(std::ceil(s.mean2d.y() - s.extent_y - kBoxSlack)));
  b.x1 = std::min(width - 1, static_cast<int>(std::floor(s.mean2d.x() + s.extent_x + kBoxSlack)));
  b.y1 = std::min(height - 1, static_cast<int>(std::floor(s.mean2d.y() + s.extent_y + kBoxSlack)));
  return b;
}

}  // namespace

BlendMode BlendMode::wabe(double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error("WABE beta must be finite and non-negative, got " + std::to_string(beta));
  }
  return BlendMode(Kind::Wabe, beta);
}

double wabe_weight(double transmittance_before, double beta) {
  return std::exp(-beta * (1.0 - transmittance_before));
}

std::uint64_t wabe_weight_evaluations() { return g_wabe_weight_evaluations.load(); }

std::span<const ContributionRecord> RenderOutput::contributions(int x, int y) const {
  if (!cached_) return {};
  const int tile = (y / kTileSize) * tiles_x_ + x / kTileSize;
  const PixelRange r = pixel_ranges_[static_cast<std::size_t>(y) * image.width() + x];
  return std::span<const ContributionRecord>(tile_records_[tile].data() + r.begin, r.count);
}

RenderOutput render(std::span<const Splat2D> splats, const Camera& camera, const BlendMode& mode,
                    const RenderOptions& options) {
  camera.validate();
  const int width = camera.width;
  const int height = camera.height;

  RenderOutput out;
  out.mode = mode;
  out.camera = camera;
  out.image = ImageBuffer(width, height);
  out.final_transmittance.assign(static_cast<std::size_t>(width) * height, 1.0);
  out.splats.assign(splats.begin(), splats.end());
  for (const auto& s : out.splats) {
    if (!std::isfinite(s.depth)) throw Error("splat has non-finite depth");
  }
  std::stable_sort(out.splats.begin(), out.splats.end(), [](const Splat2D& a, const Splat2D& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.source_index < b.source_index;
  });

  out.tiles_x_ = (width + kTileSize - 1) / kTileSize;
  out.tiles_y_ = (height + kTileSize - 1) / kTileSize;
  const int tile_count = out.tiles_x_ * out.tiles_y_;

  // Binning in global depth order keeps every tile list depth-sorted.
  std::vector<PixelBox> boxes(out.splats.size());
  out.tile_lists_.assign(tile_count, {});
  for (std::size_t i = 0; i < out.splats.size(); ++i) {
    boxes[i] = footprint(out.splats[i], width, height);
    if (boxes[i].empty()) continue;
    for (int ty = boxes[i].y0 / kTileSize; ty <= boxes[i].y1 / kTileSize; ++ty) {
      for (int tx = boxes[i].x0 / kTileSize; tx <= boxes[i].x1 / kTileSize; ++tx) {
        out.tile_lists_[ty * out.tiles_x_ + tx].push_back(static_cast<int>(i));
      }
    }
  }

  out.cached_ = options.cache;
  out.tile_records_.assign(tile_count, {});
  if (options.cache) out.pixel_ranges_.assign(static_cast<std::size_t>(width) * height, {});

  const bool weighted = mode.is_wabe();
  const double beta = mode.beta();

  parallel_for(static_cast<std::size_t>(tile_count), options.threads, [&](std::size_t tile) {
    const int tx = static_cast<int>(tile) % out.tiles_x_;
    const int ty = static_cast<int>(tile) / out.tiles_x_;
    const auto& list = out.tile_lists_[tile];
    auto& records = out.tile_records_[tile];
    std::uint64_t weight_evals = 0;

    const int x_end = std::min(width, (tx + 1) * kTileSize);
    const int y_end = std::min(height, (ty + 1) * kTileSize);
    for (int y = ty * kTileSize; y < y_end; ++y) {
      for (int x = tx * kTileSize; x < x_end; ++x) {
        const Vec2 pixel(x, y);
        const auto begin = static_cast<std::uint32_t>(records.size());
        double transmittance = 1.0;
        Vec3 color = Vec3::Zero();

        for (std::size_t slot = 0; slot < list.size(); ++slot) {
          if (transmittance < kTransmittanceMin) break;
          const int idx = list[slot];
          const PixelBox& b = boxes[idx];
          if (x < b.x0 || x > b.x1 || y < b.y0 || y > b.y1) continue;

          const Splat2D& s = out.splats[idx];
          const double alpha = alpha_at(s, pixel);
          if (alpha < kAlphaMin) continue;

          double weight = 1.0;
          if (weighted) {
            weight = wabe_weight(transmittance, beta);
            ++weight_evals;
          }
          color += (weight * alpha * transmittance) * s.color;
          if (options.cache) {
            records.push_back(ContributionRecord{idx, static_cast<int>(slot), alpha, transmittance,
                                                 alpha >= kAlphaMax});
          }
          transmittance *= 1.0 - alpha;
        }

        const std::size_t p = static_cast<std::size_t>(y) * width + x;
        out.final_transmittance[p] = transmittance;
        for (int c = 0; c < 3; ++c) out.image.at(x, y, c) = color[c];
        if (options.cache) {
          out.pixel_ranges_[p] = {begin, static_cast<std::uint32_t>(records.size()) - begin};
        }
      }
    }
    if (weight_evals) g_wabe_weight_evaluations.fetch_add(weight_evals);
  });

  return out;
}

RenderOutput render_gaussians(std::span<const WorldGaussian> gaussians, const Camera& camera,
                              const BlendMode& mode, const RenderOptions& options) {
  camera.validate();
  const auto splats = project_all(gaussians, camera);
  RenderOutput out = render(splats, camera, mode, options);
  out.sources.assign(gaussians.begin(), gaussians.end());
  return out;
}

}  // namespace wabe
