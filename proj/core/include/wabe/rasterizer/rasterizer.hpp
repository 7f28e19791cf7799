#pragma once

#include "wabe/core/image.hpp"
#include "wabe/core/types.hpp"
#include "wabe/rasterizer/projection.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace wabe {

inline constexpr int kTileSize = 16;
/// Compositing stops once transmittance in front of the next splat drops
/// below this.
inline constexpr double kTransmittanceMin = 1e-4;

/// Standard alpha blending, or the weighted variant where layer k is scaled
/// by exp(-beta * (1 - T_k)).
class BlendMode {
 public:
  enum class Kind { Standard, Wabe };

  static BlendMode standard() { return BlendMode(Kind::Standard, 0.0); }
  /// Throws wabe::Error for negative or non-finite beta.
  static BlendMode wabe(double beta);

  Kind kind() const { return kind_; }
  bool is_wabe() const { return kind_ == Kind::Wabe; }
  double beta() const { return beta_; }

  bool operator==(const BlendMode&) const = default;

 private:
  BlendMode(Kind kind, double beta) : kind_(kind), beta_(beta) {}

  Kind kind_;
  double beta_;
};

/// Visibility weight exp(-beta * (1 - transmittance_before)).
double wabe_weight(double transmittance_before, double beta);

/// Count of layer weights evaluated by render() under WABE mode since
/// process start. Exposed so callers can assert Standard paths never touch it.
std::uint64_t wabe_weight_evaluations();

/// One composited layer of one pixel.
struct ContributionRecord {
  int splat = 0;              // index into RenderOutput::splats
  int tile_slot = 0;          // index into the tile's splat list
  double alpha = 0.0;         // clamped opacity used for compositing
  double transmittance = 0.0; // product of (1 - alpha_j) over earlier layers
  bool clamped = false;       // alpha hit kAlphaMax
};

struct RenderOptions {
  int threads = 0;    // 0 = process default
  bool cache = true;  // keep contribution records for backward
};

class RenderOutput {
 public:
  ImageBuffer image;
  std::vector<double> final_transmittance;  // H x W
  std::vector<Splat2D> splats;              // ascending (depth, source_index)
  BlendMode mode = BlendMode::standard();
  Camera camera;

  /// World-space sources of `splats`, present when rendered through
  /// render_gaussians(); backward() needs them to reach 3D parameters.
  std::vector<WorldGaussian> sources;

  bool has_cache() const { return cached_; }
  int tile_count_x() const { return tiles_x_; }
  int tile_count_y() const { return tiles_y_; }
  std::span<const int> tile_splats(int tile) const { return tile_lists_[tile]; }

  /// Layers of pixel (x, y), front to back. Empty without a cache.
  std::span<const ContributionRecord> contributions(int x, int y) const;

 private:
  friend RenderOutput render(std::span<const Splat2D>, const Camera&, const BlendMode&,
                             const RenderOptions&);

  struct PixelRange {
    std::uint32_t begin = 0;
    std::uint32_t count = 0;
  };

  bool cached_ = false;
  int tiles_x_ = 0;
  int tiles_y_ = 0;
  std::vector<std::vector<int>> tile_lists_;
  std::vector<std::vector<ContributionRecord>> tile_records_;
  std::vector<PixelRange> pixel_ranges_;
};

/// Composites splats front to back over a black background.
RenderOutput render(std::span<const Splat2D> splats, const Camera& camera, const BlendMode& mode,
                    const RenderOptions& options = {});

/// project_all + render, keeping the world-space sources for backward.
RenderOutput render_gaussians(std::span<const WorldGaussian> gaussians, const Camera& camera,
                              const BlendMode& mode, const RenderOptions& options = {});

}  // namespace wabe
