#include "wabe/autodiff/backward.hpp"

#include "wabe/core/error.hpp"
#include "wabe/core/math.hpp"
#include "wabe/core/parallel.hpp"

#include <cmath>
#include <string>

namespace wabe {
namespace {

void check_incoming(const RenderOutput& output, const ImageBuffer& dL_dpixels,
                    const BlendMode& mode) {
  if (!output.has_cache()) {
    throw ContractViolation("backward requires a render produced with caching enabled");
  }
  if (!(output.mode == mode)) {
    throw ContractViolation("backward blend mode differs from the mode used to render");
  }
  if (!dL_dpixels.same_shape(output.image)) {
    throw ContractViolation("pixel gradient shape does not match the rendered image");
  }
  for (int y = 0; y < dL_dpixels.height(); ++y) {
    for (int x = 0; x < dL_dpixels.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        if (!std::isfinite(dL_dpixels.at(x, y, c))) {
          throw Error("non-finite incoming gradient at pixel (" + std::to_string(x) + ", " +
                      std::to_string(y) + ") channel " + std::to_string(c));
        }
      }
    }
  }
}

}  // namespace

std::vector<SplatGrad> backward_splats(const RenderOutput& output, const ImageBuffer& dL_dpixels,
                                       const BlendMode& mode, const BackwardConfig& config) {
  check_incoming(output, dL_dpixels, mode);

  const int width = output.image.width();
  const int height = output.image.height();
  const int tiles_x = output.tile_count_x();
  const int tile_count = tiles_x * output.tile_count_y();
  const bool weighted = mode.is_wabe();
  const double beta = mode.beta();
  // Under Full, d(w_j T_j)/dT_j = w_j (1 + beta T_j); under Detached it is w_j.
  const double weight_slope =
      (weighted && config.wabe_weight_gradient == WeightGradient::Full) ? beta : 0.0;

  std::vector<std::vector<SplatGrad>> tile_grads(tile_count);

  parallel_for(static_cast<std::size_t>(tile_count), config.threads, [&](std::size_t tile) {
    const auto list = output.tile_splats(static_cast<int>(tile));
    auto& local = tile_grads[tile];
    local.assign(list.size(), SplatGrad{});
    if (list.empty()) return;

    const int tx = static_cast<int>(tile) % tiles_x;
    const int ty = static_cast<int>(tile) / tiles_x;
    const int x_end = std::min(width, (tx + 1) * kTileSize);
    const int y_end = std::min(height, (ty + 1) * kTileSize);

    for (int y = ty * kTileSize; y < y_end; ++y) {
      for (int x = tx * kTileSize; x < x_end; ++x) {
        const auto records = output.contributions(x, y);
        if (records.empty()) continue;
        const Vec3 g(dL_dpixels.at(x, y, 0), dL_dpixels.at(x, y, 1), dL_dpixels.at(x, y, 2));
        const Vec2 pixel(x, y);

        // Sum over layers behind k of c_j alpha_j T_j w_j (1 + slope T_j).
        Vec3 behind = Vec3::Zero();
        for (std::size_t r = records.size(); r-- > 0;) {
          const ContributionRecord& rec = records[r];
          const Splat2D& s = output.splats[rec.splat];
          SplatGrad& sg = local[rec.tile_slot];

          const double t = rec.transmittance;
          const double w = weighted ? wabe_weight(t, beta) : 1.0;
          sg.color += (w * rec.alpha * t) * g;

          const double dL_dalpha =
              g.dot(w * t * s.color - behind / (1.0 - rec.alpha));
          behind += (rec.alpha * t * w * (1.0 + weight_slope * t)) * s.color;

          if (rec.clamped) continue;
          const Vec2 d = pixel - s.mean2d;
          const Vec2 ad = s.inv_cov2d * d;
          const double gaussian = std::exp(-0.5 * d.dot(ad));
          sg.peak_opacity += dL_dalpha * gaussian;
          const double dL_dpower = dL_dalpha * rec.alpha;
          sg.mean += dL_dpower * ad;
          sg.inv_cov += (-0.5 * dL_dpower) * (d * d.transpose());
        }
      }
    }
  });

  std::vector<SplatGrad> grads(output.splats.size());
  for (int tile = 0; tile < tile_count; ++tile) {
    const auto list = output.tile_splats(tile);
    for (std::size_t slot = 0; slot < list.size(); ++slot) {
      SplatGrad& dst = grads[list[slot]];
      const SplatGrad& src = tile_grads[tile][slot];
      dst.mean += src.mean;
      dst.inv_cov += src.inv_cov;
      dst.peak_opacity += src.peak_opacity;
      dst.color += src.color;
    }
  }
  return grads;
}

GradBuffer backward_projection(std::span<const WorldGaussian> gaussians, const Camera& camera,
                               std::span<const Splat2D> splats,
                               std::span<const SplatGrad> splat_grads) {
  if (splats.size() != splat_grads.size()) {
    throw ContractViolation("splat gradient list does not match the splat list");
  }
  GradBuffer out(gaussians.size());
  const Mat3& view_rot = camera.rotation;

  for (std::size_t i = 0; i < splats.size(); ++i) {
    const Splat2D& s = splats[i];
    const SplatGrad& sg = splat_grads[i];
    if (s.source_index < 0 || static_cast<std::size_t>(s.source_index) >= gaussians.size()) {
      throw ContractViolation("splat source_index outside the Gaussian list");
    }
    const WorldGaussian& wg = gaussians[s.source_index];
    GaussianGrad& gg = out.entries[s.source_index];

    gg.color += sg.color;
    const double opacity = s.peak_opacity;
    gg.opacity_logit += sg.peak_opacity * opacity * (1.0 - opacity);

    // inverse: dL/dCov = -A^T G A^T with A = cov^-1 symmetric
    const Mat2 g_inv = 0.5 * (sg.inv_cov + sg.inv_cov.transpose());
    const Mat2 g_cov = -s.inv_cov2d * g_inv * s.inv_cov2d;

    const Vec3& t = s.view_position;
    const double inv_z = 1.0 / t.z();
    const double inv_z2 = inv_z * inv_z;
    const double inv_z3 = inv_z2 * inv_z;
    Mat23 j;
    j << camera.fx * inv_z, 0.0, -camera.fx * t.x() * inv_z2,
         0.0, camera.fy * inv_z, -camera.fy * t.y() * inv_z2;

    const Mat3 rot = rotation_matrix(wg.rotation);
    const Vec3 variance = (2.0 * wg.log_scale).array().exp();
    const Mat3 sigma_world = rot * variance.asDiagonal() * rot.transpose();
    const Mat3 sigma_view = view_rot * sigma_world * view_rot.transpose();

    // cov2d = J V J^T + blur
    const Mat3 g_view = j.transpose() * g_cov * j;
    const Mat23 g_j = 2.0 * g_cov * j * sigma_view;
    const Mat3 g_world = view_rot.transpose() * g_view * view_rot;

    // Sigma = R D R^T
    const Mat3 g_rot = 2.0 * g_world * rot * variance.asDiagonal();
    const Mat3 rgr = rot.transpose() * g_world * rot;
    for (int a = 0; a < 3; ++a) gg.log_scale[a] += 2.0 * variance[a] * rgr(a, a);
    gg.rotation += rotation_matrix_backward(wg.rotation, g_rot);

    // mean2d = (fx x/z + cx, fy y/z + cy) has Jacobian J; J itself depends on t.
    Vec3 g_t = j.transpose() * sg.mean;
    g_t.x() += g_j(0, 2) * (-camera.fx * inv_z2);
    g_t.y() += g_j(1, 2) * (-camera.fy * inv_z2);
    g_t.z() += g_j(0, 0) * (-camera.fx * inv_z2) + g_j(0, 2) * (2.0 * camera.fx * t.x() * inv_z3) +
               g_j(1, 1) * (-camera.fy * inv_z2) + g_j(1, 2) * (2.0 * camera.fy * t.y() * inv_z3);
    gg.position += view_rot.transpose() * g_t;
  }
  return out;
}

GradBuffer backward(const RenderOutput& output, const ImageBuffer& dL_dpixels,
                    const BlendMode& mode, const BackwardConfig& config) {
  if (output.sources.empty() && !output.splats.empty()) {
    throw ContractViolation(
        "backward to 3D parameters needs a render produced by render_gaussians()");
  }
  const auto splat_grads = backward_splats(output, dL_dpixels, mode, config);
  return backward_projection(output.sources, output.camera, output.splats, splat_grads);
}

}  // namespace wabe
