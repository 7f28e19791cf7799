#include "wabe/autodiff/gradcheck.hpp"

#include "wabe/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <vector>

namespace wabe {

double SquaredErrorLoss::value(const ImageBuffer& image) const {
  require_same_shape(image, target_, "squared error");
  const auto a = image.data();
  const auto t = target_.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - t[i]) * (a[i] - t[i]);
  return sum / static_cast<double>(a.size());
}

ImageBuffer SquaredErrorLoss::gradient(const ImageBuffer& image) const {
  require_same_shape(image, target_, "squared error");
  ImageBuffer g(image.width(), image.height());
  const double scale = 2.0 / static_cast<double>(image.size());
  const auto a = image.data();
  const auto t = target_.data();
  auto out = g.data();
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = scale * (a[i] - t[i]);
  return g;
}

double SquaredErrorLoss::difference(const ImageBuffer& a, const ImageBuffer& b) const {
  require_same_shape(a, target_, "squared error");
  require_same_shape(b, target_, "squared error");
  // (a-t)^2 - (b-t)^2 = (a-b)(a+b-2t); unchanged entries contribute exactly 0.
  const auto da = a.data();
  const auto db = b.data();
  const auto t = target_.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double delta = da[i] - db[i];
    if (delta != 0.0) sum += delta * (da[i] + db[i] - 2.0 * t[i]);
  }
  return sum / static_cast<double>(da.size());
}

double GradcheckReport::max_relative_error() const {
  return std::max({position.max_relative_error, rotation.max_relative_error,
                   log_scale.max_relative_error, opacity_logit.max_relative_error,
                   color.max_relative_error});
}

std::string GradcheckReport::to_text() const {
  std::ostringstream os;
  auto line = [&](const char* name, const ParameterError& e) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s %.6e gaussian=%d component=%d\n", name,
                  e.max_relative_error, e.gaussian, e.component);
    os << buf;
  };
  line("position", position);
  line("rotation", rotation);
  line("log_scale", log_scale);
  line("opacity_logit", opacity_logit);
  line("color", color);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%-14s %.6e parameters=%zu\n", "max", max_relative_error(),
                parameters_checked);
  os << buf;
  return os.str();
}

ImageBuffer render_frozen_support(const RenderOutput& base,
                                  std::span<const WorldGaussian> gaussians,
                                  const BlendMode& mode, WeightGradient policy) {
  if (!base.has_cache()) {
    throw ContractViolation("frozen-support render needs a cached base render");
  }
  std::vector<Splat2D> splats;
  splats.reserve(base.splats.size());
  for (const auto& s : base.splats) {
    auto moved = project_unculled(gaussians[s.source_index], base.camera, s.source_index);
    if (!moved) throw Error("perturbed Gaussian moved behind the camera");
    splats.push_back(*moved);
  }

  const bool weighted = mode.is_wabe();
  const bool detached = policy == WeightGradient::Detached;
  ImageBuffer image(base.image.width(), base.image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Vec2 pixel(x, y);
      double t = 1.0;
      Vec3 color = Vec3::Zero();
      for (const auto& rec : base.contributions(x, y)) {
        const Splat2D& s = splats[rec.splat];
        double alpha = kAlphaMax;
        if (!rec.clamped) {
          const Vec2 d = pixel - s.mean2d;
          alpha = s.peak_opacity * std::exp(-0.5 * d.dot(s.inv_cov2d * d));
        }
        double w = 1.0;
        if (weighted) w = wabe_weight(detached ? rec.transmittance : t, mode.beta());
        color += (w * alpha * t) * s.color;
        t *= 1.0 - alpha;
      }
      for (int c = 0; c < 3; ++c) image.at(x, y, c) = color[c];
    }
  }
  return image;
}

namespace {

void record(ParameterError& slot, double analytic, double numeric, double floor, int gaussian,
            int component) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  const double rel = std::abs(analytic - numeric) / denom;
  if (rel > slot.max_relative_error || slot.gaussian < 0) {
    slot = ParameterError{rel, gaussian, component, analytic, numeric};
  }
}

}  // namespace

GradcheckReport gradcheck(std::span<const Gaussian3D> gaussians,
                          std::span<const TriangleFrame> frames, const Camera& camera,
                          const BlendMode& mode, const BackwardConfig& config,
                          const ImageFunctional& loss, const GradcheckOptions& options) {
  const std::vector<WorldGaussian> world = bind_all(gaussians, frames);
  const RenderOutput base = render_gaussians(world, camera, mode, {config.threads, true});
  const GradBuffer world_grads = backward(base, loss.gradient(base.image), mode, config);
  const GradBuffer analytic = pull_back_to_local(world_grads, gaussians, frames);

  std::vector<Gaussian3D> probe(gaussians.begin(), gaussians.end());
  std::vector<WorldGaussian> probe_world = world;
  GradcheckReport report;

  auto numeric = [&](std::size_t i, auto&& perturb, double h) {
    const Gaussian3D original = probe[i];
    perturb(probe[i], +h);
    probe_world[i] = bind_to_world(probe[i], frames[probe[i].parent_triangle]);
    const ImageBuffer plus =
        render_frozen_support(base, probe_world, mode, config.wabe_weight_gradient);
    probe[i] = original;
    perturb(probe[i], -h);
    probe_world[i] = bind_to_world(probe[i], frames[probe[i].parent_triangle]);
    const ImageBuffer minus =
        render_frozen_support(base, probe_world, mode, config.wabe_weight_gradient);
    probe[i] = original;
    probe_world[i] = world[i];
    return loss.difference(plus, minus) / (2.0 * h);
  };

  const double h = options.step;
  const double hq = options.quaternion_step;
  const double floor = options.denominator_floor;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const int gi = static_cast<int>(i);
    const GaussianGrad& a = analytic.entries[i];
    for (int k = 0; k < 3; ++k) {
      record(report.position, a.position[k],
             numeric(i, [k](Gaussian3D& g, double d) { g.position_local[k] += d; }, h), floor, gi,
             k);
      record(report.log_scale, a.log_scale[k],
             numeric(i, [k](Gaussian3D& g, double d) { g.log_scale[k] += d; }, h), floor, gi, k);
      record(report.color, a.color[k],
             numeric(i, [k](Gaussian3D& g, double d) { g.color[k] += d; }, h), floor, gi, k);
    }
    for (int k = 0; k < 4; ++k) {
      auto nudge = [k](Gaussian3D& g, double d) {
        g.rotation_local[k] += d;
        g.rotation_local /= g.rotation_local.norm();
      };
      record(report.rotation, a.rotation[k], numeric(i, nudge, hq), floor, gi, k);
    }
    record(report.opacity_logit, a.opacity_logit,
           numeric(i, [](Gaussian3D& g, double d) { g.opacity_logit += d; }, h), floor, gi, 0);
    report.parameters_checked += kParamsPerGaussian;
  }
  return report;
}

}  // namespace wabe
