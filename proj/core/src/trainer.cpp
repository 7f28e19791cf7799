#include "wabe/trainer/trainer.hpp"

#include "wabe/adversarial/pairs.hpp"
#include "wabe/core/error.hpp"
#include "wabe/core/math.hpp"
#include "wabe/rasterizer/rasterizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace wabe {

void TrainConfig::validate() const {
  weights.validate();
  editor.validate();
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(beta_wabe)) throw Error("beta_wabe must be finite and >= 0");
  if (!finite_nonneg(learning_rate)) throw Error("learning_rate must be finite and >= 0");
  if (iterations < 0) throw Error("iterations must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw Error("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0) || !std::isfinite(adam_eps)) throw Error("adam_eps must be > 0");
  if (!finite_nonneg(discriminator_lr_scale)) {
    throw Error("discriminator_lr_scale must be finite and >= 0");
  }
  if (checkpoint_interval <= 0) throw Error("checkpoint_interval must be > 0");
  if (threads < 0) throw Error("threads must be >= 0");
}

AdamConfig TrainConfig::gaussian_adam() const {
  return {learning_rate, adam_beta1, adam_beta2, adam_eps};
}

AdamConfig TrainConfig::discriminator_adam() const {
  return {learning_rate * discriminator_lr_scale, adam_beta1, adam_beta2, adam_eps};
}

BlendMode TrainConfig::blend_mode() const {
  return wabe_enabled ? BlendMode::wabe(beta_wabe) : BlendMode::standard();
}

TrainState TrainState::initialize(Scene scene, const TrainConfig& config) {
  scene.validate();
  if (scene.cameras.empty()) throw Error("training needs at least one camera");
  const std::size_t n = scene.gaussians.size() * kParamsPerGaussian;
  Discriminator disc(mix64(config.seed ^ 0xd15c0ffee5eedull));
  AdamState disc_adam(disc.parameter_count());
  return TrainState{std::move(scene), AdamState(n), std::move(disc), std::move(disc_adam),
                    std::mt19937_64(config.seed), 0};
}

ImageBuffer render_frame(const Scene& scene, std::size_t camera, std::size_t frame,
                         const BlendMode& mode, int threads) {
  const auto world = scene.world_gaussians_at(frame);
  return render_gaussians(world, scene.cameras.at(camera), mode, {threads, false}).image;
}

namespace {

void require_finite(double value, const char* term, int iteration) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite " << term << " loss at iteration " << iteration;
    throw Error(msg.str());
  }
}

void scale_into(ImageBuffer& dst, const ImageBuffer& src, double factor) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * s[i];
}

// Adam on the packed Gaussians, then renormalize quaternions the update
// touched and clamp colors. Untouched quaternions are left bit-identical.
void update_gaussians(std::vector<Gaussian3D>& gaussians, AdamState& adam, const GradBuffer& grads,
                      const AdamConfig& config) {
  std::vector<double> flat = pack_parameters(gaussians);
  const std::vector<Gaussian3D> before = gaussians;
  adam_step(adam, flat, pack_gradients(grads), config);
  unpack_parameters(flat, gaussians);
  for (std::size_t i = 0; i < gaussians.size(); ++i) {
    Gaussian3D& g = gaussians[i];
    if (g.rotation_local != before[i].rotation_local) g.rotation_local = normalized(g.rotation_local);
    for (int c = 0; c < 3; ++c) g.color[c] = std::clamp(g.color[c], 0.0, 1.0);
  }
}

std::uint64_t gaussian_checksum(const std::vector<Gaussian3D>& gaussians) {
  return fnv1a64(pack_parameters(gaussians));
}

}  // namespace

StepMetrics train_step(TrainState& state, const TrainConfig& config, const TrainHooks& hooks) {
  const auto start = std::chrono::steady_clock::now();
  Scene& scene = state.scene;
  StepMetrics m;
  m.iteration = ++state.iteration;

  const int views = static_cast<int>(scene.cameras.size());
  const int frames = static_cast<int>(scene.frame_count());
  m.view = std::uniform_int_distribution<int>(0, views - 1)(state.rng);
  m.time = std::uniform_int_distribution<int>(0, frames - 1)(state.rng);
  if (frames == 1) {
    m.adjacent = m.time;
  } else if (m.time == 0) {
    m.adjacent = 1;
  } else if (m.time == frames - 1) {
    m.adjacent = frames - 2;
  } else {
    m.adjacent = std::uniform_int_distribution<int>(0, 1)(state.rng) == 0 ? m.time - 1 : m.time + 1;
  }

  const std::uint64_t disc_before = state.discriminator.checksum();
  const std::uint64_t gauss_before = gaussian_checksum(scene.gaussians);

  const BlendMode mode = config.blend_mode();
  const Camera& camera = scene.cameras[m.view];
  const auto frames_t = scene.frames_at(m.time);
  const auto world_t = bind_all(scene.gaussians, frames_t);
  const RenderOutput out_t = render_gaussians(world_t, camera, mode, {config.threads, true});
  const ImageBuffer edited_t = edit(out_t.image, config.editor, m.view, m.time);

  const ImageLoss l1 = l1_loss(out_t.image, edited_t);
  const ImageLoss ds = dssim_loss(out_t.image, edited_t);
  m.l1 = l1.value;
  m.dssim = ds.value;
  m.recon = l1.value + ds.value;
  require_finite(m.l1, "l1", m.iteration);
  require_finite(m.dssim, "dssim", m.iteration);

  const LossWeights& w = config.weights;
  ImageBuffer pixel_grad(out_t.image.width(), out_t.image.height());
  scale_into(pixel_grad, l1.gradient, w.lambda1);
  scale_into(pixel_grad, ds.gradient, w.lambda1);

  PairSet pairs;
  if (config.adversarial_enabled) {
    const ImageBuffer rendered_k = render_frame(scene, m.view, m.adjacent, mode, config.threads);
    const ImageBuffer edited_k = edit(rendered_k, config.editor, m.view, m.adjacent);
    pairs = make_pairs(edited_t, edited_k, out_t.image);
    const GeneratorLoss g = g_loss(state.discriminator, pairs.fake);
    m.g_loss = g.value;
    require_finite(m.g_loss, "generator", m.iteration);
    scale_into(pixel_grad, g.pixel_gradient, w.lambda3);
  }

  const GradBuffer world_grads =
      backward(out_t, pixel_grad, mode, {config.wabe_weight_gradient, AccumulateOrder::Deterministic,
                                         config.threads});
  GradBuffer local = pull_back_to_local(world_grads, scene.gaussians, frames_t);

  BindingLoss binding = const_loss(scene.gaussians);
  m.binding = binding.value;
  require_finite(m.binding, "binding", m.iteration);
  for (auto& e : binding.gradient.entries) e *= w.lambda4;
  local += binding.gradient;

  bool routing_ok = state.discriminator.checksum() == disc_before;

  if (config.adversarial_enabled) {
    DiscriminatorLoss d = d_loss(state.discriminator, pairs.real, pairs.fake);
    m.d_loss = d.value;
    require_finite(m.d_loss, "discriminator", m.iteration);
    for (double& g : d.gradient) g *= w.lambda2;
    m.total = total_loss(m.recon, m.d_loss, m.g_loss, m.binding, w).value;
    if (hooks.on_gradients) hooks.on_gradients(m, local);
    adam_step(state.discriminator_adam, state.discriminator.parameters(), d.gradient,
              config.discriminator_adam());
    routing_ok = routing_ok && gaussian_checksum(scene.gaussians) == gauss_before;
  } else {
    m.total = total_loss(m.recon, 0.0, 0.0, m.binding, w).value;
    if (hooks.on_gradients) hooks.on_gradients(m, local);
  }
  require_finite(m.total, "total", m.iteration);
  if (!local.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite Gaussian gradient at iteration " << m.iteration;
    throw Error(msg.str());
  }

  const std::uint64_t disc_after_d = state.discriminator.checksum();
  update_gaussians(scene.gaussians, state.gaussian_adam, local, config.gaussian_adam());
  routing_ok = routing_ok && state.discriminator.checksum() == disc_after_d;
  if (!config.adversarial_enabled) routing_ok = routing_ok && disc_after_d == disc_before;
  m.routing_ok = routing_ok;

  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return m;
}

TrainResult train_loop(Scene initial, const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  TrainState state = TrainState::initialize(std::move(initial), config);
  std::vector<StepMetrics> history;
  history.reserve(static_cast<std::size_t>(config.iterations));
  for (int i = 0; i < config.iterations; ++i) {
    history.push_back(train_step(state, config, hooks));
    const bool last = i + 1 == config.iterations;
    if (hooks.on_checkpoint && (state.iteration % config.checkpoint_interval == 0 || last)) {
      hooks.on_checkpoint(state);
    }
  }
  return {std::move(state.scene.gaussians), std::move(state.discriminator), std::move(history)};
}

std::string format_metrics(const std::vector<StepMetrics>& history) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& m : history) {
    out << "iteration=" << m.iteration << " view=" << m.view << " time=" << m.time
        << " adjacent=" << m.adjacent << " l1=" << m.l1 << " dssim=" << m.dssim
        << " recon=" << m.recon << " const=" << m.binding << " g=" << m.g_loss
        << " d=" << m.d_loss << " total=" << m.total
        << " routing=" << (m.routing_ok ? "ok" : "violated") << " wall_s=" << m.wall_seconds
        << '\n';
  }
  return out.str();
}

FitResult fit_loop(Scene scene, const std::vector<FitTarget>& targets, const TrainConfig& config) {
  config.validate();
  scene.validate();
  if (targets.empty() && config.iterations > 0) throw Error("fit needs at least one target");
  for (const auto& t : targets) {
    const Camera& cam = scene.cameras.at(t.camera);
    if (t.frame >= scene.frame_count()) throw Error("fit target frame out of range");
    if (t.image.width() != cam.width || t.image.height() != cam.height) {
      throw Error("fit target does not match its camera resolution");
    }
  }
  const BlendMode mode = BlendMode::standard();
  const LossWeights& w = config.weights;
  AdamState adam(scene.gaussians.size() * kParamsPerGaussian);
  FitResult result;
  for (int i = 0; i < config.iterations; ++i) {
    const std::size_t ti = static_cast<std::size_t>(i) % targets.size();
    const FitTarget& target = targets[ti];
    const auto frames = scene.frames_at(target.frame);
    const auto world = bind_all(scene.gaussians, frames);
    const RenderOutput out =
        render_gaussians(world, scene.cameras[target.camera], mode, {config.threads, true});

    const ImageLoss l1 = l1_loss(out.image, target.image);
    const ImageLoss ds = dssim_loss(out.image, target.image);
    ImageBuffer pixel_grad(out.image.width(), out.image.height());
    scale_into(pixel_grad, l1.gradient, w.lambda1);
    scale_into(pixel_grad, ds.gradient, w.lambda1);

    GradBuffer local = pull_back_to_local(backward(out, pixel_grad, mode, {WeightGradient::Detached,
                                                                           AccumulateOrder::Deterministic,
                                                                           config.threads}),
                                          scene.gaussians, frames);
    BindingLoss binding = const_loss(scene.gaussians);
    for (auto& e : binding.gradient.entries) e *= w.lambda4;
    local += binding.gradient;

    FitMetrics m;
    m.iteration = i + 1;
    m.target = ti;
    m.recon = l1.value + ds.value;
    m.binding = binding.value;
    m.total = w.lambda1 * m.recon + w.lambda4 * m.binding;
    require_finite(m.total, "fit", m.iteration);
    update_gaussians(scene.gaussians, adam, local, config.gaussian_adam());
    result.history.push_back(m);
  }
  result.gaussians = std::move(scene.gaussians);
  return result;
}

}  // namespace wabe
