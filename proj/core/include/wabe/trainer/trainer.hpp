#pragma once

#include "wabe/adversarial/discriminator.hpp"
#include "wabe/autodiff/backward.hpp"
#include "wabe/avatar/scene.hpp"
#include "wabe/core/image.hpp"
#include "wabe/editor/editor.hpp"
#include "wabe/losses/losses.hpp"
#include "wabe/trainer/adam.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace wabe {

struct TrainConfig {
  double beta_wabe = 6.0;
  LossWeights weights;
  double learning_rate = 1e-2;
  int iterations = 1000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double discriminator_lr_scale = 0.1;
  std::uint64_t seed = 0;
  bool adversarial_enabled = true;
  bool wabe_enabled = true;
  WeightGradient wabe_weight_gradient = WeightGradient::Detached;
  EditSpec editor;
  int checkpoint_interval = 100;
  int threads = 0;

  /// Throws wabe::Error on out-of-range values.
  void validate() const;

  AdamConfig gaussian_adam() const;
  AdamConfig discriminator_adam() const;
  BlendMode blend_mode() const;
};

/// Everything a training run mutates. Gaussians live in `scene.gaussians`.
struct TrainState {
  Scene scene;
  AdamState gaussian_adam;
  Discriminator discriminator;
  AdamState discriminator_adam;
  std::mt19937_64 rng;
  int iteration = 0;

  /// Seeds the sampler and the discriminator from `config.seed`.
  static TrainState initialize(Scene scene, const TrainConfig& config);
};

struct StepMetrics {
  int iteration = 0;  // 1-based
  int view = 0;
  int time = 0;
  int adjacent = 0;
  double l1 = 0.0;
  double dssim = 0.0;
  double recon = 0.0;    // l1 + dssim
  double binding = 0.0;  // const_loss value
  double g_loss = 0.0;
  double d_loss = 0.0;
  double total = 0.0;  // lambda-weighted sum
  bool routing_ok = true;
  double wall_seconds = 0.0;
};

struct TrainHooks {
  /// Called once per step after all gradients are assembled and before any
  /// optimizer update; receives the local-frame Gaussian gradient.
  std::function<void(const StepMetrics&, const GradBuffer&)> on_gradients;
  /// Called every `checkpoint_interval` iterations and after the last one.
  std::function<void(const TrainState&)> on_checkpoint;
};

/// One render-edit-aggregate iteration. Throws wabe::Error naming the term and
/// iteration when a loss is non-finite.
StepMetrics train_step(TrainState& state, const TrainConfig& config, const TrainHooks& hooks = {});

struct TrainResult {
  std::vector<Gaussian3D> gaussians;
  Discriminator discriminator;
  std::vector<StepMetrics> history;
};

TrainResult train_loop(Scene initial, const TrainConfig& config, const TrainHooks& hooks = {});

/// Line-oriented metrics: one `key=value` line per iteration.
std::string format_metrics(const std::vector<StepMetrics>& history);

/// Renders a camera at a timeline frame.
ImageBuffer render_frame(const Scene& scene, std::size_t camera, std::size_t frame,
                         const BlendMode& mode, int threads = 0);

/// Fitting to fixed target images: no editor, no discriminator, Standard
/// blending.
struct FitTarget {
  std::size_t camera = 0;
  std::size_t frame = 0;
  ImageBuffer image;
};

struct FitMetrics {
  int iteration = 0;
  std::size_t target = 0;
  double recon = 0.0;
  double binding = 0.0;
  double total = 0.0;
};

struct FitResult {
  std::vector<Gaussian3D> gaussians;
  std::vector<FitMetrics> history;
};

/// Uses learning rate, Adam moments, weights, iterations and threads from
/// `config`; cycles through the targets in order.
FitResult fit_loop(Scene scene, const std::vector<FitTarget>& targets, const TrainConfig& config);

}  // namespace wabe
