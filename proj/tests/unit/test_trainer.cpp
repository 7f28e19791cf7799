#include "generators.hpp"

#include "wabe/core/error.hpp"
#include "wabe/fixtures/fixtures.hpp"
#include "wabe/rasterizer/rasterizer.hpp"
#include "wabe/trainer/adam.hpp"
#include "wabe/trainer/evaluate.hpp"
#include "wabe/trainer/trainer.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace wabe;
using testsupport::Gen;

namespace {

TrainConfig short_config(int iterations) {
  TrainConfig c = flap_edit_config().config;
  c.iterations = iterations;
  c.threads = 1;
  return c;
}

}  // namespace

TEST(Adam, FirstStepMovesByLearningRateAgainstSign) {
  // With bias correction m_hat = g and v_hat = g^2 on step one.
  std::vector<double> p{1.0, -2.0, 0.5}, g{0.3, -7.0, 1e-3};
  AdamState s(3);
  adam_step(s, p, g, AdamConfig{});
  EXPECT_NEAR(p[0], 1.0 - 1e-2, 1e-9);
  EXPECT_NEAR(p[1], -2.0 + 1e-2, 1e-9);
  EXPECT_NEAR(p[2], 0.5 - 1e-2 * 1e-3 / (1e-3 + 1e-8), 1e-12);
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, SecondStepByHand) {
  std::vector<double> p{0.0};
  AdamState s(1);
  const AdamConfig c;
  adam_step(s, p, std::vector<double>{1.0}, c);
  adam_step(s, p, std::vector<double>{-1.0}, c);
  const double m = 0.9 * 0.1 - 0.1;         // 0.9 * m1 + 0.1 * g2
  const double v = 0.999 * 0.001 + 0.001;  // 0.999 * v1 + 0.001 * g2^2
  const double mh = m / (1 - 0.81), vh = v / (1 - 0.999 * 0.999);
  EXPECT_NEAR(p[0], -1e-2 / (1.0 + 1e-8) - 1e-2 * mh / (std::sqrt(vh) + 1e-8), 1e-15);
}

TEST(Adam, ZeroGradientAndZeroRateLeaveParameters) {
  std::vector<double> p{0.25, -0.75};
  AdamState s(2);
  adam_step(s, p, std::vector<double>{0.0, 0.0}, AdamConfig{});
  EXPECT_EQ(p[0], 0.25);
  AdamConfig still;
  still.learning_rate = 0.0;
  adam_step(s, p, std::vector<double>{4.0, -1.0}, still);
  EXPECT_EQ(p[0], 0.25);
  EXPECT_EQ(p[1], -0.75);
}

TEST(Adam, SizeMismatchIsContractViolation) {
  std::vector<double> p(3);
  AdamState s(3);
  EXPECT_THROW(adam_step(s, p, std::vector<double>(2), AdamConfig{}), ContractViolation);
}

TEST(TrainConfig, DefaultsAndValidation) {
  const TrainConfig c;
  EXPECT_EQ(c.beta_wabe, 6.0);
  EXPECT_EQ(c.learning_rate, 1e-2);
  EXPECT_EQ(c.iterations, 1000);
  EXPECT_TRUE(c.adversarial_enabled);
  EXPECT_TRUE(c.wabe_enabled);
  TrainConfig bad = c;
  bad.beta_wabe = -1.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.iterations = -3;
  EXPECT_THROW(bad.validate(), Error);
  bad = c;
  bad.adam_beta2 = 1.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Trainer, ZeroIterationsReturnsInitialState) {
  const FlapFixture fx = flap_fixture();
  const TrainResult r = train_loop(fx.scene, short_config(0));
  EXPECT_TRUE(r.history.empty());
  EXPECT_EQ(pack_parameters(r.gaussians), pack_parameters(fx.scene.gaussians));
}

TEST(Trainer, ZeroLearningRateFreezesEverything) {
  const FlapFixture fx = flap_fixture();
  TrainConfig c = short_config(4);
  c.learning_rate = 0.0;
  const TrainResult r = train_loop(fx.scene, c);
  EXPECT_EQ(pack_parameters(r.gaussians), pack_parameters(fx.scene.gaussians));
  EXPECT_EQ(r.discriminator.checksum(), TrainState::initialize(fx.scene, c).discriminator.checksum());
  ASSERT_EQ(r.history.size(), 4u);
}

TEST(Trainer, SameSeedSameResult) {
  const FlapFixture fx = flap_fixture();
  TrainConfig c = short_config(6);
  const TrainResult a = train_loop(fx.scene, c);
  const TrainResult b = train_loop(fx.scene, c);
  EXPECT_EQ(pack_parameters(a.gaussians), pack_parameters(b.gaussians));
  EXPECT_EQ(a.discriminator.checksum(), b.discriminator.checksum());
  c.threads = 3;
  const TrainResult d = train_loop(fx.scene, c);
  EXPECT_EQ(pack_parameters(a.gaussians), pack_parameters(d.gaussians));
  c.seed += 1;
  const TrainResult e = train_loop(fx.scene, c);
  EXPECT_NE(pack_parameters(a.gaussians), pack_parameters(e.gaussians));
}

TEST(Trainer, SamplesValidViewsFramesAndNeighbours) {
  const FlapFixture fx = flap_fixture();
  const TrainResult r = train_loop(fx.scene, short_config(20));
  for (const auto& m : r.history) {
    EXPECT_GE(m.view, 0);
    EXPECT_LT(m.view, static_cast<int>(fx.scene.cameras.size()));
    EXPECT_GE(m.time, 0);
    EXPECT_LT(m.time, static_cast<int>(fx.scene.frame_count()));
    EXPECT_NE(m.adjacent, m.time);
    EXPECT_TRUE(m.routing_ok);
    EXPECT_NEAR(m.recon, m.l1 + m.dssim, 1e-12);
  }
}

TEST(Trainer, AdversarialOffLeavesDiscriminatorAlone) {
  const FlapFixture fx = flap_fixture();
  TrainConfig c = short_config(5);
  c.adversarial_enabled = false;
  const std::uint64_t init = TrainState::initialize(fx.scene, c).discriminator.checksum();
  const TrainResult r = train_loop(fx.scene, c);
  EXPECT_EQ(r.discriminator.checksum(), init);
  for (const auto& m : r.history) {
    EXPECT_EQ(m.g_loss, 0.0);
    EXPECT_EQ(m.d_loss, 0.0);
  }
}

TEST(Trainer, AdversarialOnUpdatesDiscriminator) {
  const FlapFixture fx = flap_fixture();
  const TrainConfig c = short_config(3);
  const std::uint64_t init = TrainState::initialize(fx.scene, c).discriminator.checksum();
  EXPECT_NE(train_loop(fx.scene, c).discriminator.checksum(), init);
}

TEST(Trainer, WabeOffNeverComputesWeights) {
  const FlapFixture fx = flap_fixture();
  TrainConfig c = short_config(3);
  c.wabe_enabled = false;
  const std::uint64_t before = wabe_weight_evaluations();
  train_loop(fx.scene, c);
  EXPECT_EQ(wabe_weight_evaluations(), before);
  c.wabe_enabled = true;
  train_loop(fx.scene, c);
  EXPECT_GT(wabe_weight_evaluations(), before);
}

TEST(Trainer, IdentityEditorIsAFixedPointOfReconstruction) {
  const FlapFixture fx = flap_fixture();
  TrainConfig c = short_config(5);
  c.editor = EditSpec{};
  c.adversarial_enabled = false;
  const TrainResult r = train_loop(fx.scene, c);
  for (const auto& m : r.history) {
    EXPECT_EQ(m.l1, 0.0);
    EXPECT_LT(m.dssim, 1e-12);
  }
}

TEST(Trainer, HookSeesGradientsBeforeUpdate) {
  const FlapFixture fx = flap_fixture();
  TrainConfig c = short_config(3);
  int calls = 0, checkpoints = 0;
  TrainHooks hooks;
  hooks.on_gradients = [&](const StepMetrics& m, const GradBuffer& g) {
    ++calls;
    EXPECT_EQ(m.iteration, calls);
    EXPECT_EQ(g.size(), fx.scene.gaussians.size());
    EXPECT_TRUE(g.all_finite());
  };
  hooks.on_checkpoint = [&](const TrainState&) { ++checkpoints; };
  train_loop(fx.scene, c, hooks);
  EXPECT_EQ(calls, 3);
  EXPECT_EQ(checkpoints, 1);
}

TEST(Trainer, NonFiniteStateIsReported) {
  const FlapFixture fx = flap_fixture();
  const TrainConfig c = short_config(1);
  TrainState state = TrainState::initialize(fx.scene, c);
  for (auto& g : state.scene.gaussians) g.color = Vec3::Constant(std::nan(""));
  try {
    train_step(state, c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("iteration 1"), std::string::npos) << e.what();
  }
}

TEST(Trainer, MetricsFormatOneLinePerStep) {
  const FlapFixture fx = flap_fixture();
  const TrainResult r = train_loop(fx.scene, short_config(3));
  const std::string text = format_metrics(r.history);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_NE(text.find("iteration=1"), std::string::npos);
}

TEST(Fit, ReducesReconstructionError) {
  const FitFixture fx = fit_fixture();
  TrainConfig c;
  c.iterations = 60;
  c.threads = 1;
  const FitResult r = fit_loop(fx.initial, fx.targets, c);
  ASSERT_EQ(r.history.size(), 60u);
  EXPECT_LT(r.history.back().recon, r.history.front().recon);
}

TEST(Evaluate, PsnrByHand) {
  EXPECT_NEAR(psnr(ImageBuffer(4, 4, 0.5), ImageBuffer(4, 4, 0.75)), 10 * std::log10(16.0), 1e-12);
  EXPECT_NEAR(psnr(ImageBuffer(4, 4, 0.5), ImageBuffer(4, 4, 0.75)), 12.0412, 1e-4);
  EXPECT_EQ(psnr(ImageBuffer(4, 4, 0.5), ImageBuffer(4, 4, 0.5)), kPsnrCap);
  EXPECT_NEAR(mean_absolute_difference(ImageBuffer(2, 2, 0.1), ImageBuffer(2, 2, 0.4)), 0.3, 1e-15);
}

TEST(Evaluate, SelfComparisonIsPerfect) {
  const FlapFixture fx = flap_fixture();
  const EvalReport r = evaluate(fx.scene, render_grid(fx.scene, 1), 1);
  ASSERT_EQ(r.views.size(), fx.scene.cameras.size());
  EXPECT_EQ(r.aggregate.psnr, kPsnrCap);
  EXPECT_NEAR(r.aggregate.ssim, 1.0, 1e-12);
  EXPECT_NEAR(r.aggregate.flicker_excess, 0.0, 1e-15);
  EXPECT_FALSE(r.to_text().empty());
}

TEST(Evaluate, GridShapeMismatchThrows) {
  const FlapFixture fx = flap_fixture();
  TargetGrid g = render_grid(fx.scene, 1);
  g.pop_back();
  EXPECT_THROW(evaluate(fx.scene, g, 1), Error);
  g = render_grid(fx.scene, 1);
  g[0].pop_back();
  EXPECT_THROW(evaluate(fx.scene, g, 1), Error);
}
