#pragma once

#include "wabe/adversarial/discriminator.hpp"
#include "wabe/core/image.hpp"

#include <vector>

namespace wabe {

enum class PairLabel { Real, Fake };

/// Anchor image plus its signed temporal difference. The discriminator sees
/// them stacked as six channels: anchor RGB then difference RGB.
struct PairSample {
  ImageBuffer anchor;
  ImageBuffer difference;
  PairLabel label = PairLabel::Real;

  FeatureMap to_input() const;
};

struct PairSet {
  PairSample real;  // (E_t, E_t - E_k)
  PairSample fake;  // (C_t, C_t - E_k)
};

PairSet make_pairs(const ImageBuffer& edited_t, const ImageBuffer& edited_k,
                   const ImageBuffer& rendered_t);

struct DiscriminatorLoss {
  double value = 0.0;
  std::vector<double> gradient;  // d value / d discriminator parameters
};

/// mean(-log D(real)) + mean(-log(1 - D(fake))) over the patch logit maps,
/// evaluated with log-sigmoid so large logits stay finite.
DiscriminatorLoss d_loss(const Discriminator& disc, const PairSample& real,
                         const PairSample& fake);

struct GeneratorLoss {
  double value = 0.0;
  ImageBuffer pixel_gradient;  // d value / d rendered image (both channel groups)
};

/// mean(-log D(fake)); the discriminator is held constant.
GeneratorLoss g_loss(const Discriminator& disc, const PairSample& fake);

/// log(1 + exp(z)) without overflow.
double softplus(double z);

}  // namespace wabe
