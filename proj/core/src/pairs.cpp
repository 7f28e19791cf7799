#include "wabe/adversarial/pairs.hpp"

#include "wabe/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace wabe {

namespace {

ImageBuffer subtract(const ImageBuffer& a, const ImageBuffer& b) {
  ImageBuffer out(a.width(), a.height());
  auto o = out.data();
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] - y[i];
  return out;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

FeatureMap PairSample::to_input() const {
  require_same_shape(anchor, difference, "pair anchor and difference");
  FeatureMap f(6, anchor.height(), anchor.width());
  for (int y = 0; y < anchor.height(); ++y) {
    for (int x = 0; x < anchor.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        f.at(c, y, x) = anchor.at(x, y, c);
        f.at(3 + c, y, x) = difference.at(x, y, c);
      }
    }
  }
  return f;
}

PairSet make_pairs(const ImageBuffer& edited_t, const ImageBuffer& edited_k,
                   const ImageBuffer& rendered_t) {
  require_same_shape(edited_t, edited_k, "edited frames t and k");
  require_same_shape(edited_t, rendered_t, "edited and rendered frame t");
  PairSet set;
  set.real = {edited_t, subtract(edited_t, edited_k), PairLabel::Real};
  set.fake = {rendered_t, subtract(rendered_t, edited_k), PairLabel::Fake};
  return set;
}

DiscriminatorLoss d_loss(const Discriminator& disc, const PairSample& real,
                         const PairSample& fake) {
  DiscriminatorLoss out;
  out.gradient.assign(disc.parameter_count(), 0.0);

  // -log sigmoid(l) = softplus(-l); -log(1 - sigmoid(l)) = softplus(l).
  for (int branch = 0; branch < 2; ++branch) {
    const bool is_real = branch == 0;
    Discriminator::Trace trace;
    const FeatureMap logits = disc.forward((is_real ? real : fake).to_input(), &trace);
    const double n = static_cast<double>(logits.data.size());
    FeatureMap grad(logits.channels, logits.height, logits.width);
    for (std::size_t i = 0; i < logits.data.size(); ++i) {
      const double l = logits.data[i];
      if (is_real) {
        out.value += softplus(-l) / n;
        grad.data[i] = -sigmoid(-l) / n;
      } else {
        out.value += softplus(l) / n;
        grad.data[i] = sigmoid(l) / n;
      }
    }
    disc.backward(trace, grad, out.gradient, nullptr);
  }
  return out;
}

GeneratorLoss g_loss(const Discriminator& disc, const PairSample& fake) {
  Discriminator::Trace trace;
  const FeatureMap logits = disc.forward(fake.to_input(), &trace);
  const double n = static_cast<double>(logits.data.size());
  GeneratorLoss out;
  FeatureMap grad(logits.channels, logits.height, logits.width);
  for (std::size_t i = 0; i < logits.data.size(); ++i) {
    out.value += softplus(-logits.data[i]) / n;
    grad.data[i] = -sigmoid(-logits.data[i]) / n;
  }
  FeatureMap input_grad;
  disc.backward(trace, grad, {}, &input_grad);

  // The rendered frame appears as the anchor and as the minuend of the
  // difference, so both channel groups flow back to it.
  out.pixel_gradient = ImageBuffer(fake.anchor.width(), fake.anchor.height());
  for (int y = 0; y < fake.anchor.height(); ++y) {
    for (int x = 0; x < fake.anchor.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        out.pixel_gradient.at(x, y, c) = input_grad.at(c, y, x) + input_grad.at(3 + c, y, x);
      }
    }
  }
  return out;
}

}  // namespace wabe
