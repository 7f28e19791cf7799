#include "generators.hpp"

#include "wabe/core/error.hpp"
#include "wabe/editor/editor.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wabe;
using testsupport::Gen;

TEST(Editor, IdentityWithoutJitterIsExact) {
  Gen gen(71);
  const ImageBuffer img = gen.image(13, 9);
  EXPECT_EQ(edit(img, EditSpec{}, 2, 5), img);
  EXPECT_EQ(noise_free_target(img, EditSpec{}), img);
}

TEST(Editor, GrayIsFixedUnderHueAndContrast) {
  const ImageBuffer gray(4, 4, 0.5);
  EditSpec spec;
  spec.prompt_id = 1;
  const ImageBuffer out = edit(gray, spec, 0, 0);
  for (double v : out.data()) EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(Editor, RedRecolorByHand) {
  // Luminance here is the plain channel mean, 0.4.
  ImageBuffer img(1, 1);
  img.at(0, 0, 0) = 0.2;
  img.at(0, 0, 1) = 0.4;
  img.at(0, 0, 2) = 0.6;
  EditSpec spec;
  spec.prompt_id = 4;
  const double lum = 0.4;
  const ImageBuffer out = edit(img, spec, 0, 0);
  EXPECT_NEAR(out.at(0, 0, 0), 1.5 * lum, 1e-12);
  EXPECT_NEAR(out.at(0, 0, 1), 0.75 * lum, 1e-12);
  EXPECT_NEAR(out.at(0, 0, 2), 0.75 * lum, 1e-12);
}

TEST(Editor, DeterministicPerSeedViewTime) {
  Gen gen(72);
  const ImageBuffer img = gen.image(8, 8);
  EditSpec spec{3, 0.2, 44};
  EXPECT_EQ(edit(img, spec, 1, 2), edit(img, spec, 1, 2));
  EXPECT_NE(edit(img, spec, 1, 2), edit(img, spec, 1, 3));
  EXPECT_NE(edit(img, spec, 1, 2), edit(img, spec, 0, 2));
  EditSpec other = spec;
  other.seed = 45;
  EXPECT_NE(edit(img, spec, 1, 2), edit(img, other, 1, 2));
}

TEST(Editor, OutputAlwaysInUnitRange) {
  Gen gen(73);
  for (int p = 0; p < kEditPresetCount; ++p) {
    EditSpec spec{p, 0.5, 9};
    for (int t = 0; t < 10; ++t) {
      const ImageBuffer out = edit(gen.image(6, 6), spec, 0, t);
      for (double v : out.data()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Editor, JitterStaysInBand) {
  EditSpec spec{0, 0.1, 5};
  for (int v = 0; v < 4; ++v) {
    for (int t = 0; t < 50; ++t) {
      const Jitter j = edit_jitter(spec, v, t);
      EXPECT_LE(std::abs(j.gain - 1.0), 0.1);
      EXPECT_LE(std::abs(j.bias), 0.05);
    }
  }
  const Jitter none = edit_jitter(EditSpec{2, 0.0, 5}, 1, 1);
  EXPECT_EQ(none.gain, 1.0);
  EXPECT_EQ(none.bias, 0.0);
}

TEST(Editor, JitterIsZeroMeanAcrossSeeds) {
  // Uniform on [-sigma, sigma] has variance sigma^2 / 3; require the sample
  // mean within three standard errors of the nominal value.
  const double sigma = 0.1;
  const int n = 1000;
  double gain = 0.0, bias = 0.0;
  for (int s = 0; s < n; ++s) {
    const Jitter j = edit_jitter(EditSpec{0, sigma, static_cast<std::uint64_t>(s)}, 0, 0);
    gain += j.gain;
    bias += j.bias;
  }
  const double se_gain = sigma / std::sqrt(3.0 * n);
  EXPECT_LT(std::abs(gain / n - 1.0), 3 * se_gain);
  EXPECT_LT(std::abs(bias / n), 3 * se_gain / 2);
}

TEST(Editor, NoiseFreeTargetMatchesZeroSigma) {
  Gen gen(74);
  const ImageBuffer img = gen.image(7, 11);
  for (int p = 0; p < kEditPresetCount; ++p) {
    EXPECT_EQ(noise_free_target(img, EditSpec{p, 0.3, 1}), edit(img, EditSpec{p, 0.0, 1}, 3, 4));
  }
}

TEST(Editor, BrightnessRampRunsTopToBottom) {
  const ImageBuffer img(2, 5, 0.5);
  const ImageBuffer out = edit(img, EditSpec{3, 0.0, 0}, 0, 0);
  EXPECT_NEAR(out.at(0, 0, 0), 0.3, 1e-12);
  EXPECT_NEAR(out.at(0, 4, 0), 0.7, 1e-12);
  EXPECT_LT(out.at(1, 1, 1), out.at(1, 3, 1));
}

TEST(Editor, ValidationRejectsBadSpecs) {
  EXPECT_THROW(edit(ImageBuffer(2, 2), EditSpec{5, 0.0, 0}, 0, 0), Error);
  EXPECT_THROW(edit(ImageBuffer(2, 2), EditSpec{-1, 0.0, 0}, 0, 0), Error);
  EXPECT_THROW(edit(ImageBuffer(2, 2), EditSpec{0, -0.1, 0}, 0, 0), Error);
  EXPECT_THROW(edit_preset_name(7), Error);
  EXPECT_FALSE(edit_preset_name(4).empty());
}
