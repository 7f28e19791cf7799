#pragma once

#include "wabe/core/image.hpp"

#include <cstdint>
#include <string>

namespace wabe {

/// Deterministic stand-in for an instruction-driven image editor.
///
/// Presets:
///   0 identity
///   1 hue rotation by 60 degrees about the gray axis, contrast 1.2 about 0.5
///   2 "bronze" channel mix
///   3 brightness ramp down the image (gain 0.6 at the top, 1.4 at the bottom)
///   4 recolor red: luminance times (1.5, 0.75, 0.75)
///
/// With jitter_sigma > 0, each (seed, view, time) gets its own gain
/// g in 1 +- sigma and bias b in +- sigma / 2, applied after the preset.
struct EditSpec {
  int prompt_id = 0;
  double jitter_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Throws wabe::Error on an unknown preset or a negative or non-finite sigma.
  void validate() const;
  bool operator==(const EditSpec&) const = default;
};

inline constexpr int kEditPresetCount = 5;

std::string edit_preset_name(int prompt_id);

/// Output is clamped to [0, 1].
ImageBuffer edit(const ImageBuffer& image, const EditSpec& spec, int view, int time);

/// The preset alone, without jitter.
ImageBuffer noise_free_target(const ImageBuffer& image, const EditSpec& spec);

struct Jitter {
  double gain = 1.0;
  double bias = 0.0;
};

/// The per-frame jitter drawn for (seed, view, time).
Jitter edit_jitter(const EditSpec& spec, int view, int time);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace wabe
