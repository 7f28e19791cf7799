#include "wabe/editor/editor.hpp"

#include "wabe/core/error.hpp"
#include "wabe/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace wabe {

void EditSpec::validate() const {
  if (prompt_id < 0 || prompt_id >= kEditPresetCount) {
    throw Error("unknown edit prompt_id " + std::to_string(prompt_id));
  }
  if (!std::isfinite(jitter_sigma) || jitter_sigma < 0.0) {
    throw Error("edit jitter_sigma must be finite and >= 0");
  }
}

std::string edit_preset_name(int prompt_id) {
  switch (prompt_id) {
    case 0: return "identity";
    case 1: return "hue-rotate-60-contrast-1.2";
    case 2: return "bronze";
    case 3: return "brightness-ramp-y";
    case 4: return "recolor-red";
    default: throw Error("unknown edit prompt_id " + std::to_string(prompt_id));
  }
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace {

double unit_symmetric(std::uint64_t bits) {
  // 53 random bits mapped to [-1, 1].
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

Vec3 apply_preset(int prompt_id, const Vec3& v, int y, int height) {
  switch (prompt_id) {
    case 0:
      return v;
    case 1: {
      Mat3 hue;
      hue << 2.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0,
             2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0,
            -1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0;
      return (1.2 * (hue * v - Vec3::Constant(0.5))).array() + 0.5;
    }
    case 2: {
      Mat3 bronze;
      bronze << 0.55, 0.45, 0.15,
                0.35, 0.40, 0.10,
                0.15, 0.20, 0.10;
      return bronze * v;
    }
    case 3: {
      const double gain = height > 1 ? 0.6 + 0.8 * y / static_cast<double>(height - 1) : 1.0;
      return gain * v;
    }
    case 4: {
      const double lum = v.mean();
      return lum * Vec3(1.5, 0.75, 0.75);
    }
    default:
      throw Error("unknown edit prompt_id " + std::to_string(prompt_id));
  }
}

ImageBuffer apply(const ImageBuffer& image, const EditSpec& spec, const Jitter& jitter) {
  spec.validate();
  if (spec.prompt_id == 0 && jitter.gain == 1.0 && jitter.bias == 0.0) return image;
  ImageBuffer out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Vec3 v(image.at(x, y, 0), image.at(x, y, 1), image.at(x, y, 2));
      const Vec3 e = apply_preset(spec.prompt_id, v, y, image.height());
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = std::clamp(jitter.gain * e[c] + jitter.bias, 0.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace

Jitter edit_jitter(const EditSpec& spec, int view, int time) {
  if (spec.jitter_sigma == 0.0) return {};
  std::uint64_t h = mix64(spec.seed);
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(view)));
  h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(time)) << 32));
  const double u1 = unit_symmetric(h);
  const double u2 = unit_symmetric(mix64(h));
  return {1.0 + spec.jitter_sigma * u1, 0.5 * spec.jitter_sigma * u2};
}

ImageBuffer edit(const ImageBuffer& image, const EditSpec& spec, int view, int time) {
  return apply(image, spec, edit_jitter(spec, view, time));
}

ImageBuffer noise_free_target(const ImageBuffer& image, const EditSpec& spec) {
  return apply(image, spec, Jitter{});
}

}  // namespace wabe
