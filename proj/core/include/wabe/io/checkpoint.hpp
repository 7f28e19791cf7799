#pragma once

#include "wabe/adversarial/discriminator.hpp"
#include "wabe/avatar/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace wabe {

inline constexpr std::string_view kDiscriminatorMagic = "WABEDISC";
inline constexpr std::uint32_t kDiscriminatorVersion = 1;

/// Magic, version, layer count, six uint32 per layer (in, out, kernel,
/// stride, padding, leaky), then every parameter as a little-endian float32.
std::string encode_discriminator(const Discriminator& disc);
Discriminator decode_discriminator(std::string_view bytes, const std::string& origin = "<memory>");

void save_discriminator(const Discriminator& disc, const std::filesystem::path& path);
Discriminator load_discriminator(const std::filesystem::path& path);

/// Writes `avatar_<iteration>.json` and `discriminator_<iteration>.bin` into
/// `dir`, creating it if needed. Iterations are zero-padded to six digits.
void write_checkpoint(const std::filesystem::path& dir, int iteration, const Scene& scene,
                      const Discriminator& disc);

}  // namespace wabe
