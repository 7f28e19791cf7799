#pragma once

#include "wabe/avatar/scene.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace wabe {

inline constexpr std::string_view kSceneVersion = "wabe-splat/1";

/// Strict parse of a scene document. Unknown or missing fields, wrong types,
/// non-finite numbers and dangling indices throw wabe::Error naming the field
/// path and `origin`.
Scene parse_scene(std::string_view text, const std::string& origin = "<memory>");
std::string serialize_scene(const Scene& scene);

Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

/// Whole-file helpers shared by the loaders. Throw wabe::Error with the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace wabe
