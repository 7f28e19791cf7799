#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wabe {

/// Row-major H x W x 3 image of doubles, nominally in [0, 1].
class ImageBuffer {
 public:
  static constexpr int kChannels = 3;

  ImageBuffer() = default;
  ImageBuffer(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  double& at(int x, int y, int c) { return pixels_[index(x, y, c)]; }
  double at(int x, int y, int c) const { return pixels_[index(x, y, c)]; }

  std::span<double> data() { return pixels_; }
  std::span<const double> data() const { return pixels_; }

  bool same_shape(const ImageBuffer& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool all_finite() const;

  bool operator==(const ImageBuffer& other) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * kChannels + static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

/// Throws wabe::Error naming `what` when the shapes differ.
void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* what);

}  // namespace wabe
