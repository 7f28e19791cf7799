#include "wabe/core/image.hpp"

#include "wabe/core/error.hpp"

#include <cmath>
#include <string>

namespace wabe {

ImageBuffer::ImageBuffer(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error("image dimensions must be non-negative");
  }
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * kChannels,
                 fill);
}

bool ImageBuffer::all_finite() const {
  for (double v : pixels_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(std::string(what) + ": image dimensions differ (" + std::to_string(a.width()) +
                "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                std::to_string(b.height()) + ")");
  }
}

}  // namespace wabe
