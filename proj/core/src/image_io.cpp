#include "wabe/io/image_io.hpp"

#include "wabe/core/error.hpp"
#include "wabe/io/scene_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace wabe {

std::uint8_t quantize_channel(double v) {
  if (std::isnan(v)) v = 0.0;
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

std::string encode_ppm(const ImageBuffer& image) {
  std::string out = "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) +
                    "\n255\n";
  out.reserve(out.size() + image.size());
  for (double v : image.data()) out.push_back(static_cast<char>(quantize_channel(v)));
  return out;
}

namespace {

class HeaderScanner {
 public:
  HeaderScanner(std::string_view bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(origin_ + ": malformed PPM at byte " + std::to_string(pos_) + ": " + what);
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000) fail("header value too large");
      ++pos_;
    }
    if (pos_ == start) fail("expected a decimal number");
    return v;
  }

  void expect_magic() {
    if (bytes_.substr(0, 2) != "P6") fail("expected magic 'P6'");
    pos_ = 2;
  }

  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("expected whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string_view bytes_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

}  // namespace

ImageBuffer decode_ppm(std::string_view bytes, const std::string& origin) {
  HeaderScanner scan(bytes, origin);
  scan.expect_magic();
  const long width = scan.number();
  const long height = scan.number();
  const long maxval = scan.number();
  if (width <= 0 || height <= 0) scan.fail("image dimensions must be positive");
  if (maxval != 255) scan.fail("only maxval 255 is supported");
  scan.single_whitespace();
  const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  if (bytes.size() - scan.pos() < need) {
    throw Error(origin + ": truncated PPM at byte " + std::to_string(bytes.size()) + ": expected " +
                std::to_string(need) + " pixel bytes after offset " + std::to_string(scan.pos()));
  }
  ImageBuffer image(static_cast<int>(width), static_cast<int>(height));
  auto px = image.data();
  for (std::size_t i = 0; i < need; ++i) {
    px[i] = static_cast<unsigned char>(bytes[scan.pos() + i]) / 255.0;
  }
  return image;
}

void write_image(const ImageBuffer& image, const std::filesystem::path& path) {
  write_text_file(path, encode_ppm(image));
}

ImageBuffer read_image(const std::filesystem::path& path) {
  return decode_ppm(read_text_file(path), path.string());
}

}  // namespace wabe
