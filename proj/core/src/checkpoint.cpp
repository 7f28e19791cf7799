#include "wabe/io/checkpoint.hpp"

#include "wabe/core/error.hpp"
#include "wabe/io/scene_io.hpp"

#include <bit>
#include <cstdio>

namespace wabe {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

class ByteReader {
 public:
  ByteReader(std::string_view bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  std::uint32_t u32() {
    if (bytes_.size() - pos_ < 4) {
      throw Error(origin_ + ": truncated discriminator blob at byte " + std::to_string(pos_));
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_discriminator(const Discriminator& disc) {
  std::string out(kDiscriminatorMagic);
  put_u32(out, kDiscriminatorVersion);
  put_u32(out, static_cast<std::uint32_t>(disc.layers().size()));
  for (const ConvSpec& l : disc.layers()) {
    put_u32(out, static_cast<std::uint32_t>(l.in_channels));
    put_u32(out, static_cast<std::uint32_t>(l.out_channels));
    put_u32(out, static_cast<std::uint32_t>(l.kernel));
    put_u32(out, static_cast<std::uint32_t>(l.stride));
    put_u32(out, static_cast<std::uint32_t>(l.padding));
    put_u32(out, l.leaky_relu ? 1u : 0u);
  }
  for (double p : disc.parameters()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p)));
  return out;
}

Discriminator decode_discriminator(std::string_view bytes, const std::string& origin) {
  if (bytes.substr(0, kDiscriminatorMagic.size()) != kDiscriminatorMagic) {
    throw Error(origin + ": not a discriminator blob (bad magic at byte 0)");
  }
  ByteReader in(bytes, origin);
  in.seek(kDiscriminatorMagic.size());
  const std::size_t version_at = in.pos();
  const std::uint32_t version = in.u32();
  if (version != kDiscriminatorVersion) {
    throw Error(origin + ": unsupported discriminator version " + std::to_string(version) +
                " at byte " + std::to_string(version_at));
  }
  const std::uint32_t count = in.u32();
  if (count == 0 || count > 64) throw Error(origin + ": implausible layer count " + std::to_string(count));
  std::vector<ConvSpec> layers;
  std::size_t params = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    ConvSpec l;
    l.in_channels = static_cast<int>(in.u32());
    l.out_channels = static_cast<int>(in.u32());
    l.kernel = static_cast<int>(in.u32());
    l.stride = static_cast<int>(in.u32());
    l.padding = static_cast<int>(in.u32());
    l.leaky_relu = in.u32() != 0;
    params += l.weight_count() + static_cast<std::size_t>(l.out_channels);
    layers.push_back(l);
  }
  if (in.remaining() != params * 4) {
    throw Error(origin + ": discriminator blob holds " + std::to_string(in.remaining()) +
                " parameter bytes after byte " + std::to_string(in.pos()) + ", header implies " +
                std::to_string(params * 4));
  }
  std::vector<double> values(params);
  for (double& v : values) v = static_cast<double>(std::bit_cast<float>(in.u32()));
  return Discriminator(std::move(layers), std::move(values));
}

void save_discriminator(const Discriminator& disc, const std::filesystem::path& path) {
  write_text_file(path, encode_discriminator(disc));
}

Discriminator load_discriminator(const std::filesystem::path& path) {
  return decode_discriminator(read_text_file(path), path.string());
}

void write_checkpoint(const std::filesystem::path& dir, int iteration, const Scene& scene,
                      const Discriminator& disc) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create checkpoint directory '" + dir.string() + "': " + ec.message());
  char tag[16];
  std::snprintf(tag, sizeof tag, "%06d", iteration);
  save_scene(scene, dir / ("avatar_" + std::string(tag) + ".json"));
  save_discriminator(disc, dir / ("discriminator_" + std::string(tag) + ".bin"));
}

}  // namespace wabe
