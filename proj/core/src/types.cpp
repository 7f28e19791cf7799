#include "wabe/core/types.hpp"

#include "wabe/core/error.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace wabe {

GaussianGrad& GaussianGrad::operator+=(const GaussianGrad& other) {
  position += other.position;
  rotation += other.rotation;
  log_scale += other.log_scale;
  opacity_logit += other.opacity_logit;
  color += other.color;
  return *this;
}

GaussianGrad& GaussianGrad::operator*=(double factor) {
  position *= factor;
  rotation *= factor;
  log_scale *= factor;
  opacity_logit *= factor;
  color *= factor;
  return *this;
}

bool GaussianGrad::all_finite() const {
  return position.allFinite() && rotation.allFinite() && log_scale.allFinite() &&
         std::isfinite(opacity_logit) && color.allFinite();
}

void GradBuffer::zero() {
  for (auto& e : entries) e = GaussianGrad{};
}

bool GradBuffer::all_finite() const {
  for (const auto& e : entries) {
    if (!e.all_finite()) return false;
  }
  return true;
}

GradBuffer& GradBuffer::operator+=(const GradBuffer& other) {
  if (other.size() != size()) {
    throw ContractViolation("GradBuffer size mismatch in accumulation");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i] += other.entries[i];
  return *this;
}

std::vector<double> pack_parameters(std::span<const Gaussian3D> gaussians) {
  std::vector<double> flat;
  flat.reserve(gaussians.size() * kParamsPerGaussian);
  for (const auto& g : gaussians) {
    flat.insert(flat.end(), g.position_local.data(), g.position_local.data() + 3);
    flat.insert(flat.end(), g.rotation_local.data(), g.rotation_local.data() + 4);
    flat.insert(flat.end(), g.log_scale.data(), g.log_scale.data() + 3);
    flat.push_back(g.opacity_logit);
    flat.insert(flat.end(), g.color.data(), g.color.data() + 3);
  }
  return flat;
}

void unpack_parameters(std::span<const double> flat, std::span<Gaussian3D> gaussians) {
  if (flat.size() != gaussians.size() * kParamsPerGaussian) {
    throw ContractViolation("flat parameter vector has the wrong length");
  }
  const double* p = flat.data();
  for (auto& g : gaussians) {
    for (int i = 0; i < 3; ++i) g.position_local[i] = *p++;
    for (int i = 0; i < 4; ++i) g.rotation_local[i] = *p++;
    for (int i = 0; i < 3; ++i) g.log_scale[i] = *p++;
    g.opacity_logit = *p++;
    for (int i = 0; i < 3; ++i) g.color[i] = *p++;
  }
}

std::vector<double> pack_gradients(const GradBuffer& grads) {
  std::vector<double> flat;
  flat.reserve(grads.size() * kParamsPerGaussian);
  for (const auto& g : grads.entries) {
    flat.insert(flat.end(), g.position.data(), g.position.data() + 3);
    flat.insert(flat.end(), g.rotation.data(), g.rotation.data() + 4);
    flat.insert(flat.end(), g.log_scale.data(), g.log_scale.data() + 3);
    flat.push_back(g.opacity_logit);
    flat.insert(flat.end(), g.color.data(), g.color.data() + 3);
  }
  return flat;
}

void Camera::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error("camera focal lengths must be positive (fx=" + std::to_string(fx) +
                ", fy=" + std::to_string(fy) + ")");
  }
  if (width <= 0 || height <= 0) {
    throw Error("camera image size must be positive (" + std::to_string(width) + "x" +
                std::to_string(height) + ")");
  }
  if (!rotation.allFinite() || !translation.allFinite() || !std::isfinite(cx) ||
      !std::isfinite(cy)) {
    throw Error("camera has non-finite parameters");
  }
}

std::uint64_t fnv1a64(std::span<const double> values) {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace wabe
