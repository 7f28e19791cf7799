#include "wabe/core/error.hpp"
#include "wabe/losses/losses.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace wabe {
namespace {

constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

using Window = std::array<double, kSsimWindow>;

const Window& gaussian_window() {
  static const Window window = [] {
    Window w{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
      const double d = i - kSsimWindow / 2;
      w[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
      sum += w[i];
    }
    for (auto& v : w) v /= sum;
    return w;
  }();
  return window;
}

/// Single-channel plane with a valid-mode separable Gaussian filter and its
/// adjoint.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  Plane(int w, int h) : width(w), height(h), v(static_cast<std::size_t>(w) * h, 0.0) {}
  double& operator()(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
  double operator()(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

Plane filter_valid(const Plane& in) {
  const Window& g = gaussian_window();
  const int ow = in.width - kSsimWindow + 1;
  const int oh = in.height - kSsimWindow + 1;
  Plane rows(ow, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) s += g[k] * in(x + k, y);
      rows(x, y) = s;
    }
  }
  Plane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) s += g[k] * rows(x, y + k);
      out(x, y) = s;
    }
  }
  return out;
}

Plane filter_valid_adjoint(const Plane& in, int width, int height) {
  const Window& g = gaussian_window();
  Plane rows(in.width, height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const double v = in(x, y);
      for (int k = 0; k < kSsimWindow; ++k) rows(x, y + k) += g[k] * v;
    }
  }
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const double v = rows(x, y);
      for (int k = 0; k < kSsimWindow; ++k) out(x + k, y) += g[k] * v;
    }
  }
  return out;
}

Plane channel(const ImageBuffer& img, int c) {
  Plane p(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) p(x, y) = img.at(x, y, c);
  }
  return p;
}

Plane product(const Plane& a, const Plane& b) {
  Plane p(a.width, a.height);
  for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] = a.v[i] * b.v[i];
  return p;
}

void check_inputs(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b, "ssim");
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
    throw Error("ssim needs images of at least " + std::to_string(kSsimWindow) + "x" +
                std::to_string(kSsimWindow) + ", got " + std::to_string(a.width()) + "x" +
                std::to_string(a.height()));
  }
}

/// Returns mean SSIM; fills d(mean SSIM)/da when `grad` is non-null.
double ssim_impl(const ImageBuffer& a, const ImageBuffer& b, ImageBuffer* grad) {
  check_inputs(a, b);
  const int w = a.width();
  const int h = a.height();
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  const double norm = 1.0 / (3.0 * ow * oh);

  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const Plane x = channel(a, c);
    const Plane y = channel(b, c);
    const Plane mx = filter_valid(x);
    const Plane my = filter_valid(y);
    const Plane exx = filter_valid(product(x, x));
    const Plane eyy = filter_valid(product(y, y));
    const Plane exy = filter_valid(product(x, y));

    Plane d_mu(ow, oh), d_exx(ow, oh), d_exy(ow, oh);
    for (std::size_t i = 0; i < mx.v.size(); ++i) {
      const double ux = mx.v[i], uy = my.v[i];
      const double sxx = exx.v[i] - ux * ux;
      const double syy = eyy.v[i] - uy * uy;
      const double sxy = exy.v[i] - ux * uy;
      const double a1 = 2.0 * ux * uy + kC1;
      const double a2 = 2.0 * sxy + kC2;
      const double b1 = ux * ux + uy * uy + kC1;
      const double b2 = sxx + syy + kC2;
      const double s = (a1 * a2) / (b1 * b2);
      total += s;
      if (grad) {
        d_mu.v[i] = norm * s * (2.0 * uy / a1 - 2.0 * uy / a2 - 2.0 * ux / b1 + 2.0 * ux / b2);
        d_exx.v[i] = norm * (-s / b2);
        d_exy.v[i] = norm * (2.0 * s / a2);
      }
    }

    if (grad) {
      const Plane g_mu = filter_valid_adjoint(d_mu, w, h);
      const Plane g_exx = filter_valid_adjoint(d_exx, w, h);
      const Plane g_exy = filter_valid_adjoint(d_exy, w, h);
      for (int py = 0; py < h; ++py) {
        for (int px = 0; px < w; ++px) {
          grad->at(px, py, c) =
              g_mu(px, py) + 2.0 * x(px, py) * g_exx(px, py) + y(px, py) * g_exy(px, py);
        }
      }
    }
  }
  return total * norm;
}

}  // namespace

double ssim(const ImageBuffer& a, const ImageBuffer& b) { return ssim_impl(a, b, nullptr); }

ImageLoss dssim_loss(const ImageBuffer& a, const ImageBuffer& b) {
  ImageBuffer grad(a.width(), a.height());
  const double s = ssim_impl(a, b, &grad);
  for (double& g : grad.data()) g = -g;
  return ImageLoss{1.0 - s, std::move(grad)};
}

}  // namespace wabe
