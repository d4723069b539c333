#include "collage/imaging/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "collage/errors.hpp"

namespace collage::imaging {

namespace {

void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.height()) +
                         "x" + std::to_string(a.width()) + " vs " + std::to_string(b.height()) +
                         "x" + std::to_string(b.width()));
  }
}

void require_ssim_extent(const ImagePlane& a, const SsimParams& p) {
  if (a.height() < p.window || a.width() < p.window) {
    throw DimensionError("ssim: image smaller than the " + std::to_string(p.window) + "x" +
                         std::to_string(p.window) + " window");
  }
}

std::vector<double> gaussian_1d(int size, double sigma) {
  std::vector<double> k(size);
  const double centre = (size - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - centre;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    total += k[i];
  }
  for (double& v : k) v /= total;
  return k;
}

double ssim_pixel(double mx, double my, double sxx, double syy, double sxy, double c1, double c2) {
  return ((2.0 * mx * my + c1) * (2.0 * sxy + c2)) /
         ((mx * mx + my * my + c1) * (sxx + syy + c2));
}

// Separable Gaussian statistics over the valid region of one channel pair.
double ssim_channel(std::span<const float> x, std::span<const float> y, int h, int w,
                    const SsimParams& p) {
  const auto k = gaussian_1d(p.window, p.sigma);
  const int oh = h - p.window + 1;
  const int ow = w - p.window + 1;
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

  // Horizontal pass: five moment images of size h x ow.
  std::vector<double> hx(static_cast<std::size_t>(h) * ow), hy(hx.size()), hxx(hx.size()),
      hyy(hx.size()), hxy(hx.size());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (int t = 0; t < p.window; ++t) {
        const auto i = static_cast<std::size_t>(r) * w + c + t;
        const double a = x[i], b = y[i];
        sx += k[t] * a;
        sy += k[t] * b;
        sxx += k[t] * a * a;
        syy += k[t] * b * b;
        sxy += k[t] * a * b;
      }
      const auto o = static_cast<std::size_t>(r) * ow + c;
      hx[o] = sx;
      hy[o] = sy;
      hxx[o] = sxx;
      hyy[o] = syy;
      hxy[o] = sxy;
    }
  }

  double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total)
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int t = 0; t < p.window; ++t) {
        const auto i = static_cast<std::size_t>(r + t) * ow + c;
        mx += k[t] * hx[i];
        my += k[t] * hy[i];
        sxx += k[t] * hxx[i];
        syy += k[t] * hyy[i];
        sxy += k[t] * hxy[i];
      }
      total += ssim_pixel(mx, my, sxx - mx * mx, syy - my * my, sxy - mx * my, c1, c2);
    }
  }
  return total / (static_cast<double>(oh) * ow);
}

}  // namespace

double mse(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "mse");
  const auto da = a.data();
  const auto db = b.data();
  const auto n = static_cast<std::ptrdiff_t>(da.size());
  double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(da[i]) - db[i];
    total += d * d;
  }
  return total / static_cast<double>(n);
}

double psnr_from_mse(double mse_value) {
  if (mse_value < kPsnrMseFloor) return kPsnrCapDb;
  return 10.0 * std::log10(1.0 / mse_value);
}

double psnr(const ImagePlane& a, const ImagePlane& b) { return psnr_from_mse(mse(a, b)); }

double ssim(const ImagePlane& a, const ImagePlane& b, const SsimParams& params) {
  require_same_shape(a, b, "ssim");
  require_ssim_extent(a, params);
  double total = 0.0;
  for (int c = 0; c < ImagePlane::kChannels; ++c)
    total += ssim_channel(a.channel(c), b.channel(c), a.height(), a.width(), params);
  return total / ImagePlane::kChannels;
}

namespace serial {

double mse(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "mse");
  double total = 0.0;
  for (int c = 0; c < ImagePlane::kChannels; ++c)
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x) {
        const double d = static_cast<double>(a.at(c, y, x)) - b.at(c, y, x);
        total += d * d;
      }
  return total / static_cast<double>(a.size());
}

// Direct 2-D window evaluation, no separable factorisation.
double ssim(const ImagePlane& a, const ImagePlane& b, const SsimParams& p) {
  require_same_shape(a, b, "ssim");
  require_ssim_extent(a, p);
  const auto k = gaussian_1d(p.window, p.sigma);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  const int oh = a.height() - p.window + 1;
  const int ow = a.width() - p.window + 1;
  double total = 0.0;
  for (int ch = 0; ch < ImagePlane::kChannels; ++ch) {
    double channel_total = 0.0;
    for (int r = 0; r < oh; ++r)
      for (int c = 0; c < ow; ++c) {
        double mx = 0, my = 0;
        for (int i = 0; i < p.window; ++i)
          for (int j = 0; j < p.window; ++j) {
            const double wgt = k[i] * k[j];
            mx += wgt * a.at(ch, r + i, c + j);
            my += wgt * b.at(ch, r + i, c + j);
          }
        double vx = 0, vy = 0, cxy = 0;
        for (int i = 0; i < p.window; ++i)
          for (int j = 0; j < p.window; ++j) {
            const double wgt = k[i] * k[j];
            const double dx = a.at(ch, r + i, c + j) - mx;
            const double dy = b.at(ch, r + i, c + j) - my;
            vx += wgt * dx * dx;
            vy += wgt * dy * dy;
            cxy += wgt * dx * dy;
          }
        channel_total += ssim_pixel(mx, my, vx, vy, cxy, c1, c2);
      }
    total += channel_total / (static_cast<double>(oh) * ow);
  }
  return total / ImagePlane::kChannels;
}

}  // namespace serial

}  // namespace collage::imaging
