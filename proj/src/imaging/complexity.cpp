#include "collage/imaging/complexity.hpp"

#include <algorithm>
#include <cmath>

#include "collage/errors.hpp"

namespace collage::imaging {

namespace {

void require_3x3(int height, int width) {
  if (height < 3 || width < 3) throw DimensionError("complexity needs at least a 3x3 image");
}

inline float sample(std::span<const float> p, int h, int w, int y, int x) {
  y = std::clamp(y, 0, h - 1);
  x = std::clamp(x, 0, w - 1);
  return p[static_cast<std::size_t>(y) * w + x];
}

inline double sobel_at(std::span<const float> p, int h, int w, int y, int x) {
  const double tl = sample(p, h, w, y - 1, x - 1), tc = sample(p, h, w, y - 1, x),
               tr = sample(p, h, w, y - 1, x + 1);
  const double ml = sample(p, h, w, y, x - 1), mr = sample(p, h, w, y, x + 1);
  const double bl = sample(p, h, w, y + 1, x - 1), bc = sample(p, h, w, y + 1, x),
               br = sample(p, h, w, y + 1, x + 1);
  const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
  const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
  return std::sqrt(gx * gx + gy * gy);
}

}  // namespace

std::vector<float> sobel_magnitude(std::span<const float> plane, int height, int width) {
  require_3x3(height, width);
  if (plane.size() != static_cast<std::size_t>(height) * width)
    throw DimensionError("sobel: plane size does not match extent");
  std::vector<float> out(plane.size());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out[static_cast<std::size_t>(y) * width + x] =
          static_cast<float>(sobel_at(plane, height, width, y, x));
  return out;
}

double complexity(const ImagePlane& img) {
  require_3x3(img.height(), img.width());
  const int h = img.height(), w = img.width();
  double total = 0.0;
  for (int c = 0; c < ImagePlane::kChannels; ++c) {
    const auto plane = img.channel(c);
#pragma omp parallel for schedule(static) reduction(+ : total)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) total += sobel_at(plane, h, w, y, x);
  }
  return total / (static_cast<double>(img.size()) * kSobelMaxMagnitude);
}

namespace serial {

// Explicitly padded copy convolved with the full 3x3 kernels.
double complexity(const ImagePlane& img) {
  require_3x3(img.height(), img.width());
  static constexpr int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static constexpr int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  const int h = img.height(), w = img.width();
  const int ph = h + 2, pw = w + 2;
  std::vector<double> padded(static_cast<std::size_t>(ph) * pw);
  double total = 0.0;
  for (int c = 0; c < ImagePlane::kChannels; ++c) {
    for (int y = 0; y < ph; ++y)
      for (int x = 0; x < pw; ++x)
        padded[static_cast<std::size_t>(y) * pw + x] =
            img.at(c, std::clamp(y - 1, 0, h - 1), std::clamp(x - 1, 0, w - 1));
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double gx = 0.0, gy = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            const double v = padded[static_cast<std::size_t>(y + i) * pw + x + j];
            gx += kx[i][j] * v;
            gy += ky[i][j] * v;
          }
        total += std::sqrt(gx * gx + gy * gy);
      }
  }
  return total / (static_cast<double>(img.size()) * kSobelMaxMagnitude);
}

}  // namespace serial

}  // namespace collage::imaging
