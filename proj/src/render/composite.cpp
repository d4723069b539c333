#include "collage/render/composite.hpp"

#include <algorithm>
#include <cmath>

#include "collage/errors.hpp"
#include "collage/render/geometry.hpp"

namespace collage::render {

namespace {

struct Warp {
  double cos_a, sin_a;
  double glue_x, glue_y;
  double cut_x, cut_y;

  Warp(const ActionVector& a, const imaging::ImagePlane& canvas,
       const imaging::ImagePlane& material) {
    const double phi = a.angle();
    cos_a = std::cos(phi);
    sin_a = std::sin(phi);
    glue_x = a[kXGlue] * (canvas.width() - 1.0);
    glue_y = a[kYGlue] * (canvas.height() - 1.0);
    cut_x = a[kXCut] * (material.width() - 1.0);
    cut_y = a[kYCut] * (material.height() - 1.0);
  }

  // Canvas pixel -> material coordinate (inverse rotation about the glue point).
  void to_material(int x, int y, double& mx, double& my) const {
    const double dx = x - glue_x;
    const double dy = y - glue_y;
    mx = cos_a * dx + sin_a * dy + cut_x;
    my = -sin_a * dx + cos_a * dy + cut_y;
  }
};

// Bilinear tap with zero fill outside the grid.
template <typename Fetch>
double bilinear_zero(double px, double py, int h, int w, Fetch fetch) {
  const double fx = std::floor(px), fy = std::floor(py);
  const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  const double tx = px - fx, ty = py - fy;
  double acc = 0.0;
  const int xs[2] = {x0, x0 + 1};
  const int ys[2] = {y0, y0 + 1};
  const double wx[2] = {1.0 - tx, tx};
  const double wy[2] = {1.0 - ty, ty};
  for (int j = 0; j < 2; ++j) {
    if (ys[j] < 0 || ys[j] >= h) continue;
    for (int i = 0; i < 2; ++i) {
      if (xs[i] < 0 || xs[i] >= w) continue;
      acc += wx[i] * wy[j] * fetch(ys[j], xs[i]);
    }
  }
  return acc;
}

// Cubic B-spline tap with zero fill outside the grid.
template <typename Fetch>
double bspline_zero(double px, double py, int h, int w, Fetch fetch) {
  auto weights = [](double t, double* out) {
    const double u = 1.0 - t;
    out[0] = u * u * u / 6.0;
    out[1] = (3.0 * t * t * t - 6.0 * t * t + 4.0) / 6.0;
    out[2] = (-3.0 * t * t * t + 3.0 * t * t + 3.0 * t + 1.0) / 6.0;
    out[3] = t * t * t / 6.0;
  };
  const double fx = std::floor(px), fy = std::floor(py);
  const int x0 = static_cast<int>(fx) - 1, y0 = static_cast<int>(fy) - 1;
  double wx[4], wy[4];
  weights(px - fx, wx);
  weights(py - fy, wy);
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    const int r = y0 + j;
    if (r < 0 || r >= h) continue;
    for (int i = 0; i < 4; ++i) {
      const int q = x0 + i;
      if (q < 0 || q >= w) continue;
      acc += wx[i] * wy[j] * fetch(r, q);
    }
  }
  return acc;
}

template <typename Fetch>
double filtered_zero(MaskSampling sampling, double px, double py, int h, int w, Fetch fetch) {
  return sampling == MaskSampling::kBSpline ? bspline_zero(px, py, h, w, fetch)
                                            : bilinear_zero(px, py, h, w, fetch);
}

double bilinear_clamped(const imaging::ImagePlane& img, int c, double px, double py) {
  px = std::clamp(px, 0.0, img.width() - 1.0);
  py = std::clamp(py, 0.0, img.height() - 1.0);
  const int x0 = static_cast<int>(std::floor(px)), y0 = static_cast<int>(std::floor(py));
  const int x1 = std::min(x0 + 1, img.width() - 1), y1 = std::min(y0 + 1, img.height() - 1);
  const double tx = px - x0, ty = py - y0;
  return (1 - ty) * ((1 - tx) * img.at(c, y0, x0) + tx * img.at(c, y0, x1)) +
         ty * ((1 - tx) * img.at(c, y1, x0) + tx * img.at(c, y1, x1));
}

bool nearest_index(double px, double py, int h, int w, int& ix, int& iy) {
  ix = static_cast<int>(std::lround(px));
  iy = static_cast<int>(std::lround(py));
  return ix >= 0 && ix < w && iy >= 0 && iy < h;
}

void require_mask_shape(const imaging::ImagePlane& material, const imaging::Mask& mask) {
  if (mask.height != material.height() || mask.width != material.width())
    throw DimensionError("mask resolution must equal material resolution");
}

// Writes the composite of one canvas pixel into out for all channels.
inline void composite_pixel(const imaging::ImagePlane& canvas,
                            const imaging::ImagePlane& material, const imaging::Mask& mask,
                            const Warp& warp, MaskSampling sampling, int x, int y,
                            imaging::ImagePlane& out) {
  double mx, my;
  warp.to_material(x, y, mx, my);
  const int mh = material.height(), mw = material.width();
  if (sampling == MaskSampling::kNearest) {
    int ix, iy;
    const double m = nearest_index(mx, my, mh, mw, ix, iy) ? mask.at(iy, ix) : 0.0;
    if (m <= 0.0) return;
    for (int c = 0; c < imaging::ImagePlane::kChannels; ++c) {
      const double v = canvas.at(c, y, x) * (1.0 - m) + m * bilinear_clamped(material, c, mx, my);
      out.at(c, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return;
  }
  const double m =
      filtered_zero(sampling, mx, my, mh, mw, [&](int r, int q) { return mask.at(r, q); });
  if (m <= 0.0) return;
  for (int c = 0; c < imaging::ImagePlane::kChannels; ++c) {
    const double paint = filtered_zero(
        sampling, mx, my, mh, mw, [&](int r, int q) { return material.at(c, r, q) * mask.at(r, q); });
    const double v = canvas.at(c, y, x) * (1.0 - m) + paint;
    out.at(c, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
}

}  // namespace

imaging::ImagePlane warp_and_composite(const imaging::ImagePlane& canvas,
                                       const imaging::ImagePlane& material,
                                       const imaging::Mask& mask, const ActionVector& action,
                                       MaskSampling sampling) {
  require_mask_shape(material, mask);
  imaging::ImagePlane out = canvas;
  const Warp warp(action.clamped(), canvas, material);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < canvas.height(); ++y)
    for (int x = 0; x < canvas.width(); ++x)
      composite_pixel(canvas, material, mask, warp, sampling, x, y, out);
  return out;
}

imaging::ImagePlane transition_exact(const imaging::ImagePlane& canvas,
                                     const imaging::ImagePlane& material,
                                     const ActionVector& action) {
  if (!action.accepts()) return canvas;
  const QuadSpec quad = decode_action(action, material.height(), material.width());
  const imaging::Mask mask =
      rasterize_mask_exact(quad, action[kAcceptor], material.height(), material.width());
  return warp_and_composite(canvas, material, mask, action, MaskSampling::kNearest);
}

namespace serial {

imaging::ImagePlane warp_and_composite(const imaging::ImagePlane& canvas,
                                       const imaging::ImagePlane& material,
                                       const imaging::Mask& mask, const ActionVector& action,
                                       MaskSampling sampling) {
  require_mask_shape(material, mask);
  imaging::ImagePlane out = canvas;
  const Warp warp(action.clamped(), canvas, material);
  for (int y = 0; y < canvas.height(); ++y)
    for (int x = 0; x < canvas.width(); ++x)
      composite_pixel(canvas, material, mask, warp, sampling, x, y, out);
  return out;
}

}  // namespace serial

}  // namespace collage::render
