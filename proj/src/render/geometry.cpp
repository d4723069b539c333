#include "collage/render/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace collage::render {

namespace {

// Half-extent clamped to the material's pixel edges [-0.5, extent - 0.5], then the centre
// shifted so the rectangle fits.
void fit_axis(double centre, double half, double extent, double& lo, double& hi) {
  half = std::min(half, extent / 2.0);
  centre = std::clamp(centre, half - 0.5, extent - 0.5 - half);
  lo = centre - half;
  hi = centre + half;
}

// x coordinates where the horizontal line at py crosses the polygon edges.
// Half-open rule on y so shared vertices are counted once.
std::vector<double> crossings(const std::array<Point, 4>& v, double py) {
  std::vector<double> xs;
  xs.reserve(4);
  for (std::size_t i = 0, j = 3; i < 4; j = i++) {
    const Point& a = v[i];
    const Point& b = v[j];
    if ((a.y > py) != (b.y > py)) xs.push_back(a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y));
  }
  return xs;
}

}  // namespace

QuadSpec decode_action(const ActionVector& raw, int material_height, int material_width) {
  const ActionVector a = raw.clamped();
  const double w = material_width;
  const double h = material_height;
  const double cx = a[kXCut] * (w - 1.0);
  const double cy = a[kYCut] * (h - 1.0);
  const double half_w = std::max(a[kWidth], kMinExtent) * w / 2.0;
  const double half_h = std::max(a[kHeight], kMinExtent) * h / 2.0;

  QuadSpec q;
  fit_axis(cx, half_w, w, q.rect.x0, q.rect.x1);
  fit_axis(cy, half_h, h, q.rect.y0, q.rect.y1);
  const double rw = q.rect.x1 - q.rect.x0;
  const double rh = q.rect.y1 - q.rect.y0;
  q.vertices[0] = {q.rect.x0 + a[kP1] * rw, q.rect.y0};
  q.vertices[1] = {q.rect.x1, q.rect.y0 + a[kP2] * rh};
  q.vertices[2] = {q.rect.x1 - a[kP3] * rw, q.rect.y1};
  q.vertices[3] = {q.rect.x0, q.rect.y1 - a[kP4] * rh};
  return q;
}

double shoelace_area(const std::array<Point, 4>& v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % 4];
    twice += a.x * b.y - b.x * a.y;
  }
  return twice / 2.0;
}

// Scanline fill: each row's edge crossings are computed once and sorted.
imaging::Mask rasterize_mask_exact(const QuadSpec& quad, float acceptor, int height, int width) {
  imaging::Mask mask(height, width, 0.0f);
  if (acceptor < kAcceptThreshold) return mask;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    auto xs = crossings(quad.vertices, static_cast<double>(y));
    if (xs.size() < 2) continue;
    std::sort(xs.begin(), xs.end());
    for (int x = 0; x < width; ++x) {
      const auto above = static_cast<std::size_t>(
          xs.end() - std::upper_bound(xs.begin(), xs.end(), static_cast<double>(x)));
      if (above % 2 == 1) mask.at(y, x) = 1.0f;
    }
  }
  return mask;
}

namespace serial {

// Per-pixel crossing-number test.
imaging::Mask rasterize_mask_exact(const QuadSpec& quad, float acceptor, int height, int width) {
  imaging::Mask mask(height, width, 0.0f);
  if (acceptor < kAcceptThreshold) return mask;
  const auto& v = quad.vertices;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      bool inside = false;
      for (std::size_t i = 0, j = 3; i < 4; j = i++) {
        if ((v[i].y > y) != (v[j].y > y)) {
          const double xi = v[i].x + (y - v[i].y) * (v[j].x - v[i].x) / (v[j].y - v[i].y);
          if (x < xi) inside = !inside;
        }
      }
      mask.at(y, x) = inside ? 1.0f : 0.0f;
    }
  return mask;
}

}  // namespace serial

}  // namespace collage::render
