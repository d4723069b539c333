#pragma once

#include <array>

#include "collage/imaging/image.hpp"
#include "collage/render/action.hpp"

namespace collage::render {

inline constexpr float kMinExtent = 0.05f;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

// Quadrilateral scrap in material pixel coordinates (pixel centres are integers).
// Vertex order: top, right, bottom, left side points.
struct QuadSpec {
  Rect rect;
  std::array<Point, 4> vertices;
};

QuadSpec decode_action(const ActionVector& action, int material_height, int material_width);

// Signed area of the vertex loop; positive for clockwise order in image coordinates.
double shoelace_area(const std::array<Point, 4>& vertices);

// Binary mask, 1 where the pixel centre is inside the quad (even-odd rule).
// All zero when the acceptor denies.
imaging::Mask rasterize_mask_exact(const QuadSpec& quad, float acceptor, int height, int width);

namespace serial {
imaging::Mask rasterize_mask_exact(const QuadSpec& quad, float acceptor, int height, int width);
}  // namespace serial

}  // namespace collage::render
