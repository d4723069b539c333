#pragma once

#include <vector>

namespace collage::imaging {

// CoordConv planes: x = col/(W-1), y = row/(H-1), both row-major H x W.
struct CoordPlanes {
  int height = 0;
  int width = 0;
  std::vector<float> x;
  std::vector<float> y;

  bool operator==(const CoordPlanes&) const = default;
};

CoordPlanes coord_planes(int height, int width);

}  // namespace collage::imaging
