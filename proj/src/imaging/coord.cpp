#include "collage/imaging/coord.hpp"

#include "collage/errors.hpp"

namespace collage::imaging {

CoordPlanes coord_planes(int height, int width) {
  if (height < 2 || width < 2) throw DimensionError("coord planes need at least 2x2");
  CoordPlanes planes{height, width, {}, {}};
  planes.x.resize(static_cast<std::size_t>(height) * width);
  planes.y.resize(planes.x.size());
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const auto i = static_cast<std::size_t>(r) * width + c;
      planes.x[i] = static_cast<float>(c) / static_cast<float>(width - 1);
      planes.y[i] = static_cast<float>(r) / static_cast<float>(height - 1);
    }
  }
  return planes;
}

}  // namespace collage::imaging
