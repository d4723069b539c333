#include "collage/render/action.hpp"

#include <algorithm>
#include <numbers>

#include "collage/errors.hpp"

namespace collage::render {

double ActionVector::angle() const {
  return (static_cast<double>(values[kTheta]) - 0.5) * 2.0 * std::numbers::pi;
}

std::array<float, kShapeDim> ActionVector::shape_params() const {
  std::array<float, kShapeDim> out{};
  std::copy_n(values.begin(), 8, out.begin());
  out[8] = values[kAcceptor];
  return out;
}

ActionVector ActionVector::clamped() const {
  ActionVector out = *this;
  for (float& v : out.values) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

ActionVector ActionVector::from_span(std::span<const float> v) {
  if (v.size() != static_cast<std::size_t>(kActionDim))
    throw DimensionError("action vector needs 12 components");
  ActionVector a;
  std::copy(v.begin(), v.end(), a.values.begin());
  return a;
}

}  // namespace collage::render
