#pragma once

#include <span>
#include <vector>

#include "collage/imaging/image.hpp"

namespace collage::imaging {

// Largest Sobel magnitude attainable on [0,1] inputs.
inline constexpr double kSobelMaxMagnitude = 5.656854249492380195;  // 4*sqrt(2)

// Per-pixel Sobel gradient magnitude of one channel with replicate padding.
std::vector<float> sobel_magnitude(std::span<const float> plane, int height, int width);

// Gradient-based complexity: mean Sobel magnitude over pixels and channels,
// normalised by kSobelMaxMagnitude. Result lies in [0,1].
double complexity(const ImagePlane& img);

namespace serial {
double complexity(const ImagePlane& img);
}  // namespace serial

}  // namespace collage::imaging
