#pragma once

#include "collage/imaging/image.hpp"

namespace collage::imaging {

inline constexpr double kPsnrCapDb = 100.0;
inline constexpr double kPsnrMseFloor = 1e-10;

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

// Mean squared difference over all pixels and channels.
double mse(const ImagePlane& a, const ImagePlane& b);

// 10*log10(1/mse), capped at kPsnrCapDb for mse below kPsnrMseFloor.
double psnr_from_mse(double mse_value);
double psnr(const ImagePlane& a, const ImagePlane& b);

// Gaussian-window SSIM over the valid region, averaged over channels.
// Throws DimensionError if either side is smaller than the window.
double ssim(const ImagePlane& a, const ImagePlane& b, const SsimParams& params = {});

namespace serial {
// Single-threaded references used to check the OpenMP kernels.
double mse(const ImagePlane& a, const ImagePlane& b);
double ssim(const ImagePlane& a, const ImagePlane& b, const SsimParams& params = {});
}  // namespace serial

}  // namespace collage::imaging
