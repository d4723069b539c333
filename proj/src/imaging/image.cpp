#include "collage/imaging/image.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "collage/errors.hpp"

namespace collage::imaging {

namespace {

void check_extent(int height, int width) {
  if (height < 1 || width < 1) {
    throw DimensionError("image extent must be at least 1x1, got " + std::to_string(height) +
                         "x" + std::to_string(width));
  }
}

ImagePlane resize_with(const ImagePlane& src, int height, int width, int interpolation) {
  check_extent(height, width);
  if (src.height() == height && src.width() == width) return src;
  std::vector<float> out(static_cast<std::size_t>(ImagePlane::kChannels) * height * width);
  for (int c = 0; c < ImagePlane::kChannels; ++c) {
    auto in_plane = src.channel(c);
    const cv::Mat in(src.height(), src.width(), CV_32F, const_cast<float*>(in_plane.data()));
    cv::Mat dst(height, width, CV_32F, out.data() + static_cast<std::size_t>(c) * height * width);
    cv::resize(in, dst, dst.size(), 0, 0, interpolation);
  }
  return ImagePlane::from_planar(height, width, std::move(out));
}

}  // namespace

ImagePlane::ImagePlane(int height, int width, float fill)
    : height_(height), width_(width) {
  check_extent(height, width);
  data_.assign(static_cast<std::size_t>(kChannels) * height * width, std::clamp(fill, 0.0f, 1.0f));
}

ImagePlane ImagePlane::from_planar(int height, int width, std::vector<float> chw) {
  check_extent(height, width);
  if (chw.size() != static_cast<std::size_t>(kChannels) * height * width) {
    throw DimensionError("planar buffer has " + std::to_string(chw.size()) +
                         " values, expected 3x" + std::to_string(height) + "x" +
                         std::to_string(width));
  }
  ImagePlane img;
  img.height_ = height;
  img.width_ = width;
  img.data_ = std::move(chw);
  img.clamp01();
  return img;
}

ImagePlane ImagePlane::from_gray(int height, int width, std::span<const float> gray) {
  check_extent(height, width);
  const std::size_t n = static_cast<std::size_t>(height) * width;
  if (gray.size() != n) throw DimensionError("gray buffer does not match extent");
  std::vector<float> chw(kChannels * n);
  for (int c = 0; c < kChannels; ++c) std::copy(gray.begin(), gray.end(), chw.begin() + c * n);
  return from_planar(height, width, std::move(chw));
}

std::span<const float> ImagePlane::channel(int c) const {
  return std::span<const float>(data_).subspan(static_cast<std::size_t>(c) * pixels(), pixels());
}

ImagePlane ImagePlane::crop(int row, int col, int height, int width) const {
  if (row < 0 || col < 0 || height < 1 || width < 1 || row + height > height_ ||
      col + width > width_) {
    throw DimensionError("crop window exceeds image bounds");
  }
  ImagePlane out(height, width);
  for (int c = 0; c < kChannels; ++c)
    for (int y = 0; y < height; ++y) {
      const float* src = &data_[index(c, row + y, col)];
      std::copy(src, src + width, &out.at(c, y, 0));
    }
  return out;
}

void ImagePlane::paste(const ImagePlane& patch, int row, int col) {
  if (row < 0 || col < 0 || row + patch.height() > height_ || col + patch.width() > width_) {
    throw DimensionError("paste window exceeds image bounds");
  }
  for (int c = 0; c < kChannels; ++c)
    for (int y = 0; y < patch.height(); ++y) {
      const float* src = &patch.data_[patch.index(c, y, 0)];
      std::copy(src, src + patch.width(), &data_[index(c, row + y, col)]);
    }
}

void ImagePlane::clamp01() {
  for (float& v : data_) v = std::clamp(v, 0.0f, 1.0f);
}

double ImagePlane::mean() const {
  if (data_.empty()) return 0.0;
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

double Mask::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

float Mask::max() const {
  return values.empty() ? 0.0f : *std::max_element(values.begin(), values.end());
}

ImagePlane resize_bilinear(const ImagePlane& src, int height, int width) {
  return resize_with(src, height, width, cv::INTER_LINEAR);
}

ImagePlane resize_area(const ImagePlane& src, int height, int width) {
  const bool shrinking = height <= src.height() && width <= src.width();
  return resize_with(src, height, width, shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
}

}  // namespace collage::imaging
