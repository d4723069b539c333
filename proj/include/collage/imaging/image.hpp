#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace collage::imaging {

// H x W x 3 image with values in [0,1], stored planar (channel-major).
class ImagePlane {
 public:
  static constexpr int kChannels = 3;

  ImagePlane() = default;
  ImagePlane(int height, int width, float fill = 0.0f);

  // Takes ownership of planar CHW data; values are clamped into [0,1].
  static ImagePlane from_planar(int height, int width, std::vector<float> chw);
  // Replicates a single channel into all three.
  static ImagePlane from_gray(int height, int width, std::span<const float> gray);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixels() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  float at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::span<const float> channel(int c) const;

  bool same_shape(const ImagePlane& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  ImagePlane crop(int row, int col, int height, int width) const;
  void paste(const ImagePlane& patch, int row, int col);
  void clamp01();
  double mean() const;

  bool operator==(const ImagePlane&) const = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

// Single-channel soft or binary mask in [0,1].
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  Mask() = default;
  Mask(int h, int w, float fill = 0.0f)
      : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

  float& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
  float at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double sum() const;
  float max() const;
};

// Bilinear resize (OpenCV INTER_LINEAR); identity when the size already matches.
ImagePlane resize_bilinear(const ImagePlane& src, int height, int width);
// Area-averaging resize for downscaled observations.
ImagePlane resize_area(const ImagePlane& src, int height, int width);

}  // namespace collage::imaging
