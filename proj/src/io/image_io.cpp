#include "collage/io/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace collage::io {

bool is_image_file(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

imaging::ImagePlane read_image(const std::filesystem::path& path) {
  cv::Mat raw;
  try {
    raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw std::runtime_error("cannot decode image " + path.string() + ": " + e.what());
  }
  if (raw.empty()) throw std::runtime_error("cannot decode image " + path.string());

  double scale = 1.0 / 255.0;
  if (raw.depth() == CV_16U) scale = 1.0 / 65535.0;
  else if (raw.depth() != CV_8U) throw std::runtime_error("unsupported pixel depth in " + path.string());

  cv::Mat rgb;
  switch (raw.channels()) {
    case 1: cv::cvtColor(raw, rgb, cv::COLOR_GRAY2RGB); break;
    case 3: cv::cvtColor(raw, rgb, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(raw, rgb, cv::COLOR_BGRA2RGB); break;
    default: throw std::runtime_error("unsupported channel count in " + path.string());
  }
  cv::Mat f;
  rgb.convertTo(f, CV_32F, scale);

  const int h = f.rows;
  const int w = f.cols;
  std::vector<float> chw(static_cast<std::size_t>(3) * h * w);
  for (int y = 0; y < h; ++y) {
    const auto* row = f.ptr<cv::Vec3f>(y);
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        chw[(static_cast<std::size_t>(c) * h + y) * w + x] = row[x][c];
  }
  return imaging::ImagePlane::from_planar(h, w, std::move(chw));
}

void write_png(const std::filesystem::path& path, const imaging::ImagePlane& image) {
  const int h = image.height();
  const int w = image.width();
  cv::Mat bgr(h, w, CV_8UC3);
  for (int y = 0; y < h; ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        row[x][2 - c] = cv::saturate_cast<uchar>(image.at(c, y, x) * 255.0f);
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), bgr)) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace collage::io
