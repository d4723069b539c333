#include "collage/io/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "collage/io/image_io.hpp"

namespace collage::io {

namespace {

imaging::ImagePlane from_mat(const cv::Mat& m) {
  cv::Mat f;
  m.convertTo(f, CV_32F, 1.0 / 255.0);
  const int h = f.rows;
  const int w = f.cols;
  std::vector<float> chw(static_cast<std::size_t>(3) * h * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (f.channels() == 1) {
        const float v = f.at<float>(y, x);
        for (int c = 0; c < 3; ++c) chw[(static_cast<std::size_t>(c) * h + y) * w + x] = v;
      } else {
        const auto px = f.at<cv::Vec3f>(y, x);
        for (int c = 0; c < 3; ++c) chw[(static_cast<std::size_t>(c) * h + y) * w + x] = px[c];
      }
    }
  return imaging::ImagePlane::from_planar(h, w, std::move(chw));
}

}  // namespace

std::vector<imaging::ImagePlane> synth_digits(int count, int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> digit(0, 9);
  const int fonts[] = {cv::FONT_HERSHEY_SIMPLEX, cv::FONT_HERSHEY_DUPLEX,
                       cv::FONT_HERSHEY_COMPLEX, cv::FONT_HERSHEY_TRIPLEX,
                       cv::FONT_HERSHEY_SCRIPT_SIMPLEX};
  std::uniform_int_distribution<int> font(0, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int canvas = 4 * size;  // draw large, then downsample for smooth strokes
  std::vector<imaging::ImagePlane> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    cv::Mat img = cv::Mat::zeros(canvas, canvas, CV_8UC1);
    const std::string text = std::to_string(digit(rng));
    const int face = fonts[font(rng)];
    const double scale = canvas / 32.0 * (0.75 + 0.35 * unit(rng));
    const int thickness = std::max(1, static_cast<int>(canvas / 32.0 * (1.5 + 2.0 * unit(rng))));
    int baseline = 0;
    const auto box = cv::getTextSize(text, face, scale, thickness, &baseline);
    const double jitter = canvas * 0.08;
    const cv::Point org(static_cast<int>((canvas - box.width) / 2.0 + (unit(rng) - 0.5) * 2 * jitter),
                        static_cast<int>((canvas + box.height) / 2.0 + (unit(rng) - 0.5) * 2 * jitter));
    cv::putText(img, text, org, face, scale, cv::Scalar(255), thickness, cv::LINE_AA);

    const double angle = (unit(rng) - 0.5) * 30.0;
    const auto rot = cv::getRotationMatrix2D(cv::Point2f(canvas / 2.0f, canvas / 2.0f), angle, 1.0);
    cv::warpAffine(img, img, rot, img.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT, cv::Scalar(0));
    cv::Mat small;
    cv::resize(img, small, cv::Size(size, size), 0, 0, cv::INTER_AREA);
    out.push_back(from_mat(small));
  }
  return out;
}

std::vector<imaging::ImagePlane> synth_textures(int count, int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto colour = [&] {
    // Brightness spread over the full range so dark, mid and light materials all occur.
    const double v = unit(rng);
    const double sat = 0.6 * unit(rng);
    cv::Vec3f c;
    for (int k = 0; k < 3; ++k) c[k] = static_cast<float>(std::clamp(v + sat * (unit(rng) - 0.5), 0.0, 1.0));
    return c;
  };

  std::vector<imaging::ImagePlane> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const cv::Vec3f a = colour();
    const cv::Vec3f b = colour();
    const int kind = i % 5;
    const double freq = 2.0 + 10.0 * unit(rng);
    const double theta = unit(rng) * std::numbers::pi;
    const double phase = unit(rng) * 2.0 * std::numbers::pi;
    cv::Mat noise(8, 8, CV_32F);
    cv::theRNG().state = rng();
    cv::randu(noise, 0.0, 1.0);
    cv::Mat smooth;
    cv::resize(noise, smooth, cv::Size(size, size), 0, 0, cv::INTER_CUBIC);

    cv::Mat img(size, size, CV_32FC3);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const double u = static_cast<double>(x) / size;
        const double v = static_cast<double>(y) / size;
        double t = 0.0;
        switch (kind) {
          case 0:  // stripes
            t = 0.5 + 0.5 * std::sin(2 * std::numbers::pi * freq *
                                         (u * std::cos(theta) + v * std::sin(theta)) + phase);
            break;
          case 1:  // checks
            t = (static_cast<int>(std::floor(u * freq)) + static_cast<int>(std::floor(v * freq))) % 2;
            break;
          case 2:  // value noise
            t = std::clamp(static_cast<double>(smooth.at<float>(y, x)), 0.0, 1.0);
            break;
          case 3:  // gradient
            t = std::clamp(u * std::cos(theta) + v * std::sin(theta), 0.0, 1.0);
            break;
          default:  // blobs
            t = std::clamp(static_cast<double>(smooth.at<float>(y, x)) * 2.0 - 0.5, 0.0, 1.0);
            t = t > 0.5 ? 1.0 : 0.0;
            break;
        }
        img.at<cv::Vec3f>(y, x) = a * static_cast<float>(1.0 - t) + b * static_cast<float>(t);
      }
    cv::Mat bytes;
    img.convertTo(bytes, CV_8UC3, 255.0);
    out.push_back(from_mat(bytes));
  }
  return out;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<imaging::ImagePlane>& images) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < images.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.png", i);
    write_png(dir / name, images[i]);
  }
}

}  // namespace collage::io
