#pragma once

#include <cstdint>
#include <random>

#include "collage/imaging/image.hpp"
#include "collage/render/action.hpp"

namespace collage::testing {

inline imaging::ImagePlane random_image(int h, int w, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  imaging::ImagePlane img(h, w);
  for (float& v : img.data()) v = u(rng);
  return img;
}

inline imaging::ImagePlane constant_image(int h, int w, float v) { return imaging::ImagePlane(h, w, v); }

// Checkerboard with square cells of the given size, values 0/1.
inline imaging::ImagePlane checkerboard(int h, int w, int cell) {
  imaging::ImagePlane img(h, w);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) img.at(c, y, x) = ((y / cell + x / cell) % 2) ? 1.0f : 0.0f;
  return img;
}

// Left half constant grey, right half checkerboard.
inline imaging::ImagePlane half_flat_half_checker(int size, int cell) {
  imaging::ImagePlane img = checkerboard(size, size, cell);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size / 2; ++x) img.at(c, y, x) = 0.5f;
  return img;
}

inline render::ActionVector random_action(std::mt19937& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  render::ActionVector a;
  for (float& v : a.values) v = u(rng);
  return a;
}

}  // namespace collage::testing
