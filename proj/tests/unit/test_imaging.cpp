#include <doctest.h>

#include <cmath>
#include <random>

#include "collage/errors.hpp"
#include "collage/imaging/complexity.hpp"
#include "collage/imaging/coord.hpp"
#include "collage/imaging/metrics.hpp"
#include "fixtures.hpp"

using namespace collage;
using namespace collage::imaging;
using collage::testing::checkerboard;
using collage::testing::constant_image;
using collage::testing::random_image;

namespace {

// 5x5 box blur with replicate borders; test-only oracle helper.
ImagePlane box_blur5(const ImagePlane& src) {
  ImagePlane out(src.height(), src.width());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < src.height(); ++y)
      for (int x = 0; x < src.width(); ++x) {
        double acc = 0;
        for (int dy = -2; dy <= 2; ++dy)
          for (int dx = -2; dx <= 2; ++dx)
            acc += src.at(c, std::clamp(y + dy, 0, src.height() - 1),
                          std::clamp(x + dx, 0, src.width() - 1));
        out.at(c, y, x) = static_cast<float>(acc / 25.0);
      }
  return out;
}

ImagePlane flip_horizontal(const ImagePlane& src) {
  ImagePlane out(src.height(), src.width());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < src.height(); ++y)
      for (int x = 0; x < src.width(); ++x) out.at(c, y, x) = src.at(c, y, src.width() - 1 - x);
  return out;
}

ImagePlane flip_vertical(const ImagePlane& src) {
  ImagePlane out(src.height(), src.width());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < src.height(); ++y)
      for (int x = 0; x < src.width(); ++x) out.at(c, y, x) = src.at(c, src.height() - 1 - y, x);
  return out;
}

}  // namespace

TEST_CASE("image plane invariants") {
  ImagePlane img(4, 5, 2.0f);
  CHECK(img.mean() == doctest::Approx(1.0));
  CHECK_THROWS_AS(ImagePlane(0, 3), DimensionError);

  const std::vector<float> gray = {0.f, 0.25f, 0.5f, 1.5f};
  auto g = ImagePlane::from_gray(2, 2, gray);
  for (int c = 0; c < 3; ++c) {
    CHECK(g.at(c, 0, 1) == 0.25f);
    CHECK(g.at(c, 1, 1) == 1.0f);  // clamped
  }

  auto r = random_image(8, 8, 3);
  auto patch = r.crop(2, 3, 4, 4);
  CHECK(patch.at(1, 0, 0) == r.at(1, 2, 3));
  ImagePlane blank(8, 8, 0.0f);
  blank.paste(patch, 2, 3);
  CHECK(blank.at(2, 5, 6) == r.at(2, 5, 6));
  CHECK_THROWS_AS(r.crop(6, 6, 4, 4), DimensionError);
}

TEST_CASE("mse examples") {
  auto x = random_image(16, 16, 1);
  CHECK(mse(x, x) == 0.0);
  CHECK(mse(constant_image(8, 8, 0), constant_image(8, 8, 1)) == doctest::Approx(1.0));
  CHECK(mse(constant_image(8, 8, 0), constant_image(8, 8, 0.5f)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(mse(constant_image(8, 8, 0), constant_image(8, 9, 0)), DimensionError);
}

TEST_CASE("psnr examples") {
  CHECK(psnr_from_mse(0.01) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(psnr_from_mse(1.0) == 0.0);
  auto x = random_image(16, 16, 2);
  CHECK(psnr(x, x) == kPsnrCapDb);
  CHECK_THROWS_AS(psnr(constant_image(8, 8, 0), constant_image(9, 8, 0)), DimensionError);
}

TEST_CASE("psnr strictly decreasing in mse") {
  double prev = psnr_from_mse(1e-9);
  for (double m = 2e-9; m <= 1.0; m *= 1.7) {
    const double cur = psnr_from_mse(m);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("ssim examples") {
  auto x = random_image(24, 24, 5);
  CHECK(ssim(x, x) == doctest::Approx(1.0).epsilon(1e-9));

  // Hand evaluation on constants: mu_x = 0, mu_y = 1, all variances 0
  // => (C1)(C2) / ((1 + C1)(C2)) = C1 / (1 + C1), C1 = (0.01)^2.
  const double c1 = 0.01 * 0.01;
  CHECK(ssim(constant_image(16, 16, 0), constant_image(16, 16, 1)) ==
        doctest::Approx(c1 / (1.0 + c1)).epsilon(1e-9));

  auto y = random_image(24, 24, 6);
  CHECK(ssim(x, y) == doctest::Approx(ssim(y, x)).epsilon(1e-12));
  CHECK_THROWS_AS(ssim(constant_image(10, 16, 0), constant_image(10, 16, 0)), DimensionError);
}

TEST_CASE("parallel kernels agree with serial references") {
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    auto a = random_image(23 + seed, 31, seed);
    auto b = random_image(23 + seed, 31, seed + 100);
    CHECK(mse(a, b) == doctest::Approx(serial::mse(a, b)).epsilon(1e-12));
    CHECK(ssim(a, b) == doctest::Approx(serial::ssim(a, b)).epsilon(1e-9));
    CHECK(complexity(a) == doctest::Approx(serial::complexity(a)).epsilon(1e-12));
  }
}

TEST_CASE("metric symmetry on random pairs") {
  std::mt19937 rng(11);
  for (int i = 0; i < 10; ++i) {
    auto a = random_image(12, 14, rng());
    auto b = random_image(12, 14, rng());
    CHECK(mse(a, b) == mse(b, a));
    CHECK(psnr(a, b) == psnr(b, a));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("coord planes") {
  auto p = coord_planes(2, 2);
  CHECK(p.x == std::vector<float>{0, 1, 0, 1});
  CHECK(p.y == std::vector<float>{0, 0, 1, 1});
  auto q = coord_planes(3, 3);
  CHECK(q.x[1] == 0.5f);
  CHECK(q.x[4] == 0.5f);
  CHECK(coord_planes(7, 5) == coord_planes(7, 5));
  CHECK_THROWS_AS(coord_planes(1, 4), DimensionError);
}

TEST_CASE("sobel hand convolution") {
  // Columns (0,0,1): centre Gx = (1 + 2 + 1) - 0 = 4, Gy = 0.
  const std::vector<float> plane = {0, 0, 1, 0, 0, 1, 0, 0, 1};
  auto mag = sobel_magnitude(plane, 3, 3);
  CHECK(mag[4] == doctest::Approx(4.0));

  // Replicate padding: column 0 has Gx = 0, columns 1 and 2 have Gx = 4.
  auto img = ImagePlane::from_gray(3, 3, plane);
  CHECK(complexity(img) == doctest::Approx((6 * 4.0) / (9 * kSobelMaxMagnitude)));
}

TEST_CASE("complexity properties") {
  CHECK(complexity(constant_image(9, 9, 0.37f)) == 0.0);
  CHECK_THROWS_AS(complexity(constant_image(2, 9, 0.0f)), DimensionError);

  auto checker = checkerboard(32, 32, 2);
  CHECK(complexity(checker) > complexity(box_blur5(checker)));

  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    auto img = random_image(17, 13, seed);
    const double c = complexity(img);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    CHECK(complexity(flip_horizontal(img)) == doctest::Approx(c).epsilon(1e-12));
    CHECK(complexity(flip_vertical(img)) == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("resize keeps range and extent") {
  auto img = random_image(20, 30, 9);
  auto small = resize_bilinear(img, 10, 12);
  CHECK(small.height() == 10);
  CHECK(small.width() == 12);
  auto area = resize_area(img, 5, 5);
  for (float v : area.data()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
  CHECK(resize_bilinear(img, 20, 30) == img);
}
