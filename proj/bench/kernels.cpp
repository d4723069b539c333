// OpenMP kernels against their serial references. Run with OMP_NUM_THREADS to compare.
#include <random>

#include <benchmark/benchmark.h>

#include "collage/imaging/complexity.hpp"
#include "collage/imaging/metrics.hpp"
#include "collage/render/composite.hpp"
#include "collage/render/geometry.hpp"

using namespace collage;

namespace {

imaging::ImagePlane noise(int size, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  imaging::ImagePlane img(size, size);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) img.at(c, y, x) = u(rng);
  return img;
}

render::ActionVector paste_action() {
  render::ActionVector a;
  a.values = {0.4f, 0.6f, 0.7f, 0.5f, 0.2f, 0.3f, 0.1f, 0.4f, 0.5f, 0.45f, 0.6f, 0.9f};
  return a;
}

template <double (*Fn)(const imaging::ImagePlane&, const imaging::ImagePlane&)>
void pairwise(benchmark::State& state) {
  const auto a = noise(static_cast<int>(state.range(0)), 1);
  const auto b = noise(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, b));
}

double ssim_omp(const imaging::ImagePlane& a, const imaging::ImagePlane& b) { return imaging::ssim(a, b); }
double ssim_serial(const imaging::ImagePlane& a, const imaging::ImagePlane& b) {
  return imaging::serial::ssim(a, b);
}
double mse_omp(const imaging::ImagePlane& a, const imaging::ImagePlane& b) { return imaging::mse(a, b); }
double mse_serial(const imaging::ImagePlane& a, const imaging::ImagePlane& b) {
  return imaging::serial::mse(a, b);
}

template <double (*Fn)(const imaging::ImagePlane&)>
void unary(benchmark::State& state) {
  const auto a = noise(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a));
}

double complexity_omp(const imaging::ImagePlane& a) { return imaging::complexity(a); }
double complexity_serial(const imaging::ImagePlane& a) { return imaging::serial::complexity(a); }

template <bool Serial>
void rasterize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto q = render::decode_action(paste_action(), n, n);
  for (auto _ : state) {
    auto m = Serial ? render::serial::rasterize_mask_exact(q, 1.0f, n, n)
                    : render::rasterize_mask_exact(q, 1.0f, n, n);
    benchmark::DoNotOptimize(m);
  }
}

template <bool Serial>
void warp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto canvas = noise(n, 4);
  const auto material = noise(n, 5);
  const auto a = paste_action();
  const auto mask = render::rasterize_mask_exact(render::decode_action(a, n, n), 1.0f, n, n);
  for (auto _ : state) {
    auto out = Serial ? render::serial::warp_and_composite(canvas, material, mask, a)
                      : render::warp_and_composite(canvas, material, mask, a);
    benchmark::DoNotOptimize(out);
  }
}

}  // namespace

BENCHMARK(pairwise<mse_omp>)->Name("mse/omp")->Arg(128)->Arg(512);
BENCHMARK(pairwise<mse_serial>)->Name("mse/serial")->Arg(128)->Arg(512);
BENCHMARK(pairwise<ssim_omp>)->Name("ssim/omp")->Arg(128)->Arg(512);
BENCHMARK(pairwise<ssim_serial>)->Name("ssim/serial")->Arg(128)->Arg(512);
BENCHMARK(unary<complexity_omp>)->Name("complexity/omp")->Arg(128)->Arg(512);
BENCHMARK(unary<complexity_serial>)->Name("complexity/serial")->Arg(128)->Arg(512);
BENCHMARK(rasterize<false>)->Name("rasterize/omp")->Arg(64)->Arg(512);
BENCHMARK(rasterize<true>)->Name("rasterize/serial")->Arg(64)->Arg(512);
BENCHMARK(warp<false>)->Name("warp/omp")->Arg(64)->Arg(512);
BENCHMARK(warp<true>)->Name("warp/serial")->Arg(64)->Arg(512);

BENCHMARK_MAIN();
