#include "collage/render/differentiable.hpp"

#include <array>
#include <numbers>

#include "collage/errors.hpp"
#include "collage/render/composite.hpp"
#include "collage/tensor_bridge.hpp"

namespace collage::render {

namespace F = torch::nn::functional;

torch::Tensor shape_columns(const torch::Tensor& actions) {
  if (actions.dim() != 2 || actions.size(1) != kActionDim)
    throw DimensionError("actions must be [B,12]");
  return torch::cat({actions.narrow(1, 0, 8), actions.narrow(1, kAcceptor, 1)}, 1);
}

namespace {

// Cubic B-spline weights for the taps floor(x)-1 .. floor(x)+2.
std::array<torch::Tensor, 4> bspline_weights(const torch::Tensor& t) {
  const auto t2 = t * t, t3 = t2 * t;
  const auto u = 1.0 - t;
  return {u * u * u / 6.0, (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
          (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0, t3 / 6.0};
}

// source [B,C,H,W] sampled at pixel coordinates (mx, my) [B,Ho,Wo] with zero fill.
torch::Tensor bspline_sample(const torch::Tensor& source, const torch::Tensor& mx,
                             const torch::Tensor& my) {
  const int64_t b = source.size(0), c = source.size(1);
  const int64_t h = source.size(2), w = source.size(3);
  const int64_t ho = mx.size(1), wo = mx.size(2);
  constexpr int64_t kPad = 2;
  const int64_t wp = w + 2 * kPad, hp = h + 2 * kPad;
  const auto flat = F::pad(source, F::PadFuncOptions({kPad, kPad, kPad, kPad})).view({b, c, hp * wp});

  const auto fx = mx.detach().floor(), fy = my.detach().floor();
  const auto wx = bspline_weights(mx - fx), wy = bspline_weights(my - fy);
  const auto ix = fx.to(torch::kLong) - 1 + kPad, iy = fy.to(torch::kLong) - 1 + kPad;

  auto out = torch::zeros({b, c, ho * wo}, source.options());
  for (int j = 0; j < 4; ++j) {
    const auto row = (iy + j).clamp(0, hp - 1);
    for (int i = 0; i < 4; ++i) {
      const auto idx = (row * wp + (ix + i).clamp(0, wp - 1)).view({b, 1, ho * wo}).expand({b, c, ho * wo});
      const auto weight = (wy[j] * wx[i]).view({b, 1, ho * wo});
      out = out + weight * flat.gather(2, idx);
    }
  }
  return out.view({b, c, ho, wo});
}

}  // namespace

torch::Tensor warp_composite(const torch::Tensor& canvas, const torch::Tensor& material,
                             const torch::Tensor& mask, const torch::Tensor& actions) {
  if (canvas.dim() != 4 || material.dim() != 4 || mask.dim() != 4)
    throw DimensionError("warp_composite expects 4-D batches");
  if (mask.size(2) != material.size(2) || mask.size(3) != material.size(3))
    throw DimensionError("mask resolution must equal material resolution");
  const int64_t b = canvas.size(0);
  const int64_t hc = canvas.size(2), wc = canvas.size(3);
  const int64_t hm = material.size(2), wm = material.size(3);
  const auto opts = canvas.options();

  auto col = [&](int i) { return actions.select(1, i).view({b, 1, 1}); };
  const auto phi = (col(kTheta) - 0.5) * (2.0 * std::numbers::pi);
  const auto cos_a = torch::cos(phi), sin_a = torch::sin(phi);
  const auto glue_x = col(kXGlue) * static_cast<double>(wc - 1);
  const auto glue_y = col(kYGlue) * static_cast<double>(hc - 1);
  const auto cut_x = col(kXCut) * static_cast<double>(wm - 1);
  const auto cut_y = col(kYCut) * static_cast<double>(hm - 1);

  const auto xs = torch::arange(wc, opts).view({1, 1, wc});
  const auto ys = torch::arange(hc, opts).view({1, hc, 1});
  const auto dx = xs - glue_x;
  const auto dy = ys - glue_y;
  const auto mx = cos_a * dx + sin_a * dy + cut_x;
  const auto my = -sin_a * dx + cos_a * dy + cut_y;

  const auto source = torch::cat({material * mask, mask}, 1);
  const auto warped = bspline_sample(source, mx.expand({b, hc, wc}), my.expand({b, hc, wc}));
  const auto paint = warped.narrow(1, 0, 3);
  const auto cover = warped.narrow(1, 3, 1);
  const auto raw = canvas * (1.0 - cover) + paint;
  return raw + (raw.clamp(0.0, 1.0) - raw).detach();
}

torch::Tensor transition_diff(const torch::Tensor& canvas, const torch::Tensor& material,
                              const torch::Tensor& actions, ShaperNet& shaper) {
  auto mask = shaper_forward(shaper, shape_columns(actions));
  if (mask.size(2) != material.size(2) || mask.size(3) != material.size(3)) {
    mask = F::interpolate(mask, F::InterpolateFuncOptions()
                                    .size(std::vector<int64_t>{material.size(2), material.size(3)})
                                    .mode(torch::kBilinear)
                                    .align_corners(true));
  }
  return warp_composite(canvas, material, mask, actions);
}

ShaperTransition::ShaperTransition(ShaperNet shaper) : shaper_(std::move(shaper)) {
  if (!shaper_->trained()) throw UsageError("ShaperTransition needs a trained shaper");
}

torch::Tensor ShaperTransition::apply(const torch::Tensor& canvas, const torch::Tensor& material,
                                      const torch::Tensor& actions) const {
  return transition_diff(canvas, material, actions, shaper_);
}

torch::Tensor ExactTransition::apply(const torch::Tensor& canvas, const torch::Tensor& material,
                                     const torch::Tensor& actions) const {
  torch::NoGradGuard guard;
  const auto n = canvas.size(0);
  std::vector<torch::Tensor> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    auto next = transition_exact(to_image(canvas[i]), to_image(material[i]), to_action(actions[i]));
    out.push_back(to_tensor(next).to(canvas.options()));
  }
  return torch::stack(out);
}

}  // namespace collage::render
