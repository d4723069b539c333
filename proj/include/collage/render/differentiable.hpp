#pragma once

#include <memory>

#include <torch/torch.h>

#include "collage/render/shaper.hpp"

namespace collage::render {

// Columns of a [B,12] action batch consumed by the shaper.
torch::Tensor shape_columns(const torch::Tensor& actions);

// Differentiable rigid warp + composite on batches:
// canvas [B,3,Hc,Wc], material [B,3,Hm,Wm], mask [B,1,Hm,Wm], actions [B,12].
// Cubic B-spline sampling with zero fill; output clamped to [0,1] with identity gradient.
torch::Tensor warp_composite(const torch::Tensor& canvas, const torch::Tensor& material,
                             const torch::Tensor& mask, const torch::Tensor& actions);

// Shaper masks + B-spline warp; differentiable in all 12 action components.
torch::Tensor transition_diff(const torch::Tensor& canvas, const torch::Tensor& material,
                              const torch::Tensor& actions, ShaperNet& shaper);

// Canvas dynamics used inside agent updates and material selection.
class TransitionModel {
 public:
  virtual ~TransitionModel() = default;
  virtual torch::Tensor apply(const torch::Tensor& canvas, const torch::Tensor& material,
                              const torch::Tensor& actions) const = 0;
  virtual bool differentiable() const = 0;
};

class ShaperTransition final : public TransitionModel {
 public:
  explicit ShaperTransition(ShaperNet shaper);
  torch::Tensor apply(const torch::Tensor& canvas, const torch::Tensor& material,
                      const torch::Tensor& actions) const override;
  bool differentiable() const override { return true; }
  ShaperNet& shaper() const { return shaper_; }

 private:
  mutable ShaperNet shaper_;
};

// Batched wrapper of transition_exact; carries no gradient.
class ExactTransition final : public TransitionModel {
 public:
  torch::Tensor apply(const torch::Tensor& canvas, const torch::Tensor& material,
                      const torch::Tensor& actions) const override;
  bool differentiable() const override { return false; }
};

}  // namespace collage::render
