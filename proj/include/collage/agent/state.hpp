#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <torch/torch.h>

#include "collage/env/environment.hpp"
#include "collage/render/differentiable.hpp"

namespace collage::agent {

inline constexpr int kStateChannels = 12;

// Batched agent observations. Images are [B,3,H,W]; remaining and steps are [B].
struct StateBatch {
  torch::Tensor canvas;
  torch::Tensor target;
  torch::Tensor material;
  torch::Tensor remaining;  // l, float
  torch::Tensor steps;      // t, int64
  int total_pastes = 1;
  int max_steps = 4;

  int64_t size() const { return canvas.size(0); }
  int height() const { return static_cast<int>(canvas.size(2)); }
  int width() const { return static_cast<int>(canvas.size(3)); }
  // l below half a paste or t at the step limit.
  torch::Tensor terminal() const;
  StateBatch with_material(const torch::Tensor& material) const;
  StateBatch index(const torch::Tensor& rows) const;
};

// canvas, target, material, l-plane, x-plane, y-plane -> [B,12,H,W].
torch::Tensor network_input(const StateBatch& s);

// [1,2,H,W] coordinate planes (shared cache).
torch::Tensor coord_tensor(int height, int width);

StateBatch make_state_batch(std::span<const env::Episode* const> episodes);
StateBatch make_state_batch(const env::Episode& episode);

// Model step: canvas through the transition model, l drops by 1/T_M where the acceptor accepts,
// t advances, and the offered material becomes next_material.
StateBatch model_step(const StateBatch& s, const torch::Tensor& actions,
                      const render::TransitionModel& transition, const torch::Tensor& next_material);

// Material pool as one tensor for model rollouts.
class MaterialBank {
 public:
  MaterialBank() = default;
  explicit MaterialBank(const std::vector<env::ImagePtr>& pool);

  torch::Tensor sample(int64_t n, torch::Generator& generator) const;
  torch::Tensor at(int64_t id) const { return images_[id]; }
  int64_t size() const { return images_.defined() ? images_.size(0) : 0; }

 private:
  torch::Tensor images_;  // [N,3,H,W]
};

}  // namespace collage::agent
