#pragma once

#include <memory>
#include <vector>

#include <torch/torch.h>

#include "collage/agent/models.hpp"
#include "collage/agent/state.hpp"
#include "collage/env/environment.hpp"
#include "collage/render/action.hpp"
#include "collage/render/differentiable.hpp"
#include "collage/render/shaper.hpp"

namespace collage::testing {

// Closed-form soft rectangle cut (sigmoid edges, gated by the acceptor) followed by the
// library's bilinear warp. Differentiable in every component except p1..p4.
class SoftRectTransition final : public render::TransitionModel {
 public:
  explicit SoftRectTransition(double sharpness = 1.5) : k_(sharpness) {}

  torch::Tensor apply(const torch::Tensor& canvas, const torch::Tensor& material,
                      const torch::Tensor& actions) const override {
    const auto h = material.size(2);
    const auto w = material.size(3);
    auto opts = material.options();
    auto xs = torch::arange(w, opts).view({1, 1, 1, w});
    auto ys = torch::arange(h, opts).view({1, 1, h, 1});
    auto col = [&](int i) { return actions.select(1, i).view({-1, 1, 1, 1}); };
    auto cx = col(render::kXCut) * (w - 1);
    auto cy = col(render::kYCut) * (h - 1);
    auto hw = col(render::kWidth) * (w / 2.0);
    auto hh = col(render::kHeight) * (h / 2.0);
    auto mask = torch::sigmoid(k_ * (xs - (cx - hw))) * torch::sigmoid(k_ * ((cx + hw) - xs)) *
                torch::sigmoid(k_ * (ys - (cy - hh))) * torch::sigmoid(k_ * ((cy + hh) - ys));
    auto gate = torch::sigmoid((col(render::kAcceptor) - 0.51) * 600.0);
    return render::warp_composite(canvas, material, mask * gate, actions);
  }
  bool differentiable() const override { return true; }

 private:
  double k_;
};

// Covers the whole canvas with the offered material, accepting.
inline render::ActionVector full_cover_action() {
  render::ActionVector a;
  a.values = {0.5f, 0.5f, 1.0f, 1.0f, 0, 0, 0, 0, 0.5f, 0.5f, 0.5f, 1.0f};
  return a;
}

// Fixed action for every state, with a constant reported log-density.
inline agent::PolicyFn scripted_policy(const render::ActionVector& a, double logp = 0.0) {
  return [a, logp](const agent::StateBatch& s, bool) {
    auto row = torch::from_blob(const_cast<float*>(a.values.data()), {1, render::kActionDim})
                   .clone();
    return agent::PolicySample{row.expand({s.size(), render::kActionDim}).clone(),
                               torch::full({s.size()}, logp)};
  };
}

inline std::vector<env::ImagePtr> constant_pool(const std::vector<float>& levels, int size) {
  std::vector<env::ImagePtr> out;
  for (float v : levels) out.push_back(std::make_shared<const imaging::ImagePlane>(size, size, v));
  return out;
}

// Structurally valid shaper that has not been optimised; for plumbing tests only.
inline render::ShaperNet untrained_but_marked_shaper(int resolution) {
  torch::manual_seed(3);
  render::ShaperNet s(resolution);
  s->mark_trained();
  s->eval();
  return s;
}

inline agent::ModelConfig tiny_model(int resolution = 16) {
  agent::ModelConfig m;
  m.resolution = resolution;
  m.base_width = 8;
  return m;
}

inline std::vector<float> flat_parameters(const torch::nn::Module& m) {
  std::vector<float> out;
  for (const auto& p : m.parameters()) {
    auto c = p.detach().contiguous().to(torch::kFloat32).flatten();
    out.insert(out.end(), c.data_ptr<float>(), c.data_ptr<float>() + c.numel());
  }
  return out;
}

}  // namespace collage::testing
