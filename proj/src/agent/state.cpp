#include "collage/agent/state.hpp"

#include <map>
#include <mutex>

#include "collage/errors.hpp"
#include "collage/render/action.hpp"
#include "collage/tensor_bridge.hpp"

namespace collage::agent {

torch::Tensor StateBatch::terminal() const {
  const double half_paste = 0.5 / total_pastes;
  return remaining.lt(half_paste).logical_or(steps.ge(max_steps));
}

StateBatch StateBatch::with_material(const torch::Tensor& m) const {
  StateBatch out = *this;
  out.material = m;
  return out;
}

StateBatch StateBatch::index(const torch::Tensor& rows) const {
  StateBatch out = *this;
  out.canvas = canvas.index_select(0, rows);
  out.target = target.index_select(0, rows);
  out.material = material.index_select(0, rows);
  out.remaining = remaining.index_select(0, rows);
  out.steps = steps.index_select(0, rows);
  return out;
}

torch::Tensor coord_tensor(int height, int width) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, torch::Tensor> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{height, width}];
  if (!slot.defined()) {
    auto planes = env::shared_coord_planes(height, width);
    auto x = torch::from_blob(const_cast<float*>(planes->x.data()), {height, width}).clone();
    auto y = torch::from_blob(const_cast<float*>(planes->y.data()), {height, width}).clone();
    slot = torch::stack({x, y}).unsqueeze(0);
  }
  return slot;
}

torch::Tensor network_input(const StateBatch& s) {
  if (s.canvas.sizes() != s.target.sizes() || s.canvas.sizes() != s.material.sizes()) {
    throw DimensionError("state planes differ in shape");
  }
  const auto b = s.size();
  const auto h = s.height();
  const auto w = s.width();
  auto l_plane = s.remaining.to(s.canvas.dtype()).view({b, 1, 1, 1}).expand({b, 1, h, w});
  auto coord = coord_tensor(h, w).to(s.canvas.dtype()).expand({b, 2, h, w});
  return torch::cat({s.canvas, s.target, s.material, l_plane, coord}, 1);
}

StateBatch make_state_batch(std::span<const env::Episode* const> episodes) {
  if (episodes.empty()) throw UsageError("empty state batch");
  std::vector<torch::Tensor> canvas, target, material;
  std::vector<float> remaining;
  std::vector<int64_t> steps;
  const auto& clock0 = episodes.front()->clock;
  for (const auto* ep : episodes) {
    if (ep->clock.total_pastes != clock0.total_pastes || ep->clock.max_steps != clock0.max_steps) {
      throw ConfigurationError("episodes in one batch must share T_M and T_max");
    }
    canvas.push_back(to_tensor(ep->state.canvas));
    target.push_back(to_tensor(*ep->state.target));
    material.push_back(to_tensor(*ep->state.material));
    remaining.push_back(static_cast<float>(ep->state.remaining));
    steps.push_back(ep->clock.t);
  }
  StateBatch s;
  s.canvas = torch::stack(canvas);
  s.target = torch::stack(target);
  s.material = torch::stack(material);
  s.remaining = torch::tensor(remaining);
  s.steps = torch::tensor(steps, torch::kInt64);
  s.total_pastes = clock0.total_pastes;
  s.max_steps = clock0.max_steps;
  return s;
}

StateBatch make_state_batch(const env::Episode& episode) {
  const env::Episode* one[] = {&episode};
  return make_state_batch(std::span<const env::Episode* const>(one));
}

StateBatch model_step(const StateBatch& s, const torch::Tensor& actions,
                      const render::TransitionModel& transition,
                      const torch::Tensor& next_material) {
  if (actions.dim() != 2 || actions.size(0) != s.size() ||
      actions.size(1) != render::kActionDim) {
    throw DimensionError("model_step: actions must be [B,12]");
  }
  StateBatch out = s;
  out.canvas = transition.apply(s.canvas, s.material, actions);
  auto accepted = actions.select(1, render::kAcceptor).detach().ge(render::kAcceptThreshold);
  auto dropped = (s.remaining - 1.0f / static_cast<float>(s.total_pastes)).clamp_min(0.0f);
  out.remaining = torch::where(accepted, dropped, s.remaining);
  out.steps = s.steps + 1;
  out.material = next_material;
  return out;
}

MaterialBank::MaterialBank(const std::vector<env::ImagePtr>& pool) {
  if (pool.empty()) throw ConfigurationError("material pool is empty");
  std::vector<torch::Tensor> ts;
  ts.reserve(pool.size());
  for (const auto& m : pool) ts.push_back(to_tensor(*m));
  images_ = torch::stack(ts);
}

torch::Tensor MaterialBank::sample(int64_t n, torch::Generator& generator) const {
  if (size() == 0) throw UsageError("material bank is empty");
  auto ids = torch::randint(size(), {n}, generator, torch::kInt64);
  return images_.index_select(0, ids);
}

}  // namespace collage::agent
