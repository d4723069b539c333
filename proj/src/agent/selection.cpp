#include "collage/agent/selection.hpp"

#include "collage/errors.hpp"
#include "collage/render/action.hpp"

namespace collage::agent {

int argmax_lowest(const std::vector<double>& scores) {
  if (scores.empty()) throw UsageError("argmax of an empty score list");
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

Selection select_material(const StateBatch& state, const torch::Tensor& candidates,
                          const PolicyFn& policy, ValueNet& value_target,
                          const render::TransitionModel& transition,
                          const reward::RewardModel& reward, const torch::Tensor& next_material,
                          const SelectionOptions& options) {
  if (state.size() != 1) throw DimensionError("select_material expects a single state");
  if (!candidates.defined() || candidates.size(0) == 0) {
    throw UsageError("select_material: empty candidate list");
  }
  if (candidates.dim() != 4 || candidates.sizes().slice(1) != state.material.sizes().slice(1)) {
    throw DimensionError("candidate materials do not match the state resolution");
  }
  torch::NoGradGuard guard;
  const auto k = candidates.size(0);
  auto rows = torch::zeros({k}, torch::kInt64);
  auto offered = state.index(rows).with_material(candidates);

  auto actions = policy(offered, true).actions.clone();
  if (options.force_accept) actions.select(1, render::kAcceptor).fill_(1.0f);
  auto next = model_step(offered, actions, transition, next_material.expand_as(candidates));
  auto r = reward.reward(offered.canvas, next.canvas, offered.target);
  auto live = next.terminal().logical_not().to(r.dtype());
  auto bootstrap = options.gamma == 0.0 ? torch::zeros_like(r)
                                        : value(value_target, next) * live;
  auto score = (r + options.gamma * bootstrap).to(torch::kFloat64).contiguous();

  Selection out;
  out.scores.assign(score.data_ptr<double>(), score.data_ptr<double>() + k);
  out.index = argmax_lowest(out.scores);
  out.actions = actions;
  return out;
}

}  // namespace collage::agent
