#include "collage/agent/replay.hpp"

#include <utility>

#include "collage/errors.hpp"
#include "collage/tensor_bridge.hpp"

namespace collage::agent {

Transition Transition::capture(const env::Episode& episode, const render::ActionVector& action) {
  Transition t;
  t.canvas = episode.state.canvas;
  t.target = episode.state.target;
  t.material = episode.state.material;
  t.t = episode.clock.t;
  t.t_m = episode.clock.t_m;
  t.total_pastes = episode.clock.total_pastes;
  t.max_steps = episode.clock.max_steps;
  t.action = action;
  return t;
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigurationError("replay capacity must be positive");
}

void ReplayMemory::push(Transition t) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t n, std::mt19937_64& rng) const {
  if (items_.empty()) throw UsageError("sampling from an empty replay memory");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = pick(rng);
  return out;
}

TransitionBatch ReplayMemory::batch(const std::vector<std::size_t>& indices) const {
  if (indices.empty()) throw UsageError("empty transition batch");
  std::vector<torch::Tensor> canvas, target, material, actions;
  std::vector<float> remaining;
  std::vector<int64_t> steps;
  const auto& first = at(indices.front());
  for (auto i : indices) {
    const auto& tr = at(i);
    if (tr.total_pastes != first.total_pastes || tr.max_steps != first.max_steps) {
      throw ConfigurationError("transitions in one batch must share T_M and T_max");
    }
    canvas.push_back(to_tensor(tr.canvas));
    target.push_back(to_tensor(*tr.target));
    material.push_back(to_tensor(*tr.material));
    actions.push_back(to_tensor(tr.action));
    remaining.push_back(static_cast<float>(env::remaining_time(tr.t_m, tr.total_pastes)));
    steps.push_back(tr.t);
  }
  TransitionBatch b;
  b.state.canvas = torch::stack(canvas);
  b.state.target = torch::stack(target);
  b.state.material = torch::stack(material);
  b.state.remaining = torch::tensor(remaining);
  b.state.steps = torch::tensor(steps, torch::kInt64);
  b.state.total_pastes = first.total_pastes;
  b.state.max_steps = first.max_steps;
  b.actions = torch::stack(actions);
  return b;
}

TransitionBatch ReplayMemory::sample(std::size_t n, std::mt19937_64& rng) const {
  return batch(sample_indices(n, rng));
}

}  // namespace collage::agent
