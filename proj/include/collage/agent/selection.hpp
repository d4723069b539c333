#pragma once

#include <optional>
#include <vector>

#include <torch/torch.h>

#include "collage/agent/models.hpp"
#include "collage/agent/state.hpp"
#include "collage/render/differentiable.hpp"
#include "collage/reward/critic.hpp"

namespace collage::agent {

struct SelectionOptions {
  double gamma = 0.95;
  bool force_accept = false;
};

struct Selection {
  int index = 0;
  std::vector<double> scores;  // r + gamma * V'(s') per candidate
  torch::Tensor actions;       // [K,12] deterministic action per candidate
};

// Offers each candidate material in turn, takes the policy's deterministic action, rolls the
// model one step (next offered material shared across candidates) and returns the argmax of
// r + gamma * V'(s'). Ties go to the lowest index. Throws UsageError on an empty candidate set.
Selection select_material(const StateBatch& state, const torch::Tensor& candidates,
                          const PolicyFn& policy, ValueNet& value_target,
                          const render::TransitionModel& transition,
                          const reward::RewardModel& reward, const torch::Tensor& next_material,
                          const SelectionOptions& options = {});

int argmax_lowest(const std::vector<double>& scores);

}  // namespace collage::agent
