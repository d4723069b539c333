#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>

#include <torch/torch.h>

#include "collage/agent/models.hpp"
#include "collage/agent/replay.hpp"
#include "collage/agent/state.hpp"
#include "collage/render/differentiable.hpp"
#include "collage/reward/critic.hpp"

namespace collage::agent {

struct AgentConfig {
  double gamma = 0.95;
  double initial_alpha = 0.01;
  bool auto_alpha = true;
  double target_entropy = -12.0;
  double polyak = 0.005;
  int batch_size = 64;
  int updates_per_episode = 5;
  double policy_lr = 3e-4;
  double value_lr = 1e-3;
  double alpha_lr = 3e-4;
  std::size_t replay_capacity = kDefaultReplayCapacity;

  void validate() const;  // throws ConfigurationError
};

// Frozen models used to roll the state forward inside an update.
struct ModelContext {
  const render::TransitionModel& transition;
  const reward::RewardModel& reward;
  const MaterialBank& materials;
  torch::Generator& generator;
};

struct ValueTargets {
  StateBatch next_state;  // s_{t+1} = P(s_t, a_t) with a fresh material
  torch::Tensor target;   // r(s_{t+1}, a_{t+1}) + gamma * V'(s_{t+2}) - alpha * log pi(a_{t+1}|s_{t+1})
  torch::Tensor valid;    // 0 where s_{t+1} is already terminal
};

// Two model steps from each stored (s_t, a_t); no gradient reaches any model.
// Throws UsageError on an empty batch.
ValueTargets compute_value_target(const TransitionBatch& batch, const PolicyFn& policy,
                                  ValueNet& value_target, const ModelContext& models,
                                  double gamma, double alpha);

// One step on 0.5 * mean (V(s_{t+1}) - target)^2 over valid rows. Returns the loss.
double update_value(ValueNet& v, torch::optim::Optimizer& optimizer, const ValueTargets& targets);

struct PolicyUpdate {
  double loss = 0.0;
  torch::Tensor logp;  // detached, [B]
  double mean_log_std = 0.0;
};

// One step on alpha * log pi(a|s) - (r(s,a) + gamma * V'(P(s,a))) with reparameterised a.
// Only the policy parameters receive gradients.
PolicyUpdate update_policy(PolicyNet& policy, torch::optim::Optimizer& optimizer,
                           ValueNet& value_target, const TransitionBatch& batch,
                           const ModelContext& models, double gamma, double alpha);

// Gradient step on log alpha towards the target entropy; returns the new alpha.
// A no-op when auto-tuning is off.
double update_temperature(torch::Tensor& log_alpha, torch::optim::Optimizer& optimizer,
                          const torch::Tensor& logp, const AgentConfig& config);

struct UpdateReport {
  double value_loss = 0.0;
  double policy_loss = 0.0;
  double alpha = 0.0;
  double entropy = 0.0;  // -mean log pi
};

// Owns optimiser state; one update() is value, policy, temperature and Polyak in order.
class MbSacLearner {
 public:
  MbSacLearner(AgentModels& models, const AgentConfig& config,
               std::shared_ptr<const render::TransitionModel> transition,
               std::shared_ptr<const reward::RewardModel> reward, MaterialBank materials,
               std::uint64_t seed);

  UpdateReport update(const TransitionBatch& batch);
  torch::Generator& generator() { return generator_; }
  const AgentConfig& config() const { return config_; }

 private:
  AgentModels& models_;
  AgentConfig config_;
  std::shared_ptr<const render::TransitionModel> transition_;
  std::shared_ptr<const reward::RewardModel> reward_;
  MaterialBank materials_;
  torch::Generator generator_;
  std::unique_ptr<torch::optim::Adam> policy_opt_;
  std::unique_ptr<torch::optim::Adam> value_opt_;
  std::unique_ptr<torch::optim::Adam> alpha_opt_;
};

}  // namespace collage::agent
