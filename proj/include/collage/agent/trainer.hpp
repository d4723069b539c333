#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "collage/agent/mbsac.hpp"
#include "collage/agent/models.hpp"
#include "collage/env/environment.hpp"
#include "collage/render/shaper.hpp"
#include "collage/reward/critic.hpp"

namespace collage::agent {

struct TrainConfig {
  int total_pastes = 5;   // T_M
  int max_steps = 0;      // T_max; 0 selects 4 * T_M
  int episodes = 10000;
  int workers = 16;       // environments stepped in lockstep
  int eval_interval = 1000;
  int eval_targets = 32;
  std::uint64_t seed = 1;
  std::uint64_t eval_seed = 20231;
  ModelConfig model;
  AgentConfig agent;
  reward::RewardConfig reward;

  int effective_max_steps() const {
    return max_steps > 0 ? max_steps : env::default_max_steps(total_pastes);
  }
  void validate() const;  // throws ConfigurationError
};

struct MetricsRow {
  long episode = 0;
  long env_steps = 0;
  double eval_mse = 0.0;
  double value_loss = 0.0;
  double policy_loss = 0.0;
  std::optional<double> critic_wass;  // absent in mse mode
  double alpha = 0.0;
};

struct Corpus {
  std::vector<env::ImagePtr> train_targets;
  std::vector<env::ImagePtr> eval_targets;
  std::vector<env::ImagePtr> materials;
};

struct TrainResult {
  AgentModels models;
  reward::CriticNet critic{nullptr};
  std::vector<MetricsRow> metrics;
  double baseline_mse = 0.0;  // white canvas on the eval targets
  double final_eval_mse = 0.0;
};

using MetricsSink = std::function<void(const MetricsRow&)>;

// Lockstep parallel environments with real steps through transition_exact, replay of every
// transition, and after each round of episodes updates_per_episode learner updates plus one
// critic update. Throws ConfigurationError when the shaper is untrained or a corpus is empty.
TrainResult train(const TrainConfig& config, const Corpus& corpus, render::ShaperNet shaper,
                  const MetricsSink& sink = {});

struct EvalConfig {
  int total_pastes = 5;
  int max_steps = 20;
  std::uint64_t seed = 20231;
};

// Deterministic-policy episodes on each target; mean final-canvas MSE.
double evaluate(PolicyNet& policy, const std::vector<env::ImagePtr>& targets,
                const std::vector<env::ImagePtr>& materials, const EvalConfig& config);

double white_canvas_mse(const std::vector<env::ImagePtr>& targets);

}  // namespace collage::agent
