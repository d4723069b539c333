#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "collage/agent/trainer.hpp"
#include "collage/planner/collage.hpp"
#include "collage/render/shaper.hpp"

namespace collage::io {

// Every tunable, as flat `key = value` text. Unknown keys and invalid values are rejected.
struct RunConfig {
  // Networks and environment.
  int resolution = 32;
  int scraps = 5;       // T_M
  int max_steps = 0;    // T_max, 0 selects 4 * T_M
  std::string backbone = "small_cnn";
  std::string activation = "relu";
  int base_width = 32;

  // Training.
  int episodes = 10000;
  int workers = 16;
  int eval_interval = 1000;
  int eval_targets = 32;
  double eval_fraction = 0.2;
  std::uint64_t split_seed = 7;
  std::uint64_t seed = 1;
  std::uint64_t eval_seed = 20231;

  // Agent.
  double gamma = 0.95;
  double alpha = 0.01;
  bool auto_alpha = true;
  double target_entropy = -12.0;
  double polyak = 0.005;
  int batch_size = 64;
  int updates_per_episode = 5;
  double policy_lr = 3e-4;
  double value_lr = 1e-3;
  double alpha_lr = 3e-4;
  int replay_capacity = 20000;

  // Reward.
  std::string reward = "wgan_gp";
  double step_penalty = -1.0;
  double gp_lambda = 10.0;
  double critic_lr = 3e-4;

  // Shaper pretraining.
  int shaper_steps = 20000;
  int shaper_batch = 64;
  double shaper_lr = 1e-3;
  std::string shaper_activation = "silu";
  std::uint64_t shaper_seed = 1;

  // Multi-scale inference.
  std::vector<int> scales{512, 256, 128, 64, 32};
  double rho = 0.5;
  int kmax = 8;
  double tau = 1.0;
  std::optional<double> fixed_l = 0.1;
  int candidates = 8;

  // Throws ConfigurationError naming the key.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static const std::vector<std::string>& keys();

  void validate() const;
  std::string to_text() const;
  static RunConfig from_text(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);

  agent::TrainConfig train_config() const;
  render::ShaperConfig shaper_config() const;
  agent::ModelConfig model_config() const;
  planner::CollageConfig collage_config() const;
};

}  // namespace collage::io
