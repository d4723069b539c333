#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include <torch/torch.h>

#include "collage/agent/state.hpp"
#include "collage/nn/layers.hpp"
#include "collage/render/action.hpp"

namespace collage::agent {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
// Sampled actions are kept this far inside (0,1).
inline constexpr double kActionMargin = 1e-6;

struct ModelConfig {
  int resolution = 32;
  nn::Backbone backbone = nn::Backbone::kSmallCnn;
  nn::Activation activation = nn::Activation::kRelu;
  int base_width = 32;

  nn::EncoderOptions encoder() const;
};

struct GaussianHead {
  torch::Tensor mean;     // [B,12], pre-squash
  torch::Tensor log_std;  // [B,12], clamped
};

struct PolicyNetImpl : torch::nn::Module {
  explicit PolicyNetImpl(const ModelConfig& config = {});
  GaussianHead forward(const torch::Tensor& input);  // [B,12,H,W]
  int resolution() const { return config_.resolution; }

 private:
  ModelConfig config_;
  nn::Encoder encoder_{nullptr};
  torch::nn::Linear head_{nullptr};
};
TORCH_MODULE(PolicyNet);

struct ValueNetImpl : torch::nn::Module {
  explicit ValueNetImpl(const ModelConfig& config = {});
  torch::Tensor forward(const torch::Tensor& input);  // [B]
  int resolution() const { return config_.resolution; }
  torch::nn::Linear head{nullptr};

 private:
  ModelConfig config_;
  nn::Encoder encoder_{nullptr};
};
TORCH_MODULE(ValueNet);

struct PolicySample {
  torch::Tensor actions;  // [B,12] in (0,1)
  torch::Tensor logp;     // [B]
};

// a = (tanh(u) + 1) / 2 with u ~ N(mean, std); logp includes the change-of-variables term.
// Deterministic mode returns the squashed mean. Gradients flow when grad mode is on.
PolicySample squashed_sample(const GaussianHead& head, bool deterministic,
                             std::optional<torch::Generator> generator = std::nullopt);
// Log-density of given actions under the squashed Gaussian.
torch::Tensor squashed_log_prob(const GaussianHead& head, const torch::Tensor& actions);

PolicySample act(PolicyNet& policy, const StateBatch& s, bool deterministic,
                 std::optional<torch::Generator> generator = std::nullopt);

struct SingleAction {
  render::ActionVector action;
  double logp = 0.0;
};
SingleAction act(PolicyNet& policy, const env::Episode& episode, bool deterministic,
                 std::optional<torch::Generator> generator = std::nullopt);

torch::Tensor value(ValueNet& v, const StateBatch& s);  // [B]
double value(ValueNet& v, const env::Episode& episode);

// Anything that maps states to actions; scripted policies in tests use this too.
using PolicyFn = std::function<PolicySample(const StateBatch&, bool deterministic)>;
PolicyFn policy_fn(PolicyNet policy, torch::Generator generator);

// Policy, value, target value and log temperature.
struct AgentModels {
  ModelConfig config;
  PolicyNet policy{nullptr};
  ValueNet value{nullptr};
  ValueNet value_target{nullptr};
  torch::Tensor log_alpha;

  static AgentModels create(const ModelConfig& config, double initial_alpha, std::uint64_t seed);
  double alpha() const { return log_alpha.exp().item<double>(); }
};

// target <- factor * online + (1 - factor) * target for every parameter and buffer.
void polyak_update(torch::nn::Module& target, const torch::nn::Module& online, double factor);

}  // namespace collage::agent
