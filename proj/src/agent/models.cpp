#include "collage/agent/models.hpp"

#include <cmath>
#include <numbers>

#include "collage/errors.hpp"
#include "collage/tensor_bridge.hpp"

namespace collage::agent {

nn::EncoderOptions ModelConfig::encoder() const {
  nn::EncoderOptions o;
  o.in_channels = kStateChannels;
  o.resolution = resolution;
  o.backbone = backbone;
  o.activation = activation;
  o.base_width = base_width;
  return o;
}

PolicyNetImpl::PolicyNetImpl(const ModelConfig& config) : config_(config) {
  encoder_ = register_module("encoder", nn::Encoder(config.encoder()));
  head_ = register_module("head",
                          torch::nn::Linear(encoder_->feature_size(), 2 * render::kActionDim));
  torch::NoGradGuard guard;
  head_->weight.mul_(0.1);
  head_->bias.zero_();
}

GaussianHead PolicyNetImpl::forward(const torch::Tensor& input) {
  auto out = head_->forward(encoder_->forward(input));
  auto parts = out.chunk(2, 1);
  return {parts[0], parts[1].clamp(kLogStdMin, kLogStdMax)};
}

ValueNetImpl::ValueNetImpl(const ModelConfig& config) : config_(config) {
  encoder_ = register_module("encoder", nn::Encoder(config.encoder()));
  head = register_module("head", torch::nn::Linear(encoder_->feature_size(), 1));
  torch::NoGradGuard guard;
  head->weight.zero_();
  head->bias.zero_();
}

torch::Tensor ValueNetImpl::forward(const torch::Tensor& input) {
  return head->forward(encoder_->forward(input)).squeeze(1);
}

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// log |da/du| for a = (tanh(u) + 1) / 2, written to stay finite for large |u|.
torch::Tensor log_squash_jacobian(const torch::Tensor& u) {
  return std::log(0.5) + 2.0 * (std::log(2.0) - u - torch::softplus(-2.0 * u));
}

torch::Tensor gaussian_squashed_logp(const GaussianHead& head, const torch::Tensor& u) {
  auto z = (u - head.mean) * torch::exp(-head.log_std);
  auto log_normal = -0.5 * z.pow(2) - head.log_std - kHalfLog2Pi;
  return (log_normal - log_squash_jacobian(u)).sum(1);
}

}  // namespace

PolicySample squashed_sample(const GaussianHead& head, bool deterministic,
                             std::optional<torch::Generator> generator) {
  torch::Tensor u = head.mean;
  if (!deterministic) {
    auto eps = torch::randn(head.mean.sizes(), generator, head.mean.options());
    u = head.mean + head.log_std.exp() * eps;
  }
  auto a = ((torch::tanh(u) + 1.0) * 0.5).clamp(kActionMargin, 1.0 - kActionMargin);
  return {a, gaussian_squashed_logp(head, u)};
}

torch::Tensor squashed_log_prob(const GaussianHead& head, const torch::Tensor& actions) {
  auto a = actions.clamp(kActionMargin, 1.0 - kActionMargin);
  auto u = torch::atanh(2.0 * a - 1.0);
  return gaussian_squashed_logp(head, u);
}

PolicySample act(PolicyNet& policy, const StateBatch& s, bool deterministic,
                 std::optional<torch::Generator> generator) {
  return squashed_sample(policy->forward(network_input(s)), deterministic, generator);
}

SingleAction act(PolicyNet& policy, const env::Episode& episode, bool deterministic,
                 std::optional<torch::Generator> generator) {
  torch::NoGradGuard guard;
  auto out = act(policy, make_state_batch(episode), deterministic, generator);
  return {to_action(out.actions[0]), out.logp[0].item<double>()};
}

torch::Tensor value(ValueNet& v, const StateBatch& s) { return v->forward(network_input(s)); }

double value(ValueNet& v, const env::Episode& episode) {
  torch::NoGradGuard guard;
  return value(v, make_state_batch(episode))[0].item<double>();
}

PolicyFn policy_fn(PolicyNet policy, torch::Generator generator) {
  return [policy, generator](const StateBatch& s, bool deterministic) mutable {
    return act(policy, s, deterministic, generator);
  };
}

AgentModels AgentModels::create(const ModelConfig& config, double initial_alpha,
                                std::uint64_t seed) {
  if (!(initial_alpha > 0.0)) throw ConfigurationError("initial alpha must be positive");
  torch::manual_seed(seed);
  AgentModels m;
  m.config = config;
  m.policy = PolicyNet(config);
  m.value = ValueNet(config);
  m.value_target = ValueNet(config);
  nn::copy_parameters(*m.value_target, *m.value);
  for (auto& p : m.value_target->parameters()) p.set_requires_grad(false);
  m.log_alpha = torch::full({1}, std::log(initial_alpha), torch::kFloat32).requires_grad_(true);
  return m;
}

void polyak_update(torch::nn::Module& target, const torch::nn::Module& online, double factor) {
  if (!(factor > 0.0 && factor <= 1.0)) throw ConfigurationError("polyak factor must be in (0,1]");
  torch::NoGradGuard guard;
  auto tp = target.named_parameters(true);
  auto op = online.named_parameters(true);
  if (tp.size() != op.size()) throw DimensionError("polyak_update: architectures differ");
  for (const auto& item : op) {
    auto* dst = tp.find(item.key());
    if (dst == nullptr) throw DimensionError("polyak_update: missing parameter " + item.key());
    dst->mul_(1.0 - factor).add_(item.value(), factor);
  }
  auto tb = target.named_buffers(true);
  for (const auto& item : online.named_buffers(true)) {
    if (auto* dst = tb.find(item.key())) dst->copy_(item.value());
  }
}

}  // namespace collage::agent
