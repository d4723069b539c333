#include "collage/reward/critic.hpp"

#include <cmath>
#include <utility>

#include "collage/errors.hpp"
#include "collage/imaging/metrics.hpp"
#include "collage/nn/layers.hpp"
#include "collage/tensor_bridge.hpp"

namespace collage::reward {

RewardMode parse_reward_mode(const std::string& name) {
  if (name == "wgan_gp") return RewardMode::kWganGp;
  if (name == "mse") return RewardMode::kMse;
  throw ConfigurationError("unknown reward mode '" + name + "' (expected wgan_gp or mse)");
}

std::string to_string(RewardMode mode) { return mode == RewardMode::kMse ? "mse" : "wgan_gp"; }

void RewardConfig::validate() const {
  if (!std::isfinite(step_penalty)) throw ConfigurationError("step penalty must be finite");
  if (mode == RewardMode::kWganGp && !(gp_lambda > 0.0)) {
    throw ConfigurationError("gradient-penalty weight must be positive");
  }
  if (!(critic_lr > 0.0)) throw ConfigurationError("critic learning rate must be positive");
}

CriticNetImpl::CriticNetImpl() {
  body_ = torch::nn::Sequential();
  const int64_t widths[] = {6, 16, 32, 64, 128};
  for (int i = 0; i < 4; ++i) {
    body_->push_back(nn::WNConv2d(widths[i], widths[i + 1], 5, 2, 2));
    body_->push_back(torch::nn::LeakyReLU(torch::nn::LeakyReLUOptions().negative_slope(0.2)));
  }
  register_module("body", body_);
  head = register_module("head", torch::nn::Linear(128, 1));
  torch::NoGradGuard guard;
  head->weight.zero_();
  head->bias.zero_();
}

torch::Tensor CriticNetImpl::forward(const torch::Tensor& pairs) {
  if (pairs.dim() != 4 || pairs.size(1) != 6) {
    throw DimensionError("critic expects [B,6,H,W] input");
  }
  auto h = body_->forward(pairs).mean({2, 3});
  return head->forward(h).squeeze(1);
}

torch::Tensor make_pairs(const torch::Tensor& images, const torch::Tensor& targets) {
  if (images.sizes() != targets.sizes()) throw DimensionError("pair operands differ in shape");
  return torch::cat({images, targets}, 1);
}

double critic_score(CriticNet& critic, const imaging::ImagePlane& image,
                    const imaging::ImagePlane& target) {
  if (!image.same_shape(target)) throw DimensionError("critic_score: shape mismatch");
  torch::NoGradGuard guard;
  auto pair = make_pairs(to_tensor(image).unsqueeze(0), to_tensor(target).unsqueeze(0));
  return static_cast<double>(critic->forward(pair).item<float>());
}

CriticReport update_critic(CriticNet& critic, torch::optim::Optimizer& optimizer,
                           const torch::Tensor& real_pairs, const torch::Tensor& fake_pairs,
                           const RewardConfig& config, std::optional<torch::Generator> generator) {
  if (real_pairs.numel() == 0 || fake_pairs.numel() == 0) {
    throw UsageError("update_critic needs non-empty batches");
  }
  if (real_pairs.sizes() != fake_pairs.sizes()) throw DimensionError("critic batches differ");

  const auto real = real_pairs.detach();
  const auto fake = fake_pairs.detach();
  auto d_real = critic->forward(real).mean();
  auto d_fake = critic->forward(fake).mean();

  auto eps = torch::rand({real.size(0), 1, 1, 1}, generator, real.options());
  auto x_hat = (eps * real + (1 - eps) * fake).requires_grad_(true);
  auto d_hat = critic->forward(x_hat);
  auto grads = torch::autograd::grad({d_hat.sum()}, {x_hat}, {}, true, true)[0];
  auto grad_norm = grads.flatten(1).norm(2, 1);
  auto penalty = (grad_norm - 1).pow(2).mean();

  auto loss = d_fake - d_real + config.gp_lambda * penalty;
  CriticReport report;
  report.loss = loss.item<double>();
  if (!std::isfinite(report.loss)) throw TrainingDiverged("critic loss is not finite");
  report.wasserstein = (d_real - d_fake).item<double>();
  report.penalty = penalty.item<double>();

  optimizer.zero_grad();
  loss.backward();
  optimizer.step();
  return report;
}

torch::Tensor RewardModel::reward(const torch::Tensor& prev_canvas, const torch::Tensor& canvas,
                                  const torch::Tensor& target) const {
  if (prev_canvas.sizes() != canvas.sizes() || canvas.sizes() != target.sizes()) {
    throw DimensionError("reward: shape mismatch");
  }
  return score(canvas, target) - score(prev_canvas, target) + step_penalty_;
}

double RewardModel::reward(const imaging::ImagePlane& prev_canvas,
                           const imaging::ImagePlane& canvas,
                           const imaging::ImagePlane& target) const {
  if (!prev_canvas.same_shape(canvas) || !canvas.same_shape(target)) {
    throw DimensionError("reward: shape mismatch");
  }
  return score(canvas, target) - score(prev_canvas, target) + step_penalty_;
}

CriticReward::CriticReward(CriticNet critic, double step_penalty)
    : RewardModel(step_penalty), critic_(std::move(critic)) {}

torch::Tensor CriticReward::score(const torch::Tensor& canvas, const torch::Tensor& target) const {
  return critic_->forward(make_pairs(canvas, target));
}

double CriticReward::score(const imaging::ImagePlane& canvas,
                           const imaging::ImagePlane& target) const {
  return critic_score(critic_, canvas, target);
}

torch::Tensor MseReward::score(const torch::Tensor& canvas, const torch::Tensor& target) const {
  if (canvas.sizes() != target.sizes()) throw DimensionError("mse score: shape mismatch");
  return -(canvas - target).pow(2).flatten(1).mean(1);
}

double MseReward::score(const imaging::ImagePlane& canvas,
                        const imaging::ImagePlane& target) const {
  return -imaging::mse(canvas, target);
}

}  // namespace collage::reward
