#pragma once

#include <optional>
#include <string>

#include <torch/torch.h>

#include "collage/imaging/image.hpp"

namespace collage::reward {

enum class RewardMode { kWganGp, kMse };

RewardMode parse_reward_mode(const std::string& name);  // "wgan_gp" | "mse"
std::string to_string(RewardMode mode);

struct RewardConfig {
  RewardMode mode = RewardMode::kWganGp;
  double step_penalty = -1.0;
  double gp_lambda = 10.0;
  double critic_lr = 3e-4;

  void validate() const;  // throws ConfigurationError
};

// Scores (image, target) pairs from their 6-channel concatenation.
// Four stride-2 weight-normalised convolutions, global average pooling, linear head.
// The head starts at zero so a fresh critic scores every pair 0.
struct CriticNetImpl : torch::nn::Module {
  CriticNetImpl();
  torch::Tensor forward(const torch::Tensor& pairs);  // [B,6,H,W] -> [B]
  torch::nn::Linear head{nullptr};

 private:
  torch::nn::Sequential body_{nullptr};
};
TORCH_MODULE(CriticNet);

// image ⊕ target along channels: [B,3,H,W] x2 -> [B,6,H,W].
torch::Tensor make_pairs(const torch::Tensor& images, const torch::Tensor& targets);

double critic_score(CriticNet& critic, const imaging::ImagePlane& image,
                    const imaging::ImagePlane& target);

struct CriticReport {
  double wasserstein = 0.0;  // E[D(real)] - E[D(fake)]
  double penalty = 0.0;      // E[(||grad D(x_hat)|| - 1)^2], before weighting
  double loss = 0.0;
};

// One optimiser step on E[D(fake)] - E[D(real)] + lambda * penalty.
// Throws TrainingDiverged on a non-finite loss and UsageError on empty batches.
CriticReport update_critic(CriticNet& critic, torch::optim::Optimizer& optimizer,
                           const torch::Tensor& real_pairs, const torch::Tensor& fake_pairs,
                           const RewardConfig& config,
                           std::optional<torch::Generator> generator = std::nullopt);

// Similarity score whose increase is the reward.
class RewardModel {
 public:
  explicit RewardModel(double step_penalty) : step_penalty_(step_penalty) {}
  virtual ~RewardModel() = default;

  // Batched, differentiable w.r.t. canvas: [B,3,H,W] x2 -> [B].
  virtual torch::Tensor score(const torch::Tensor& canvas, const torch::Tensor& target) const = 0;
  // Double precision score of one pair.
  virtual double score(const imaging::ImagePlane& canvas,
                       const imaging::ImagePlane& target) const = 0;

  torch::Tensor reward(const torch::Tensor& prev_canvas, const torch::Tensor& canvas,
                       const torch::Tensor& target) const;
  double reward(const imaging::ImagePlane& prev_canvas, const imaging::ImagePlane& canvas,
                const imaging::ImagePlane& target) const;

  double step_penalty() const { return step_penalty_; }

 private:
  double step_penalty_;
};

class CriticReward final : public RewardModel {
 public:
  CriticReward(CriticNet critic, double step_penalty);
  torch::Tensor score(const torch::Tensor& canvas, const torch::Tensor& target) const override;
  double score(const imaging::ImagePlane& canvas,
               const imaging::ImagePlane& target) const override;
  CriticNet& critic() const { return critic_; }

 private:
  mutable CriticNet critic_;
};

// score = -mse(canvas, target): no learned component.
class MseReward final : public RewardModel {
 public:
  explicit MseReward(double step_penalty) : RewardModel(step_penalty) {}
  torch::Tensor score(const torch::Tensor& canvas, const torch::Tensor& target) const override;
  double score(const imaging::ImagePlane& canvas,
               const imaging::ImagePlane& target) const override;
};

}  // namespace collage::reward
