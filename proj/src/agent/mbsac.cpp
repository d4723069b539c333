#include "collage/agent/mbsac.hpp"

#include <cmath>
#include <utility>

#include <ATen/CPUGeneratorImpl.h>

#include "collage/errors.hpp"

namespace collage::agent {

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigurationError("gamma must lie in [0,1]");
  if (!(initial_alpha > 0.0)) throw ConfigurationError("alpha must be positive");
  if (!(polyak > 0.0 && polyak <= 1.0)) throw ConfigurationError("polyak factor must be in (0,1]");
  if (batch_size < 1) throw ConfigurationError("batch size must be positive");
  if (updates_per_episode < 0) throw ConfigurationError("updates per episode must be >= 0");
  if (!(policy_lr > 0.0 && value_lr > 0.0 && alpha_lr > 0.0)) {
    throw ConfigurationError("learning rates must be positive");
  }
  if (replay_capacity == 0) throw ConfigurationError("replay capacity must be positive");
}

namespace {

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw TrainingDiverged(std::string(what) + " is not finite");
}

}  // namespace

ValueTargets compute_value_target(const TransitionBatch& batch, const PolicyFn& policy,
                                  ValueNet& value_target, const ModelContext& models,
                                  double gamma, double alpha) {
  if (batch.size() == 0) throw UsageError("compute_value_target: empty batch");
  torch::NoGradGuard guard;
  const auto n = batch.size();

  ValueTargets out;
  out.next_state = model_step(batch.state, batch.actions, models.transition,
                              models.materials.sample(n, models.generator));
  const auto& s1 = out.next_state;
  auto next = policy(s1, false);
  auto s2 = model_step(s1, next.actions, models.transition,
                       models.materials.sample(n, models.generator));
  auto r = models.reward.reward(s1.canvas, s2.canvas, s1.target);
  auto live = s2.terminal().logical_not().to(r.dtype());
  auto bootstrap = gamma == 0.0 ? torch::zeros_like(r) : value(value_target, s2) * live;
  out.target = r + gamma * bootstrap - alpha * next.logp;
  out.valid = s1.terminal().logical_not().to(r.dtype());
  return out;
}

double update_value(ValueNet& v, torch::optim::Optimizer& optimizer, const ValueTargets& targets) {
  auto pred = value(v, targets.next_state);
  auto count = targets.valid.sum().clamp_min(1.0);
  auto loss = 0.5 * ((pred - targets.target).pow(2) * targets.valid).sum() / count;
  const double loss_value = loss.item<double>();
  check_finite(loss_value, "value loss");
  if (targets.valid.sum().item<double>() == 0.0) return 0.0;
  optimizer.zero_grad();
  loss.backward();
  optimizer.step();
  return loss_value;
}

PolicyUpdate update_policy(PolicyNet& policy, torch::optim::Optimizer& optimizer,
                           ValueNet& value_target, const TransitionBatch& batch,
                           const ModelContext& models, double gamma, double alpha) {
  if (batch.size() == 0) throw UsageError("update_policy: empty batch");
  const auto& s = batch.state;
  auto head = policy->forward(network_input(s));
  auto sample = squashed_sample(head, false, models.generator);
  auto next = model_step(s, sample.actions, models.transition,
                         models.materials.sample(batch.size(), models.generator));
  auto r = models.reward.reward(s.canvas, next.canvas, s.target);
  auto live = next.terminal().logical_not().to(r.dtype());
  auto bootstrap = gamma == 0.0 ? torch::zeros_like(r) : value(value_target, next) * live;
  auto loss = (alpha * sample.logp - (r + gamma * bootstrap)).mean();

  PolicyUpdate out;
  out.loss = loss.item<double>();
  check_finite(out.loss, "policy loss");
  out.logp = sample.logp.detach();
  out.mean_log_std = head.log_std.mean().item<double>();

  auto params = policy->parameters();
  auto grads = torch::autograd::grad({loss}, params, {}, false, false, true);
  optimizer.zero_grad();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].defined()) params[i].mutable_grad() = grads[i].clone();
  }
  optimizer.step();
  return out;
}

double update_temperature(torch::Tensor& log_alpha, torch::optim::Optimizer& optimizer,
                          const torch::Tensor& logp, const AgentConfig& config) {
  if (!config.auto_alpha) return log_alpha.exp().item<double>();
  auto gap = (logp.detach() + config.target_entropy).mean();
  auto loss = -(log_alpha * gap).sum();
  optimizer.zero_grad();
  loss.backward();
  optimizer.step();
  return log_alpha.exp().item<double>();
}

MbSacLearner::MbSacLearner(AgentModels& models, const AgentConfig& config,
                           std::shared_ptr<const render::TransitionModel> transition,
                           std::shared_ptr<const reward::RewardModel> reward,
                           MaterialBank materials, std::uint64_t seed)
    : models_(models),
      config_(config),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      materials_(std::move(materials)),
      generator_(at::make_generator<at::CPUGeneratorImpl>(seed)) {
  config_.validate();
  if (!transition_ || !reward_) throw ConfigurationError("learner needs transition and reward models");
  policy_opt_ = std::make_unique<torch::optim::Adam>(models_.policy->parameters(),
                                                     torch::optim::AdamOptions(config_.policy_lr));
  value_opt_ = std::make_unique<torch::optim::Adam>(models_.value->parameters(),
                                                    torch::optim::AdamOptions(config_.value_lr));
  alpha_opt_ = std::make_unique<torch::optim::Adam>(std::vector<torch::Tensor>{models_.log_alpha},
                                                    torch::optim::AdamOptions(config_.alpha_lr));
}

UpdateReport MbSacLearner::update(const TransitionBatch& batch) {
  ModelContext ctx{*transition_, *reward_, materials_, generator_};
  const double alpha = models_.alpha();
  UpdateReport report;

  auto targets = compute_value_target(batch, policy_fn(models_.policy, generator_),
                                      models_.value_target, ctx, config_.gamma, alpha);
  report.value_loss = update_value(models_.value, *value_opt_, targets);

  auto pu = update_policy(models_.policy, *policy_opt_, models_.value_target, batch, ctx,
                          config_.gamma, alpha);
  report.policy_loss = pu.loss;
  report.entropy = -pu.logp.mean().item<double>();
  report.alpha = update_temperature(models_.log_alpha, *alpha_opt_, pu.logp, config_);

  polyak_update(*models_.value_target, *models_.value, config_.polyak);
  return report;
}

}  // namespace collage::agent
