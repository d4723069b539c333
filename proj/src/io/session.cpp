#include "collage/io/session.hpp"

#include "json.hpp"

#include "collage/errors.hpp"
#include "collage/io/dataset.hpp"

namespace collage::io {

std::vector<env::ImagePtr> share(std::vector<imaging::ImagePlane> images) {
  std::vector<env::ImagePtr> out;
  out.reserve(images.size());
  for (auto& img : images) out.push_back(std::make_shared<const imaging::ImagePlane>(std::move(img)));
  return out;
}

agent::Corpus load_corpus(const RunConfig& config, const std::filesystem::path& targets,
                          const std::filesystem::path& materials) {
  DatasetSpec spec{targets, Split::kTrain, config.resolution, config.eval_fraction, config.split_seed};
  agent::Corpus corpus;
  corpus.train_targets = share(load_dataset(spec));
  spec.split = Split::kEval;
  corpus.eval_targets = share(load_dataset(spec));
  corpus.materials =
      share(load_dataset({materials, Split::kAll, config.resolution, 0.0, config.split_seed}));
  return corpus;
}

std::string metrics_line(const agent::MetricsRow& r) {
  nlohmann::json row = {{"episode", r.episode},         {"env_steps", r.env_steps},
                        {"eval_mse", r.eval_mse},       {"value_loss", r.value_loss},
                        {"policy_loss", r.policy_loss}, {"critic_wass", nullptr},
                        {"alpha", r.alpha}};
  if (r.critic_wass) row["critic_wass"] = *r.critic_wass;
  return row.dump();
}

Checkpoint agent_checkpoint(const RunConfig& config, const render::ShaperNet& shaper,
                            const agent::TrainResult& result, double train_seconds) {
  Checkpoint out;
  out.config = config;
  out.shaper = shaper;
  out.agent = result.models;
  if (reward::parse_reward_mode(config.reward) == reward::RewardMode::kWganGp) out.critic = result.critic;
  out.metadata = {{"final_eval_mse", result.final_eval_mse},
                  {"baseline_mse", result.baseline_mse},
                  {"train_seconds", train_seconds}};
  return out;
}

std::shared_ptr<const reward::RewardModel> inference_reward(const Checkpoint& checkpoint) {
  if (reward::parse_reward_mode(checkpoint.config.reward) == reward::RewardMode::kMse) {
    return std::make_shared<reward::MseReward>(0.0);
  }
  if (!checkpoint.critic) throw ConfigurationError("checkpoint has no critic for wgan_gp scoring");
  return std::make_shared<reward::CriticReward>(checkpoint.critic, 0.0);
}

planner::CollageAgent collage_agent(const Checkpoint& checkpoint) {
  if (!checkpoint.agent || !checkpoint.shaper) {
    throw ConfigurationError("checkpoint lacks a trained agent (run train first)");
  }
  planner::CollageAgent agent;
  agent.policy = checkpoint.agent->policy;
  agent.value_target = checkpoint.agent->value_target;
  agent.shaper = checkpoint.shaper;
  agent.reward = inference_reward(checkpoint);
  agent.total_pastes = checkpoint.config.scraps;
  agent.gamma = checkpoint.config.gamma;
  return agent;
}

}  // namespace collage::io
