#include "collage/agent/trainer.hpp"

#include <algorithm>
#include <memory>
#include <random>
#include <span>
#include <string>

#include <ATen/CPUGeneratorImpl.h>

#include "collage/errors.hpp"
#include "collage/imaging/metrics.hpp"
#include "collage/tensor_bridge.hpp"

namespace collage::agent {

void TrainConfig::validate() const {
  if (total_pastes < 1) throw ConfigurationError("T_M must be at least 1");
  if (effective_max_steps() < total_pastes) throw ConfigurationError("T_max must be >= T_M");
  if (episodes < 1) throw ConfigurationError("episode count must be positive");
  if (workers < 1) throw ConfigurationError("worker count must be positive");
  if (eval_interval < 1) throw ConfigurationError("eval interval must be positive");
  if (eval_targets < 1) throw ConfigurationError("eval target count must be positive");
  if (model.resolution < 16 || model.resolution % 16 != 0) {
    throw ConfigurationError("network resolution must be a positive multiple of 16");
  }
  agent.validate();
  reward.validate();
}

namespace {

// Steps every episode to termination with batched policy calls. When `replay` is given the
// pre-step snapshots are appended per episode, in episode order, after all have finished.
long rollout(PolicyNet& policy, std::vector<env::Episode>& episodes,
             std::span<env::MaterialSource> sources, bool deterministic,
             std::optional<torch::Generator> generator, ReplayMemory* replay) {
  const auto n = static_cast<int>(episodes.size());
  std::vector<std::vector<Transition>> pending(static_cast<std::size_t>(n));
  long steps = 0;
  for (;;) {
    std::vector<int> live;
    for (int i = 0; i < n; ++i) {
      if (!episodes[i].clock.terminal()) live.push_back(i);
    }
    if (live.empty()) break;

    std::vector<const env::Episode*> view;
    for (int i : live) view.push_back(&episodes[i]);
    torch::Tensor actions;
    {
      torch::NoGradGuard guard;
      actions = act(policy, make_state_batch(view), deterministic, generator).actions;
    }
    std::vector<render::ActionVector> decoded;
    for (std::size_t k = 0; k < live.size(); ++k) decoded.push_back(to_action(actions[k]));

    const int m = static_cast<int>(live.size());
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < m; ++k) {
      const int i = live[k];
      if (replay != nullptr) pending[i].push_back(Transition::capture(episodes[i], decoded[k]));
      env::step(episodes[i], decoded[k], sources[i]);
    }
    steps += m;
  }
  if (replay != nullptr) {
    for (auto& list : pending) {
      for (auto& t : list) replay->push(std::move(t));
    }
  }
  return steps;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

double white_canvas_mse(const std::vector<env::ImagePtr>& targets) {
  if (targets.empty()) throw ConfigurationError("no evaluation targets");
  double total = 0.0;
  for (const auto& t : targets) {
    total += imaging::mse(imaging::ImagePlane(t->height(), t->width(), 1.0f), *t);
  }
  return total / static_cast<double>(targets.size());
}

double evaluate(PolicyNet& policy, const std::vector<env::ImagePtr>& targets,
                const std::vector<env::ImagePtr>& materials, const EvalConfig& config) {
  if (targets.empty()) throw ConfigurationError("no evaluation targets");
  const int res = policy->resolution();
  auto pool = std::make_shared<const std::vector<env::ImagePtr>>(env::prepare_pool(materials, res));
  std::vector<env::MaterialSource> sources;
  std::vector<env::Episode> episodes;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    sources.emplace_back(pool, res, mix_seed(config.seed, i));
    episodes.push_back(env::reset(targets[i], sources.back(), config.total_pastes,
                                  config.max_steps));
  }
  rollout(policy, episodes, sources, true, std::nullopt, nullptr);
  double total = 0.0;
  for (const auto& ep : episodes) total += imaging::mse(ep.state.canvas, *ep.state.target);
  return total / static_cast<double>(episodes.size());
}

TrainResult train(const TrainConfig& config, const Corpus& corpus, render::ShaperNet shaper,
                  const MetricsSink& sink) {
  config.validate();
  if (!shaper || !shaper->trained()) {
    throw ConfigurationError("training needs a pretrained shaper");
  }
  if (corpus.train_targets.empty()) throw ConfigurationError("no training targets");
  if (corpus.materials.empty()) throw ConfigurationError("no materials");
  const int res = config.model.resolution;
  if (shaper->resolution() != res) {
    throw ConfigurationError("shaper resolution " + std::to_string(shaper->resolution()) +
                             " differs from network resolution " + std::to_string(res));
  }

  if (corpus.eval_targets.empty()) throw ConfigurationError("no evaluation targets");
  auto eval_targets = env::prepare_pool(corpus.eval_targets, res);
  if (static_cast<int>(eval_targets.size()) > config.eval_targets) {
    eval_targets.resize(static_cast<std::size_t>(config.eval_targets));
  }
  const auto train_targets = env::prepare_pool(corpus.train_targets, res);
  auto pool = std::make_shared<const std::vector<env::ImagePtr>>(
      env::prepare_pool(corpus.materials, res));

  TrainResult result;
  result.models = AgentModels::create(config.model, config.agent.initial_alpha, config.seed);
  result.critic = reward::CriticNet();
  for (auto& p : shaper->parameters()) p.set_requires_grad(false);

  auto transition = std::make_shared<render::ShaperTransition>(shaper);
  std::shared_ptr<const reward::RewardModel> reward_model;
  const bool adversarial = config.reward.mode == reward::RewardMode::kWganGp;
  if (adversarial) {
    reward_model = std::make_shared<reward::CriticReward>(result.critic, config.reward.step_penalty);
  } else {
    reward_model = std::make_shared<reward::MseReward>(config.reward.step_penalty);
  }
  torch::optim::Adam critic_opt(
      result.critic->parameters(),
      torch::optim::AdamOptions(config.reward.critic_lr).betas({0.5, 0.999}));

  MbSacLearner learner(result.models, config.agent, transition, reward_model, MaterialBank(*pool),
                       mix_seed(config.seed, 1));
  auto rollout_gen = at::make_generator<at::CPUGeneratorImpl>(mix_seed(config.seed, 2));
  auto critic_gen = at::make_generator<at::CPUGeneratorImpl>(mix_seed(config.seed, 3));
  std::mt19937_64 rng(mix_seed(config.seed, 4));
  std::uniform_int_distribution<std::size_t> pick_target(0, corpus.train_targets.size() - 1);

  std::vector<env::MaterialSource> sources;
  for (int w = 0; w < config.workers; ++w) {
    sources.emplace_back(pool, res, mix_seed(config.seed, 100 + static_cast<std::uint64_t>(w)));
  }

  ReplayMemory replay(config.agent.replay_capacity);
  const EvalConfig eval_cfg{config.total_pastes, config.effective_max_steps(), config.eval_seed};
  result.baseline_mse = white_canvas_mse(eval_targets);

  long episodes_done = 0;
  long env_steps = 0;
  long next_eval = config.eval_interval;
  double sum_v = 0.0, sum_p = 0.0, sum_w = 0.0;
  long n_updates = 0, n_critic = 0;

  while (episodes_done < config.episodes) {
    const int n = static_cast<int>(
        std::min<long>(config.workers, config.episodes - episodes_done));
    std::vector<env::Episode> episodes;
    for (int w = 0; w < n; ++w) {
      episodes.push_back(env::reset(train_targets[pick_target(rng)], sources[w],
                                    config.total_pastes, config.effective_max_steps()));
    }
    env_steps += rollout(result.models.policy, episodes, std::span(sources).first(n), false,
                         rollout_gen, &replay);
    episodes_done += n;

    const auto batch_n = static_cast<std::size_t>(config.agent.batch_size);
    try {
      for (int u = 0; u < config.agent.updates_per_episode; ++u) {
        auto report = learner.update(replay.sample(batch_n, rng));
        sum_v += report.value_loss;
        sum_p += report.policy_loss;
        ++n_updates;
      }
      if (adversarial) {
        auto batch = replay.sample(batch_n, rng);
        auto real = reward::make_pairs(batch.state.target, batch.state.target);
        auto fake = reward::make_pairs(batch.state.canvas, batch.state.target);
        auto cr = reward::update_critic(result.critic, critic_opt, real, fake, config.reward,
                                        critic_gen);
        sum_w += cr.wasserstein;
        ++n_critic;
      }
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged(std::string(e.what()) + " after " + std::to_string(episodes_done) +
                             " episodes (" + std::to_string(env_steps) + " env steps)");
    }

    if (episodes_done >= next_eval || episodes_done >= config.episodes) {
      MetricsRow row;
      row.episode = episodes_done;
      row.env_steps = env_steps;
      row.eval_mse = evaluate(result.models.policy, eval_targets, *pool, eval_cfg);
      row.value_loss = n_updates > 0 ? sum_v / n_updates : 0.0;
      row.policy_loss = n_updates > 0 ? sum_p / n_updates : 0.0;
      if (adversarial) row.critic_wass = n_critic > 0 ? sum_w / n_critic : 0.0;
      row.alpha = result.models.alpha();
      result.metrics.push_back(row);
      if (sink) sink(row);
      sum_v = sum_p = sum_w = 0.0;
      n_updates = n_critic = 0;
      while (next_eval <= episodes_done) next_eval += config.eval_interval;
    }
  }
  result.final_eval_mse = result.metrics.back().eval_mse;
  return result;
}

}  // namespace collage::agent
