#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "collage/agent/trainer.hpp"
#include "collage/io/checkpoint.hpp"
#include "collage/io/config.hpp"
#include "collage/planner/collage.hpp"

namespace collage::io {

std::vector<env::ImagePtr> share(std::vector<imaging::ImagePlane> images);

// Train/eval target split and the full material pool, resized to the network resolution.
agent::Corpus load_corpus(const RunConfig& config, const std::filesystem::path& targets,
                          const std::filesystem::path& materials);

// One NDJSON metrics line (no trailing newline); critic_wass is null in mse mode.
std::string metrics_line(const agent::MetricsRow& row);

// Trained agent plus the shaper it used, with final_eval_mse, baseline_mse and train_seconds.
Checkpoint agent_checkpoint(const RunConfig& config, const render::ShaperNet& shaper,
                            const agent::TrainResult& result, double train_seconds);

// Candidate-ranking reward for inference: the checkpoint's reward mode with no step penalty.
std::shared_ptr<const reward::RewardModel> inference_reward(const Checkpoint& checkpoint);

// Throws ConfigurationError when the checkpoint lacks a trained agent or shaper.
planner::CollageAgent collage_agent(const Checkpoint& checkpoint);

}  // namespace collage::io
