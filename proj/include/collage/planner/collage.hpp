#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "collage/agent/models.hpp"
#include "collage/env/environment.hpp"
#include "collage/planner/plan.hpp"
#include "collage/render/action.hpp"
#include "collage/render/shaper.hpp"
#include "collage/reward/critic.hpp"

namespace collage::planner {

// Trained pieces used at inference. value_target scores candidates; reward ranks them.
struct CollageAgent {
  agent::PolicyNet policy{nullptr};
  agent::ValueNet value_target{nullptr};
  render::ShaperNet shaper{nullptr};
  std::shared_ptr<const reward::RewardModel> reward;
  int total_pastes = 5;  // T_M the agent was trained with
  double gamma = 0.95;
};

struct CollageConfig {
  std::optional<double> fixed_l = 0.1;  // remaining-time override fed to the agent
  int candidates = 8;
  std::uint64_t seed = 1;
};

struct PasteRecord {
  long seq = 0;
  int scale = 0;
  int window_row = 0;
  int window_col = 0;
  std::size_t material_id = 0;
  render::ActionVector action;
};

struct CollageResult {
  imaging::ImagePlane canvas;
  std::vector<PasteRecord> record;
};

using FrameSink = std::function<void(long seq, const imaging::ImagePlane& canvas)>;

// Full-resolution landing point of a paste's glue centre.
struct Landing {
  double row = 0.0;
  double col = 0.0;
};
Landing landing_point(const PasteRecord& paste);

// Coarse-to-fine over the plan; cycles run round-robin over each scale's windows in row-major
// order while c <= K_i. Each participation resizes its crops to the network resolution,
// selects a material among a random candidate subset, takes the deterministic action with the
// acceptor forced on and pastes at the window's native resolution.
CollageResult run_collage(const imaging::ImagePlane& target, const MultiScalePlan& plan,
                          CollageAgent& agent, const std::vector<env::ImagePtr>& materials,
                          const CollageConfig& config, const FrameSink& frames = {});

}  // namespace collage::planner
