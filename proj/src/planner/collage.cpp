#include "collage/planner/collage.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <utility>

#include <ATen/CPUGeneratorImpl.h>

#include "collage/agent/selection.hpp"
#include "collage/errors.hpp"
#include "collage/render/composite.hpp"
#include "collage/render/differentiable.hpp"
#include "collage/tensor_bridge.hpp"

namespace collage::planner {

namespace {

imaging::ImagePlane to_resolution(const imaging::ImagePlane& img, int s) {
  if (img.height() == s && img.width() == s) return img;
  if (img.height() > s && img.width() > s) return imaging::resize_area(img, s, s);
  return imaging::resize_bilinear(img, s, s);
}

// k distinct ids when the pool allows it, otherwise k draws with replacement.
std::vector<std::size_t> draw_candidates(std::size_t pool, int k, std::mt19937_64& rng) {
  std::vector<std::size_t> out;
  if (static_cast<std::size_t>(k) <= pool) {
    std::vector<std::size_t> ids(pool);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool - 1);
      std::swap(ids[static_cast<std::size_t>(i)], ids[pick(rng)]);
      out.push_back(ids[static_cast<std::size_t>(i)]);
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
    for (int i = 0; i < k; ++i) out.push_back(pick(rng));
  }
  return out;
}

}  // namespace

Landing landing_point(const PasteRecord& paste) {
  const double span = paste.scale - 1;
  return {paste.window_row + paste.action[render::kYGlue] * span,
          paste.window_col + paste.action[render::kXGlue] * span};
}

CollageResult run_collage(const imaging::ImagePlane& target, const MultiScalePlan& plan,
                          CollageAgent& agent, const std::vector<env::ImagePtr>& materials,
                          const CollageConfig& config, const FrameSink& frames) {
  if (!agent.policy || !agent.value_target || !agent.shaper || !agent.reward) {
    throw ConfigurationError("collage needs policy, value, shaper and reward models");
  }
  if (!agent.shaper->trained()) throw ConfigurationError("shaper has not been trained");
  if (materials.empty()) throw ConfigurationError("material pool is empty");
  if (config.candidates < 1) throw ConfigurationError("candidate subset size must be positive");
  if (agent.total_pastes < 1) throw ConfigurationError("T_M must be at least 1");
  if (config.fixed_l && !(*config.fixed_l >= 0.0 && *config.fixed_l <= 1.0)) {
    throw ConfigurationError("fixed remaining time must lie in [0,1]");
  }
  if (target.width() != plan.width || target.height() != plan.height) {
    throw DimensionError("plan was built for a different target size");
  }

  const int s = agent.policy->resolution();
  std::vector<torch::Tensor> small;
  for (const auto& m : materials) small.push_back(to_tensor(to_resolution(*m, s)));
  std::map<std::pair<std::size_t, int>, imaging::ImagePlane> native;
  auto native_material = [&](std::size_t id, int u) -> const imaging::ImagePlane& {
    auto it = native.find({id, u});
    if (it == native.end()) {
      it = native.emplace(std::pair{id, u}, imaging::resize_bilinear(*materials[id], u, u)).first;
    }
    return it->second;
  };

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, materials.size() - 1);
  render::ShaperTransition transition(agent.shaper);
  auto policy = agent::policy_fn(agent.policy, at::make_generator<at::CPUGeneratorImpl>(config.seed));
  const agent::SelectionOptions options{agent.gamma, true};

  CollageResult result;
  result.canvas = imaging::ImagePlane(target.height(), target.width(), 1.0f);
  long seq = 0;
  for (const auto& level : plan.levels) {
    int cycles = 0;
    for (const auto& wp : level.windows) cycles = std::max(cycles, wp.budget);
    const int u = level.scale;
    for (int c = 1; c <= cycles; ++c) {
      for (const auto& wp : level.windows) {
        if (c > wp.budget) continue;
        const auto& w = wp.window;
        const auto canvas_crop = result.canvas.crop(w.row, w.col, u, u);
        const auto target_crop = target.crop(w.row, w.col, u, u);

        const auto ids = draw_candidates(materials.size(), config.candidates, rng);
        std::vector<torch::Tensor> cand;
        for (auto id : ids) cand.push_back(small[id]);
        const auto next_material = small[pick(rng)].unsqueeze(0);

        agent::StateBatch state;
        state.canvas = to_tensor(to_resolution(canvas_crop, s)).unsqueeze(0);
        state.target = to_tensor(to_resolution(target_crop, s)).unsqueeze(0);
        state.material = cand.front().unsqueeze(0);
        const double l = config.fixed_l ? *config.fixed_l
                                        : static_cast<double>(wp.budget - c + 1) / wp.budget;
        state.remaining = torch::full({1}, static_cast<float>(l));
        state.steps = torch::zeros({1}, torch::kInt64);
        state.total_pastes = agent.total_pastes;
        state.max_steps = env::default_max_steps(agent.total_pastes);

        const auto sel = agent::select_material(state, torch::stack(cand), policy,
                                                agent.value_target, transition, *agent.reward,
                                                next_material, options);
        auto action = to_action(sel.actions[sel.index]);
        action[render::kAcceptor] = 1.0f;
        const auto id = ids[static_cast<std::size_t>(sel.index)];

        auto patch = render::transition_exact(canvas_crop, native_material(id, u), action);
        result.canvas.paste(patch, w.row, w.col);
        result.record.push_back({seq, u, w.row, w.col, id, action});
        if (frames) frames(seq, result.canvas);
        ++seq;
      }
    }
  }
  return result;
}

}  // namespace collage::planner
