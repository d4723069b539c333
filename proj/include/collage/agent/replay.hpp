#pragma once

#include <cstddef>
#include <deque>
#include <random>
#include <vector>

#include "collage/agent/state.hpp"
#include "collage/env/environment.hpp"
#include "collage/render/action.hpp"

namespace collage::agent {

inline constexpr std::size_t kDefaultReplayCapacity = 20000;

// State snapshot before the action, plus the action taken.
struct Transition {
  imaging::ImagePlane canvas;
  env::ImagePtr target;
  env::ImagePtr material;
  int t = 0;
  int t_m = 0;
  int total_pastes = 1;
  int max_steps = 4;
  render::ActionVector action;

  static Transition capture(const env::Episode& episode, const render::ActionVector& action);
};

struct TransitionBatch {
  StateBatch state;
  torch::Tensor actions;  // [B,12]
  int64_t size() const { return actions.size(0); }
};

// Bounded FIFO; the oldest transition is evicted first.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = kDefaultReplayCapacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  const Transition& at(std::size_t i) const { return items_.at(i); }

  // Uniform indices with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const;
  TransitionBatch batch(const std::vector<std::size_t>& indices) const;
  TransitionBatch sample(std::size_t n, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

}  // namespace collage::agent
