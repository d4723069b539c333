#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "collage/imaging/coord.hpp"
#include "collage/imaging/image.hpp"
#include "collage/render/action.hpp"

namespace collage::env {

using ImagePtr = std::shared_ptr<const imaging::ImagePlane>;

// Material pool at environment resolution; uniform sampling with replacement.
// Copies share the pool but each keeps its own generator.
class MaterialSource {
 public:
  MaterialSource(const std::vector<imaging::ImagePlane>& pool, int resolution,
                 std::uint64_t seed);
  MaterialSource(std::shared_ptr<const std::vector<ImagePtr>> pool, int resolution,
                 std::uint64_t seed);

  struct Sample {
    std::size_t id = 0;
    ImagePtr image;
  };

  Sample sample();
  void reseed(std::uint64_t seed) { rng_.seed(seed); }
  std::size_t size() const { return pool_->size(); }
  int resolution() const { return resolution_; }
  const ImagePtr& at(std::size_t id) const { return (*pool_)[id]; }

 private:
  std::shared_ptr<const std::vector<ImagePtr>> pool_;
  int resolution_;
  std::mt19937_64 rng_;
};

// Resolution-matched copies of each image, resized bilinearly.
std::vector<ImagePtr> prepare_pool(const std::vector<imaging::ImagePlane>& images,
                                   int resolution);
// Shares images that already match; resizes the rest.
std::vector<ImagePtr> prepare_pool(const std::vector<ImagePtr>& images, int resolution);

// Cached, shared coordinate planes for one resolution.
std::shared_ptr<const imaging::CoordPlanes> shared_coord_planes(int height, int width);

// (T_M - t_M) / T_M; throws std::logic_error when t_M is outside [0, T_M].
double remaining_time(int pastes_done, int total_pastes);

struct EpisodeClock {
  int t = 0;
  int t_m = 0;
  int total_pastes = 1;
  int max_steps = 4;

  bool terminal() const { return t_m >= total_pastes || t >= max_steps; }
};

inline int default_max_steps(int total_pastes) { return 4 * total_pastes; }

struct CollageState {
  imaging::ImagePlane canvas;
  ImagePtr target;
  ImagePtr material;
  std::size_t material_id = 0;
  double remaining = 1.0;
  std::shared_ptr<const imaging::CoordPlanes> coord;

  int height() const { return canvas.height(); }
  int width() const { return canvas.width(); }
};

struct Episode {
  CollageState state;
  EpisodeClock clock;
};

struct StepOutcome {
  bool accepted = false;
  bool terminal = false;
};

// White canvas, l = 1, first material drawn from the source. The target is resized to the
// source resolution when needed. Throws ConfigurationError on an invalid budget.
Episode reset(ImagePtr target, MaterialSource& source, int total_pastes, int max_steps);

// One MDP step with transition_exact. Throws LifecycleError once the episode has ended.
StepOutcome step(Episode& episode, const render::ActionVector& action, MaterialSource& source);

}  // namespace collage::env
