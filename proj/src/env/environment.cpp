#include "collage/env/environment.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "collage/errors.hpp"
#include "collage/render/composite.hpp"

namespace collage::env {

std::vector<ImagePtr> prepare_pool(const std::vector<imaging::ImagePlane>& images,
                                   int resolution) {
  std::vector<ImagePtr> out;
  out.reserve(images.size());
  for (const auto& img : images) {
    out.push_back(std::make_shared<const imaging::ImagePlane>(
        imaging::resize_bilinear(img, resolution, resolution)));
  }
  return out;
}

std::vector<ImagePtr> prepare_pool(const std::vector<ImagePtr>& images, int resolution) {
  std::vector<ImagePtr> out;
  out.reserve(images.size());
  for (const auto& img : images) {
    if (img->height() == resolution && img->width() == resolution) {
      out.push_back(img);
    } else {
      out.push_back(std::make_shared<const imaging::ImagePlane>(
          imaging::resize_bilinear(*img, resolution, resolution)));
    }
  }
  return out;
}

MaterialSource::MaterialSource(const std::vector<imaging::ImagePlane>& pool, int resolution,
                               std::uint64_t seed)
    : MaterialSource(std::make_shared<const std::vector<ImagePtr>>(prepare_pool(pool, resolution)),
                     resolution, seed) {}

MaterialSource::MaterialSource(std::shared_ptr<const std::vector<ImagePtr>> pool, int resolution,
                               std::uint64_t seed)
    : pool_(std::move(pool)), resolution_(resolution), rng_(seed) {
  if (!pool_ || pool_->empty()) throw ConfigurationError("material pool is empty");
  if (resolution_ < 2) throw ConfigurationError("material resolution must be at least 2");
  for (const auto& m : *pool_) {
    if (!m || m->height() != resolution_ || m->width() != resolution_) {
      throw DimensionError("material pool entry does not match the source resolution");
    }
  }
}

MaterialSource::Sample MaterialSource::sample() {
  std::uniform_int_distribution<std::size_t> pick(0, pool_->size() - 1);
  const std::size_t id = pick(rng_);
  return {id, (*pool_)[id]};
}

std::shared_ptr<const imaging::CoordPlanes> shared_coord_planes(int height, int width) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const imaging::CoordPlanes>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{height, width}];
  if (!slot) slot = std::make_shared<const imaging::CoordPlanes>(imaging::coord_planes(height, width));
  return slot;
}

double remaining_time(int pastes_done, int total_pastes) {
  if (total_pastes < 1) throw std::logic_error("paste budget must be positive");
  if (pastes_done < 0 || pastes_done > total_pastes) {
    throw std::logic_error("paste count " + std::to_string(pastes_done) + " outside [0, " +
                           std::to_string(total_pastes) + "]");
  }
  return static_cast<double>(total_pastes - pastes_done) / total_pastes;
}

Episode reset(ImagePtr target, MaterialSource& source, int total_pastes, int max_steps) {
  if (total_pastes < 1) throw ConfigurationError("T_M must be at least 1");
  if (max_steps < total_pastes) throw ConfigurationError("T_max must be at least T_M");
  if (!target || target->empty()) throw ConfigurationError("missing target image");
  const int res = source.resolution();
  if (target->height() != res || target->width() != res) {
    target = std::make_shared<const imaging::ImagePlane>(
        imaging::resize_bilinear(*target, res, res));
  }

  Episode ep;
  ep.clock = EpisodeClock{0, 0, total_pastes, max_steps};
  ep.state.canvas = imaging::ImagePlane(res, res, 1.0f);
  ep.state.target = std::move(target);
  auto m = source.sample();
  ep.state.material = std::move(m.image);
  ep.state.material_id = m.id;
  ep.state.remaining = 1.0;
  ep.state.coord = shared_coord_planes(res, res);
  return ep;
}

StepOutcome step(Episode& episode, const render::ActionVector& action, MaterialSource& source) {
  auto& clock = episode.clock;
  auto& state = episode.state;
  if (clock.terminal()) throw LifecycleError("step called on a terminated episode");

  StepOutcome out;
  if (action.accepts()) {
    state.canvas = render::transition_exact(state.canvas, *state.material, action);
    clock.t_m += 1;
    state.remaining = remaining_time(clock.t_m, clock.total_pastes);
    out.accepted = true;
  }
  clock.t += 1;
  auto m = source.sample();
  state.material = std::move(m.image);
  state.material_id = m.id;
  out.terminal = clock.terminal();
  return out;
}

}  // namespace collage::env
