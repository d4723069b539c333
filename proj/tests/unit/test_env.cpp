#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "collage/env/environment.hpp"
#include "collage/errors.hpp"
#include "fixtures.hpp"

using namespace collage;
using namespace collage::env;

namespace {

std::vector<imaging::ImagePlane> pool_images(int n) {
  std::vector<imaging::ImagePlane> out;
  for (int i = 0; i < n; ++i) out.push_back(testing::random_image(24, 20, 100 + i));
  return out;
}

ImagePtr target_ptr(int size, std::uint32_t seed) {
  return std::make_shared<const imaging::ImagePlane>(testing::random_image(size, size, seed));
}

render::ActionVector with_acceptor(float v, std::uint32_t seed = 1) {
  std::mt19937 rng(seed);
  auto a = testing::random_action(rng);
  a[render::kAcceptor] = v;
  return a;
}

}  // namespace

TEST_CASE("remaining_time examples and range check") {
  CHECK(remaining_time(0, 10) == 1.0);
  CHECK(remaining_time(10, 10) == 0.0);
  CHECK(remaining_time(9, 10) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(remaining_time(11, 10), std::logic_error);
  CHECK_THROWS_AS(remaining_time(-1, 10), std::logic_error);
}

TEST_CASE("material source resizes, is seeded and rejects an empty pool") {
  MaterialSource a(pool_images(5), 16, 42);
  MaterialSource b(pool_images(5), 16, 42);
  for (int i = 0; i < 20; ++i) {
    auto sa = a.sample();
    auto sb = b.sample();
    CHECK(sa.id == sb.id);
    CHECK(sa.image->height() == 16);
    CHECK(sa.image->width() == 16);
  }
  CHECK_THROWS_AS(MaterialSource(std::vector<imaging::ImagePlane>{}, 16, 1), ConfigurationError);
}

TEST_CASE("reset gives a white canvas, l = 1 and a zeroed clock") {
  MaterialSource src(pool_images(3), 16, 7);
  auto ep = reset(target_ptr(16, 1), src, 10, 40);
  CHECK(ep.state.remaining == 1.0);
  CHECK(ep.state.canvas.mean() == 1.0);
  CHECK(ep.clock.t == 0);
  CHECK(ep.clock.t_m == 0);
  CHECK(ep.state.material->height() == 16);
  CHECK(ep.state.coord->x.size() == 256u);
  CHECK_FALSE(ep.clock.terminal());
}

TEST_CASE("reset resizes the target and validates the budget") {
  MaterialSource src(pool_images(3), 16, 7);
  auto ep = reset(target_ptr(40, 1), src, 5, 20);
  CHECK(ep.state.target->height() == 16);
  CHECK_THROWS_AS(reset(target_ptr(16, 1), src, 0, 4), ConfigurationError);
  CHECK_THROWS_AS(reset(target_ptr(16, 1), src, 5, 4), ConfigurationError);
}

TEST_CASE("two resets with the same seed offer the same material sequence") {
  auto run = [] {
    MaterialSource src(pool_images(6), 16, 99);
    auto ep = reset(target_ptr(16, 2), src, 5, 20);
    std::vector<std::size_t> ids{ep.state.material_id};
    while (!ep.clock.terminal()) {
      step(ep, with_acceptor(0.1f), src);
      ids.push_back(ep.state.material_id);
    }
    return ids;
  };
  CHECK(run() == run());
}

TEST_CASE("denial keeps canvas and l, advances t and offers a new material") {
  MaterialSource src(pool_images(4), 16, 3);
  auto ep = reset(target_ptr(16, 3), src, 10, 40);
  const auto before = ep.state.canvas;
  auto out = step(ep, with_acceptor(0.2f), src);
  CHECK_FALSE(out.accepted);
  CHECK(ep.state.canvas == before);
  CHECK(ep.state.remaining == 1.0);
  CHECK(ep.clock.t == 1);
  CHECK(ep.clock.t_m == 0);
}

TEST_CASE("the last accepted paste ends the episode") {
  MaterialSource src(pool_images(4), 16, 3);
  auto ep = reset(target_ptr(16, 3), src, 10, 40);
  for (int i = 0; i < 9; ++i) CHECK_FALSE(step(ep, with_acceptor(0.9f, i), src).terminal);
  CHECK(ep.clock.t_m == 9);
  auto out = step(ep, with_acceptor(0.9f), src);
  CHECK(out.accepted);
  CHECK(out.terminal);
  CHECK(ep.clock.t_m == 10);
  CHECK(ep.state.remaining == 0.0);
  CHECK_THROWS_AS(step(ep, with_acceptor(0.9f), src), LifecycleError);
}

TEST_CASE("an all-deny policy terminates exactly at T_max") {
  MaterialSource src(pool_images(4), 16, 5);
  auto ep = reset(target_ptr(16, 4), src, 5, default_max_steps(5));
  int steps = 0;
  while (!ep.clock.terminal()) {
    step(ep, with_acceptor(0.0f), src);
    ++steps;
  }
  CHECK(steps == 20);
  CHECK(ep.clock.t_m == 0);
}

TEST_CASE("episode invariants under a random policy") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    MaterialSource src(pool_images(5), 16, static_cast<std::uint64_t>(trial));
    const int tm = 1 + trial % 6;
    auto ep = reset(target_ptr(16, static_cast<std::uint32_t>(trial)), src, tm, 4 * tm);
    int canvas_changes = 0;
    double last_l = ep.state.remaining;
    while (!ep.clock.terminal()) {
      auto a = testing::random_action(rng);
      const auto before = ep.state.canvas;
      auto out = step(ep, a, src);
      CHECK(out.accepted == a.accepts());
      if (!out.accepted) CHECK(ep.state.canvas == before);
      if (out.accepted) ++canvas_changes;
      CHECK(ep.state.remaining <= last_l);
      const double scaled = ep.state.remaining * tm;
      CHECK(std::abs(scaled - std::round(scaled)) < 1e-12);
      CHECK(ep.state.remaining == remaining_time(ep.clock.t_m, tm));
      CHECK(ep.clock.t_m <= ep.clock.t);
      last_l = ep.state.remaining;
    }
    CHECK(canvas_changes == ep.clock.t_m);
    CHECK(ep.clock.t <= 4 * tm);
  }
}

TEST_CASE("forced acceptance gives episodes of exactly T_M steps") {
  for (int tm : {1, 3, 7}) {
    MaterialSource src(pool_images(3), 16, 1);
    auto ep = reset(target_ptr(16, 9), src, tm, 4 * tm);
    int steps = 0;
    while (!ep.clock.terminal()) {
      step(ep, with_acceptor(1.0f, static_cast<std::uint32_t>(steps)), src);
      ++steps;
    }
    CHECK(steps == tm);
  }
}
