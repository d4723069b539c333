#include "doctest_torch.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <ATen/CPUGeneratorImpl.h>

#include "agent_fixtures.hpp"
#include "collage/agent/mbsac.hpp"
#include "collage/agent/models.hpp"
#include "collage/agent/replay.hpp"
#include "collage/agent/selection.hpp"
#include "collage/agent/trainer.hpp"
#include "collage/errors.hpp"
#include "collage/imaging/metrics.hpp"
#include "collage/render/composite.hpp"
#include "collage/tensor_bridge.hpp"
#include "fixtures.hpp"

using namespace collage;
using namespace collage::agent;

namespace {

torch::Generator gen(std::uint64_t seed) { return at::make_generator<at::CPUGeneratorImpl>(seed); }

StateBatch random_states(int64_t n, int res, std::uint64_t seed, int total_pastes = 5) {
  auto g = gen(seed);
  StateBatch s;
  s.canvas = torch::rand({n, 3, res, res}, g);
  s.target = torch::rand({n, 3, res, res}, g);
  s.material = torch::rand({n, 3, res, res}, g);
  s.remaining = torch::ones({n});
  s.steps = torch::zeros({n}, torch::kInt64);
  s.total_pastes = total_pastes;
  s.max_steps = 4 * total_pastes;
  return s;
}

TransitionBatch batch_with(const StateBatch& s, const render::ActionVector& a) {
  TransitionBatch b;
  b.state = s;
  b.actions = to_tensor(a).unsqueeze(0).expand({s.size(), render::kActionDim}).clone();
  return b;
}

render::ActionVector deny_action() {
  auto a = testing::full_cover_action();
  a[render::kAcceptor] = 0.1f;
  return a;
}

// Independent closed form of the squashed-Gaussian log-density.
double analytic_logp(const std::vector<double>& mean, const std::vector<double>& log_std,
                     const std::vector<double>& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double u = 0.5 * std::log(a[i] / (1.0 - a[i]));  // atanh(2a - 1)
    const double sd = std::exp(log_std[i]);
    const double z = (u - mean[i]) / sd;
    const double normal = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
    total += std::log(normal / (2.0 * a[i] * (1.0 - a[i])));
  }
  return total;
}

}  // namespace

TEST_CASE("network input stacks 12 channels with l and coordinate planes") {
  auto s = random_states(2, 16, 1);
  s.remaining = torch::tensor({1.0f, 0.4f});
  auto x = network_input(s);
  CHECK(x.sizes() == torch::IntArrayRef({2, 12, 16, 16}));
  CHECK(x[1][9].min().item<float>() == doctest::Approx(0.4f));
  CHECK(x[0][10][0][15].item<float>() == doctest::Approx(1.0f));
  CHECK(x[0][11][15][0].item<float>() == doctest::Approx(1.0f));
  CHECK(torch::equal(x.narrow(1, 0, 3), s.canvas));
}

TEST_CASE("model_step decrements l on accepted actions only") {
  auto s = random_states(2, 16, 2, 5);
  auto actions = torch::stack({to_tensor(testing::full_cover_action()), to_tensor(deny_action())});
  render::ExactTransition exact;
  auto next = model_step(s, actions, exact, s.material);
  CHECK(next.remaining[0].item<float>() == doctest::Approx(0.8f));
  CHECK(next.remaining[1].item<float>() == 1.0f);
  CHECK(next.steps[0].item<int64_t>() == 1);
  CHECK(torch::allclose(next.canvas[0], s.material[0], 1e-5, 1e-5));
  CHECK(torch::equal(next.canvas[1], s.canvas[1]));
}

TEST_CASE("act samples lie in the open unit cube with finite log-density") {
  torch::manual_seed(1);
  PolicyNet pi(testing::tiny_model());
  auto s = random_states(64, 16, 3);
  auto g = gen(4);
  torch::NoGradGuard guard;
  auto out = act(pi, s, false, g);
  CHECK(out.actions.gt(0).all().item<bool>());
  CHECK(out.actions.lt(1).all().item<bool>());
  CHECK(torch::isfinite(out.logp).all().item<bool>());
}

TEST_CASE("extreme pre-squash values still give interior actions and finite logp") {
  GaussianHead head{torch::tensor({{30.0f, -30.0f, 0.0f}}), torch::full({1, 3}, -20.0f)};
  auto out = squashed_sample(head, false, gen(1));
  CHECK(out.actions.gt(0).all().item<bool>());
  CHECK(out.actions.lt(1).all().item<bool>());
  CHECK(std::isfinite(out.logp.item<double>()));
}

TEST_CASE("deterministic act is bit-repeatable and rejects the wrong resolution") {
  torch::manual_seed(2);
  PolicyNet pi(testing::tiny_model());
  pi->eval();
  auto s = random_states(3, 16, 5);
  torch::NoGradGuard guard;
  auto a = act(pi, s, true).actions;
  auto b = act(pi, s, true).actions;
  CHECK(torch::equal(a, b));
  CHECK_THROWS_AS(act(pi, random_states(1, 32, 1), true), DimensionError);
}

TEST_CASE("squashed log-density matches the closed form and a kernel density estimate") {
  const std::vector<double> mean{0.3, -0.5, 0.0, 1.2, -1.0, 0.1, 0.7, -0.2, 0.0, 0.4, -0.8, 0.9};
  const std::vector<double> log_std{-0.5, -0.3, -0.7, -0.4, -0.6, -0.2, -0.5, -0.9, -0.3, -0.4, -0.8, -0.6};
  GaussianHead head{torch::tensor(mean, torch::kFloat64).view({1, 12}),
                    torch::tensor(log_std, torch::kFloat64).view({1, 12})};
  const std::vector<double> probe{0.6, 0.35, 0.5, 0.8, 0.25, 0.55, 0.65, 0.45, 0.5, 0.6, 0.3, 0.7};
  const double closed = analytic_logp(mean, log_std, probe);
  auto probe_t = torch::tensor(probe, torch::kFloat64).view({1, 12});
  const double lib = squashed_log_prob(head, probe_t).item<double>();
  CHECK(lib == doctest::Approx(closed).epsilon(1e-9));

  // Components are independent, so the joint density is the product of 1-D estimates.
  const int n = 100000;
  GaussianHead wide{head.mean.expand({n, 12}), head.log_std.expand({n, 12})};
  auto samples = squashed_sample(wide, false, gen(11)).actions;
  double kde_logp = 0.0;
  for (int i = 0; i < 12; ++i) {
    auto col = samples.select(1, i);
    const double sd = col.std().item<double>();
    const double bw = 1.06 * sd * std::pow(n, -0.2) * 0.5;
    auto z = (col - probe[i]) / bw;
    const double density = (torch::exp(-0.5 * z * z).mean().item<double>()) /
                           (bw * std::sqrt(2.0 * std::numbers::pi));
    kde_logp += std::log(density);
  }
  CHECK(std::abs(kde_logp - lib) / std::abs(lib) < 0.02);
}

TEST_CASE("a zero value head gives 0 for every state") {
  ValueNet v(testing::tiny_model());
  torch::NoGradGuard guard;
  auto out = value(v, random_states(5, 16, 6));
  CHECK(out.abs().max().item<float>() == 0.0f);
}

TEST_CASE("value target with gamma = alpha = 0 is the model reward") {
  auto pool = testing::constant_pool({0.2f}, 16);
  MaterialBank bank(pool);
  render::ExactTransition exact;
  reward::MseReward mse(-1.0);
  auto g = gen(1);
  ModelContext ctx{exact, mse, bank, g};
  ValueNet vt(testing::tiny_model());

  auto s = random_states(3, 16, 7);
  std::mt19937 rng(3);
  auto stored = testing::random_action(rng);
  stored[render::kAcceptor] = 0.9f;
  auto next_action = testing::full_cover_action();
  auto targets = compute_value_target(batch_with(s, stored), testing::scripted_policy(next_action),
                                      vt, ctx, 0.0, 0.0);
  const auto material = imaging::ImagePlane(16, 16, 0.2f);
  for (int i = 0; i < 3; ++i) {
    auto c0 = to_image(s.canvas[i]);
    auto target = to_image(s.target[i]);
    auto c1 = render::transition_exact(c0, to_image(s.material[i]), stored);
    auto c2 = render::transition_exact(c1, material, next_action);
    const double r = imaging::mse(c1, target) - imaging::mse(c2, target) - 1.0;
    CHECK(targets.target[i].item<double>() == doctest::Approx(r).epsilon(1e-5));
  }
  CHECK_THROWS_AS(compute_value_target(batch_with(s.index(torch::zeros({0}, torch::kInt64)), stored),
                                       testing::scripted_policy(next_action), vt, ctx, 0.0, 0.0),
                  UsageError);
}

TEST_CASE("bootstrap is dropped when the second model step is terminal") {
  auto pool = testing::constant_pool({0.5f}, 16);
  MaterialBank bank(pool);
  render::ExactTransition exact;
  reward::MseReward mse(0.0);
  auto g = gen(2);
  ModelContext ctx{exact, mse, bank, g};
  ValueNet vt(testing::tiny_model());
  {
    torch::NoGradGuard guard;
    vt->head->bias.fill_(5.0);
  }
  auto s = random_states(2, 16, 8, 1);  // T_M = 1
  auto batch = batch_with(s, deny_action());

  auto accept = compute_value_target(batch, testing::scripted_policy(testing::full_cover_action()),
                                     vt, ctx, 0.9, 0.0);
  auto deny = compute_value_target(batch, testing::scripted_policy(deny_action()), vt, ctx, 0.9, 0.0);
  // Accepting exhausts the single paste, so no 0.9 * 5 term; denying keeps the episode alive.
  for (int i = 0; i < 2; ++i) {
    auto c = to_image(s.canvas[i]);
    auto t = to_image(s.target[i]);
    const double r = imaging::mse(c, t) - imaging::mse(imaging::ImagePlane(16, 16, 0.5f), t);
    CHECK(accept.target[i].item<double>() == doctest::Approx(r).epsilon(1e-5));
    CHECK(deny.target[i].item<double>() == doctest::Approx(4.5).epsilon(1e-5));
  }
  CHECK(accept.valid.sum().item<double>() == 2.0);
}

TEST_CASE("update_value: zero loss at the fixed point, never negative") {
  torch::manual_seed(3);
  ValueNet v(testing::tiny_model());
  torch::optim::Adam opt(v->parameters(), torch::optim::AdamOptions(1e-3));
  ValueTargets t;
  t.next_state = random_states(4, 16, 9);
  t.valid = torch::ones({4});
  {
    torch::NoGradGuard guard;
    t.target = value(v, t.next_state);
  }
  const auto before = testing::flat_parameters(*v);
  CHECK(update_value(v, opt, t) == 0.0);
  const auto after = testing::flat_parameters(*v);
  double drift = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) drift = std::max(drift, double(std::abs(before[i] - after[i])));
  CHECK(drift < 1e-6);

  t.target = torch::randn({4});
  CHECK(update_value(v, opt, t) >= 0.0);
  t.target = torch::full({4}, std::numeric_limits<float>::infinity());
  CHECK_THROWS_AS(update_value(v, opt, t), TrainingDiverged);
}

TEST_CASE("constant reward: repeated value updates converge to it") {
  // Denials leave the canvas alone, so every reward equals the step penalty.
  torch::manual_seed(4);
  auto pool = testing::constant_pool({0.3f, 0.7f}, 16);
  MaterialBank bank(pool);
  render::ExactTransition exact;
  reward::MseReward mse(-1.0);
  auto g = gen(3);
  ModelContext ctx{exact, mse, bank, g};
  ValueNet v(testing::tiny_model());
  ValueNet vt(testing::tiny_model());
  torch::optim::Adam opt(v->parameters(), torch::optim::AdamOptions(3e-3));
  auto policy = testing::scripted_policy(deny_action());
  for (int i = 0; i < 300; ++i) {
    auto s = random_states(16, 16, 100 + i);
    update_value(v, opt, compute_value_target(batch_with(s, deny_action()), policy, vt, ctx, 0.0, 0.0));
  }
  torch::NoGradGuard guard;
  auto pred = value(v, random_states(8, 16, 7)).mean().item<double>();
  CHECK(std::abs(pred + 1.0) < 0.05);
}

TEST_CASE("polyak examples") {
  ValueNet online(testing::tiny_model());
  ValueNet target(testing::tiny_model());
  torch::manual_seed(5);
  ValueNet other(testing::tiny_model());
  {
    torch::NoGradGuard guard;
    for (auto& p : online->parameters()) p.normal_();
  }
  nn::copy_parameters(*target, *other);
  polyak_update(*target, *online, 1.0);
  CHECK(testing::flat_parameters(*target) == testing::flat_parameters(*online));

  nn::copy_parameters(*target, *other);
  const auto t0 = testing::flat_parameters(*target);
  const auto on = testing::flat_parameters(*online);
  polyak_update(*target, *online, 0.005);
  polyak_update(*target, *online, 0.005);
  const auto t2 = testing::flat_parameters(*target);
  const double f = 1.0 - 0.995 * 0.995;
  double worst = 0.0;
  for (std::size_t i = 0; i < t0.size(); ++i) {
    worst = std::max(worst, std::abs(t2[i] - (f * on[i] + (1 - f) * t0[i])));
  }
  CHECK(worst < 1e-6);

  // Monotone drift towards a frozen online copy.
  double prev = 1e300;
  for (int i = 0; i < 5; ++i) {
    polyak_update(*target, *online, 0.1);
    const auto t = testing::flat_parameters(*target);
    double dist = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) dist += (t[k] - on[k]) * (t[k] - on[k]);
    CHECK(dist < prev);
    prev = dist;
  }
  CHECK_THROWS_AS(polyak_update(*target, *online, 0.0), ConfigurationError);
}

TEST_CASE("temperature rises when entropy is below target and stays positive") {
  AgentConfig cfg;
  auto log_alpha = torch::zeros({1}, torch::requires_grad());
  torch::optim::Adam opt(std::vector<torch::Tensor>{log_alpha}, torch::optim::AdamOptions(1e-2));
  const double a0 = log_alpha.exp().item<double>();
  // logp = 20 means entropy -20 < -12.
  const double a1 = update_temperature(log_alpha, opt, torch::full({8}, 20.0f), cfg);
  CHECK(a1 > a0);
  for (int i = 0; i < 500; ++i) update_temperature(log_alpha, opt, torch::full({8}, -50.0f), cfg);
  CHECK(log_alpha.exp().item<double>() > 0.0);
  CHECK(log_alpha.exp().item<double>() < a0);

  cfg.auto_alpha = false;
  const double fixed = log_alpha.exp().item<double>();
  CHECK(update_temperature(log_alpha, opt, torch::full({8}, 20.0f), cfg) == fixed);
}

TEST_CASE("replay memory is a bounded FIFO") {
  ReplayMemory mem(5);
  auto img = std::make_shared<const imaging::ImagePlane>(8, 8, 0.5f);
  for (int i = 0; i < 12; ++i) {
    Transition t;
    t.canvas = imaging::ImagePlane(8, 8, 1.0f);
    t.target = img;
    t.material = img;
    t.action[0] = static_cast<float>(i);
    mem.push(t);
    CHECK(mem.size() <= 5u);
  }
  for (std::size_t i = 0; i < 5; ++i) CHECK(mem.at(i).action[0] == static_cast<float>(7 + i));
  CHECK_THROWS_AS(ReplayMemory(0), ConfigurationError);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(ReplayMemory(3).sample_indices(1, rng), UsageError);
}

TEST_CASE("replay sampling is uniform (chi-square, 1e5 draws)") {
  ReplayMemory mem(50);
  auto img = std::make_shared<const imaging::ImagePlane>(4, 4, 0.5f);
  for (int i = 0; i < 50; ++i) {
    Transition t;
    t.canvas = imaging::ImagePlane(4, 4, 1.0f);
    t.target = img;
    t.material = img;
    mem.push(t);
  }
  std::mt19937_64 rng(2024);
  std::vector<int> counts(50, 0);
  for (auto i : mem.sample_indices(100000, rng)) counts[i]++;
  const double expected = 100000.0 / 50;
  double chi2 = 0.0;
  for (int c : counts) {
    CHECK(c > 0);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 49 degrees of freedom: the 0.999 quantile is about 85.35.
  CHECK(chi2 < 85.35);
}

TEST_CASE("replay batches restore l from the stored paste count") {
  env::MaterialSource src(std::vector<imaging::ImagePlane>{imaging::ImagePlane(16, 16, 0.3f)}, 16, 1);
  auto target = std::make_shared<const imaging::ImagePlane>(16, 16, 0.0f);
  auto ep = env::reset(target, src, 5, 20);
  ReplayMemory mem(10);
  for (int i = 0; i < 3; ++i) {
    auto a = testing::full_cover_action();
    mem.push(Transition::capture(ep, a));
    env::step(ep, a, src);
  }
  auto b = mem.batch({0, 1, 2});
  CHECK(b.state.remaining[2].item<float>() == doctest::Approx(0.6f));
  CHECK(b.state.steps[2].item<int64_t>() == 2);
  CHECK(b.actions.sizes() == torch::IntArrayRef({3, 12}));
}

TEST_CASE("value and policy updates touch only their own parameters") {
  torch::manual_seed(6);
  auto models = AgentModels::create(testing::tiny_model(), 0.1, 6);
  reward::CriticNet critic;
  {
    torch::NoGradGuard guard;
    critic->head->weight.normal_();
  }
  auto reward_model = std::make_shared<reward::CriticReward>(critic, -1.0);
  auto transition = std::make_shared<testing::SoftRectTransition>();
  auto pool = testing::constant_pool({0.1f, 0.9f}, 16);
  AgentConfig cfg;
  cfg.batch_size = 8;
  auto g = gen(6);
  MaterialBank bank(pool);
  ModelContext ctx{*transition, *reward_model, bank, g};
  auto batch = batch_with(random_states(8, 16, 10), testing::full_cover_action());

  torch::optim::Adam vopt(models.value->parameters(), torch::optim::AdamOptions(1e-2));
  torch::optim::Adam popt(models.policy->parameters(), torch::optim::AdamOptions(1e-2));
  const auto p0 = testing::flat_parameters(*models.policy);
  const auto c0 = testing::flat_parameters(*critic);
  const auto v0 = testing::flat_parameters(*models.value);
  const auto vt0 = testing::flat_parameters(*models.value_target);

  auto targets = compute_value_target(batch, policy_fn(models.policy, g), models.value_target, ctx,
                                      0.95, 0.1);
  update_value(models.value, vopt, targets);
  CHECK(testing::flat_parameters(*models.policy) == p0);
  CHECK(testing::flat_parameters(*critic) == c0);
  const auto v1 = testing::flat_parameters(*models.value);
  CHECK(v1 != v0);

  update_policy(models.policy, popt, models.value_target, batch, ctx, 0.95, 0.1);
  CHECK(testing::flat_parameters(*models.policy) != p0);
  CHECK(testing::flat_parameters(*models.value) == v1);
  CHECK(testing::flat_parameters(*models.value_target) == vt0);
  CHECK(testing::flat_parameters(*critic) == c0);
  for (const auto& p : critic->parameters()) CHECK_FALSE(p.grad().defined());
}

TEST_CASE("policy objective gradient matches central differences through the frozen critic") {
  torch::manual_seed(7);
  testing::SoftRectTransition transition(1.0);
  reward::CriticNet critic;
  {
    torch::NoGradGuard guard;
    critic->head->weight.normal_();
  }
  critic->to(torch::kFloat64);
  reward::CriticReward reward_model(critic, -1.0);
  auto g = gen(11);
  auto canvas = torch::rand({1, 3, 16, 16}, g).to(torch::kFloat64);
  auto target = torch::rand({1, 3, 16, 16}, g).to(torch::kFloat64);
  auto material = torch::rand({1, 3, 16, 16}, g).to(torch::kFloat64);

  // The action-dependent reward term of the policy loss.
  auto objective = [&](const torch::Tensor& a) {
    auto next = transition.apply(canvas, material, a);
    return -reward_model.reward(canvas, next, target).sum();
  };
  std::mt19937 rng(12);
  int good = 0, total = 0;
  for (int probe = 0; probe < 6; ++probe) {
    auto a = testing::random_action(rng);
    a[render::kAcceptor] = 0.9f;
    auto base = to_tensor(a).to(torch::kFloat64).clamp(0.15, 0.85).unsqueeze(0);
    base[0][render::kAcceptor] = 0.9;
    for (int i : {render::kXCut, render::kYCut, render::kWidth, render::kHeight, render::kXGlue,
                  render::kYGlue, render::kTheta}) {
      auto at = base.clone().requires_grad_(true);
      const double grad = torch::autograd::grad({objective(at)}, {at})[0][0][i].item<double>();
      // Bilinear sampling is piecewise linear in the glue and cut coordinates; a small step
      // keeps the difference quotient off the kinks.
      const double h = 1e-6;
      auto plus = base.clone();
      auto minus = base.clone();
      plus[0][i] += h;
      minus[0][i] -= h;
      double fd;
      {
        torch::NoGradGuard guard;
        fd = (objective(plus).item<double>() - objective(minus).item<double>()) / (2 * h);
      }
      const double rel = std::abs(grad - fd) / std::max({std::abs(grad), std::abs(fd), 1e-8});
      good += rel < 0.05;
      ++total;
    }
  }
  CHECK(good >= static_cast<int>(0.95 * total));
}

TEST_CASE("policy updates with the mse reward cut one-step error by at least 20%") {
  torch::manual_seed(8);
  PolicyNet pi(testing::tiny_model());
  ValueNet vt(testing::tiny_model());
  auto transition = testing::SoftRectTransition();
  reward::MseReward mse(-1.0);
  auto pool = testing::constant_pool({0.0f}, 16);
  MaterialBank bank(pool);
  auto g = gen(8);
  ModelContext ctx{transition, mse, bank, g};
  // A fixed target: dark square on white; the material is black.
  auto target = torch::ones({1, 3, 16, 16});
  target.narrow(2, 2, 10).narrow(3, 3, 10).zero_();
  StateBatch s = random_states(16, 16, 12);
  s.canvas = torch::ones({16, 3, 16, 16});
  s.target = target.expand({16, 3, 16, 16}).clone();
  s.material = torch::zeros({16, 3, 16, 16});
  TransitionBatch batch{s, torch::zeros({16, 12})};

  render::ExactTransition exact;
  auto one_step_mse = [&] {
    torch::NoGradGuard guard;
    auto a = act(pi, s.index(torch::zeros({1}, torch::kInt64)), true).actions;
    auto c = exact.apply(s.canvas.narrow(0, 0, 1), s.material.narrow(0, 0, 1), a);
    return (c - target).pow(2).mean().item<double>();
  };
  const double before = one_step_mse();
  torch::optim::Adam opt(pi->parameters(), torch::optim::AdamOptions(1e-3));
  for (int i = 0; i < 500; ++i) update_policy(pi, opt, vt, batch, ctx, 0.0, 1e-3);
  const double after = one_step_mse();
  CHECK(after <= 0.8 * before);
}

TEST_CASE("a large temperature widens the policy") {
  auto run = [](double alpha) {
    torch::manual_seed(9);
    PolicyNet pi(testing::tiny_model());
    ValueNet vt(testing::tiny_model());
    testing::SoftRectTransition transition;
    reward::MseReward mse(-1.0);
    auto pool = testing::constant_pool({0.2f, 0.8f}, 16);
    MaterialBank bank(pool);
    auto g = gen(9);
    ModelContext ctx{transition, mse, bank, g};
    {
      // Start narrow so the entropy bonus has room to widen the distribution.
      torch::NoGradGuard guard;
      pi->named_parameters()["head.bias"].narrow(0, render::kActionDim, render::kActionDim).fill_(-2.0);
    }
    torch::optim::SGD opt(pi->parameters(), torch::optim::SGDOptions(1e-3));
    double first = 0.0, last = 0.0;
    for (int i = 0; i < 200; ++i) {
      auto batch = batch_with(random_states(8, 16, 500 + i), testing::full_cover_action());
      auto out = update_policy(pi, opt, vt, batch, ctx, 0.95, alpha);
      if (i == 0) first = out.mean_log_std;
      last = out.mean_log_std;
    }
    return last - first;
  };
  const double wide = run(10.0);
  const double narrow = run(0.01);
  CHECK(wide > 0.0);
  CHECK(wide > narrow);
}

TEST_CASE("select_material") {
  torch::manual_seed(10);
  PolicyNet pi(testing::tiny_model());
  pi->eval();
  ValueNet vt(testing::tiny_model());
  {
    torch::NoGradGuard guard;
    vt->head->weight.normal_(0.0, 0.2);
  }
  reward::CriticNet critic;
  {
    torch::NoGradGuard guard;
    critic->head->weight.normal_();
  }
  reward::CriticReward reward_model(critic, -1.0);
  testing::SoftRectTransition transition;
  auto policy = policy_fn(pi, gen(1));
  auto next = torch::rand({1, 3, 16, 16});

  SUBCASE("single candidate and empty set") {
    auto s = random_states(1, 16, 13);
    auto sel = select_material(s, torch::rand({1, 3, 16, 16}), policy, vt, transition, reward_model, next);
    CHECK(sel.index == 0);
    CHECK_THROWS_AS(select_material(s, torch::zeros({0, 3, 16, 16}), policy, vt, transition,
                                    reward_model, next),
                    UsageError);
  }

  SUBCASE("agrees with one-at-a-time brute force") {
    for (int trial = 0; trial < 10; ++trial) {
      auto s = random_states(1, 16, 200 + trial);
      auto cands = torch::rand({6, 3, 16, 16}, gen(300 + trial));
      auto sel = select_material(s, cands, policy, vt, transition, reward_model, next);
      std::vector<double> brute;
      torch::NoGradGuard guard;
      for (int k = 0; k < 6; ++k) {
        auto one = s.with_material(cands.narrow(0, k, 1));
        auto a = pi->forward(network_input(one));
        auto action = ((torch::tanh(a.mean) + 1) / 2).clamp(1e-6, 1 - 1e-6);
        auto moved = model_step(one, action, transition, next);
        auto r = reward_model.score(moved.canvas, one.target) - reward_model.score(one.canvas, one.target) - 1.0;
        auto v = value(vt, moved) * moved.terminal().logical_not().to(torch::kFloat32);
        brute.push_back((r + 0.95 * v).item<double>());
      }
      int best = 0;
      for (int k = 1; k < 6; ++k) if (brute[k] > brute[best]) best = k;
      CHECK(sel.index == best);
      for (int k = 0; k < 6; ++k) CHECK(sel.scores[k] == doctest::Approx(brute[k]).epsilon(1e-4));
    }
  }

  SUBCASE("shifting the critic output leaves the choice unchanged") {
    auto s = random_states(1, 16, 14);
    auto cands = torch::rand({5, 3, 16, 16}, gen(15));
    auto before = select_material(s, cands, policy, vt, transition, reward_model, next);
    {
      torch::NoGradGuard guard;
      critic->head->bias.add_(3.0);
    }
    auto after = select_material(s, cands, policy, vt, transition, reward_model, next);
    CHECK(after.index == before.index);
  }
}

TEST_CASE("select_material prefers the target itself over its inverse") {
  ValueNet vt(testing::tiny_model());
  reward::MseReward mse(-1.0);
  render::ExactTransition exact;
  auto policy = testing::scripted_policy(testing::full_cover_action());
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_states(1, 16, 400 + trial);
    auto cands = torch::cat({s.target, 1.0 - s.target});
    auto sel = select_material(s, cands, policy, vt, exact, mse, torch::rand({1, 3, 16, 16}));
    CHECK(sel.index == 0);
  }
}

TEST_CASE("argmax ties go to the lowest index") {
  CHECK(argmax_lowest({1.0, 3.0, 3.0, 2.0}) == 1);
  CHECK(argmax_lowest({0.0}) == 0);
  CHECK_THROWS_AS(argmax_lowest({}), UsageError);
}

TEST_CASE("train: plumbing, metrics order and replay bound") {
  torch::manual_seed(11);
  TrainConfig cfg;
  cfg.total_pastes = 2;
  cfg.episodes = 12;
  cfg.workers = 4;
  cfg.eval_interval = 4;
  cfg.eval_targets = 3;
  cfg.model = testing::tiny_model();
  cfg.agent.batch_size = 4;
  cfg.agent.updates_per_episode = 1;
  cfg.agent.replay_capacity = 10;
  Corpus corpus;
  for (int i = 0; i < 6; ++i) {
    corpus.train_targets.push_back(std::make_shared<const imaging::ImagePlane>(testing::random_image(16, 16, i)));
  }
  for (int i = 0; i < 3; ++i) {
    corpus.eval_targets.push_back(std::make_shared<const imaging::ImagePlane>(testing::random_image(20, 20, 50 + i)));
  }
  corpus.materials = testing::constant_pool({0.1f, 0.5f, 0.9f}, 16);

  CHECK_THROWS_AS(train(cfg, corpus, render::ShaperNet(16)), ConfigurationError);

  std::vector<MetricsRow> rows;
  auto result = train(cfg, corpus, testing::untrained_but_marked_shaper(16),
                      [&](const MetricsRow& r) { rows.push_back(r); });
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].episode > rows[i - 1].episode);
  CHECK(rows.back().episode == 12);
  CHECK(rows.back().critic_wass.has_value());
  CHECK(result.final_eval_mse == rows.back().eval_mse);
  CHECK(result.baseline_mse > 0.0);
  const double again = evaluate(result.models.policy, corpus.eval_targets, corpus.materials,
                                {2, 8, cfg.eval_seed});
  CHECK(again == result.final_eval_mse);

  cfg.reward.mode = reward::RewardMode::kMse;
  auto mse_run = train(cfg, corpus, testing::untrained_but_marked_shaper(16));
  CHECK_FALSE(mse_run.metrics.back().critic_wass.has_value());
}
