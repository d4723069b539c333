#include "collage/render/shaper.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <cmath>

#include "collage/errors.hpp"
#include "collage/render/geometry.hpp"

namespace collage::render {

ShaperNetImpl::ShaperNetImpl(int resolution, nn::Activation activation) : resolution_(resolution) {
  if (resolution < 8 || resolution % 4 != 0)
    throw ConfigurationError("shaper resolution must be a multiple of 4 and at least 8");
  const int64_t base = resolution / 4;
  trunk_ = torch::nn::Sequential(torch::nn::Linear(kShapeDim, 256));
  trunk_->push_back(nn::make_activation(activation));
  trunk_->push_back(torch::nn::Linear(256, 512));
  trunk_->push_back(nn::make_activation(activation));
  trunk_->push_back(torch::nn::Linear(512, 1024));
  trunk_->push_back(nn::make_activation(activation));
  trunk_->push_back(torch::nn::Linear(1024, 16 * base * base));
  trunk_->push_back(nn::make_activation(activation));

  using torch::nn::Conv2dOptions;
  decoder_ = torch::nn::Sequential(torch::nn::Conv2d(Conv2dOptions(16, 32, 3).padding(1)));
  decoder_->push_back(nn::make_activation(activation));
  decoder_->push_back(torch::nn::PixelShuffle(2));  // 8 x 2base
  decoder_->push_back(torch::nn::Conv2d(Conv2dOptions(8, 32, 3).padding(1)));
  decoder_->push_back(nn::make_activation(activation));
  decoder_->push_back(torch::nn::PixelShuffle(2));  // 8 x 4base
  decoder_->push_back(torch::nn::Conv2d(Conv2dOptions(8, 16, 3).padding(1)));
  decoder_->push_back(nn::make_activation(activation));
  decoder_->push_back(torch::nn::Conv2d(Conv2dOptions(16, 1, 3).padding(1)));

  register_module("trunk", trunk_);
  register_module("decoder", decoder_);
  trained_flag_ = register_buffer("trained", torch::zeros({1}));
}

torch::Tensor ShaperNetImpl::forward(const torch::Tensor& shape_params) {
  if (shape_params.dim() != 2 || shape_params.size(1) != kShapeDim)
    throw DimensionError("shaper input must be [B,9]");
  const int64_t base = resolution_ / 4;
  auto h = trunk_->forward(shape_params).view({-1, 16, base, base});
  const auto gate =
      torch::sigmoid((shape_params.narrow(1, 8, 1) - (0.5 + kGateOffset)) * kGateSharpness);
  return torch::sigmoid(decoder_->forward(h)) * gate.view({-1, 1, 1, 1});
}

bool ShaperNetImpl::trained() const { return trained_flag_.item<float>() > 0.5f; }

void ShaperNetImpl::mark_trained() {
  torch::NoGradGuard guard;
  trained_flag_.fill_(1.0);
}

torch::Tensor shaper_forward(ShaperNet& shaper, const torch::Tensor& shape_params) {
  if (!shaper->trained()) throw UsageError("shaper network has not been trained");
  return shaper->forward(shape_params);
}

torch::Tensor exact_masks(const torch::Tensor& shape_params, int resolution) {
  auto p = shape_params.detach().to(torch::kCPU, torch::kFloat32).contiguous();
  const int64_t n = p.size(0);
  auto out = torch::zeros({n, 1, resolution, resolution});
  const float* src = p.data_ptr<float>();
  float* dst = out.data_ptr<float>();
  const std::size_t plane = static_cast<std::size_t>(resolution) * resolution;
  for (int64_t i = 0; i < n; ++i) {
    ActionVector a;
    for (int k = 0; k < 8; ++k) a[k] = src[i * kShapeDim + k];
    a[kAcceptor] = src[i * kShapeDim + 8];
    const auto quad = decode_action(a, resolution, resolution);
    const auto mask = rasterize_mask_exact(quad, a[kAcceptor], resolution, resolution);
    std::copy(mask.values.begin(), mask.values.end(), dst + i * plane);
  }
  return out;
}

torch::Tensor random_shape_params(int64_t n, torch::Generator& gen, double acceptor_lo,
                                  double acceptor_hi) {
  auto p = torch::rand({n, kShapeDim}, gen);
  p.select(1, 8).mul_(acceptor_hi - acceptor_lo).add_(acceptor_lo);
  return p;
}

ShaperReport evaluate_shaper(ShaperNet& shaper, int samples, std::uint64_t seed) {
  torch::NoGradGuard guard;
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  const bool was_training = shaper->is_training();
  shaper->eval();
  const auto dtype = shaper->parameters().front().scalar_type();

  ShaperReport report;
  auto params = random_shape_params(samples, gen);
  auto target = exact_masks(params, shaper->resolution());
  auto pred = shaper->forward(params.to(dtype)).to(torch::kFloat32);
  report.heldout_mae = (pred - target).abs().mean().item<double>();
  report.baseline_mae = (target - 0.5).abs().mean().item<double>();

  auto accepted = random_shape_params(samples, gen, kAcceptThreshold, 1.0);
  auto accepted_pred = shaper->forward(accepted.to(dtype)).to(torch::kFloat32);
  report.accepted_mae =
      (accepted_pred - exact_masks(accepted, shaper->resolution())).abs().mean().item<double>();

  auto denied = random_shape_params(samples, gen, 0.0, kAcceptThreshold);
  auto denied_pred = shaper->forward(denied.to(dtype));
  report.denied_max = denied_pred.max().item<double>();
  if (was_training) shaper->train();
  return report;
}

PretrainedShaper pretrain_shaper(const ShaperConfig& config, const ShaperProgress& progress) {
  if (config.steps < 0 || config.batch_size < 1)
    throw ConfigurationError("shaper pretraining needs steps >= 0 and batch >= 1");
  torch::manual_seed(config.seed);
  auto gen = at::make_generator<at::CPUGeneratorImpl>(config.seed);
  ShaperNet net(config.resolution, config.activation);
  torch::optim::Adam opt(net->parameters(), torch::optim::AdamOptions(config.learning_rate));

  PretrainedShaper result{net, {}};
  double running = 0.0;
  for (int step = 1; step <= config.steps; ++step) {
    // Step decay over the final third sharpens edges.
    if (step == (2 * config.steps) / 3 + 1) {
      for (auto& group : opt.param_groups())
        static_cast<torch::optim::AdamOptions&>(group.options()).lr(config.learning_rate * 0.1);
    }
    auto params = random_shape_params(config.batch_size, gen);
    auto target = exact_masks(params, config.resolution);
    auto pred = net->forward(params).clamp(1e-6, 1.0 - 1e-6);
    auto loss = torch::binary_cross_entropy(pred, target);
    const double value = loss.item<double>();
    if (!std::isfinite(value))
      throw TrainingDiverged("shaper loss became non-finite at step " + std::to_string(step));
    opt.zero_grad();
    loss.backward();
    opt.step();
    running += value;
    if (config.log_every > 0 && step % config.log_every == 0) {
      result.report.loss_curve.push_back(running / config.log_every);
      if (progress) progress(step, running / config.log_every);
      running = 0.0;
    }
  }
  net->eval();
  net->mark_trained();
  const auto steps = result.report.loss_curve;
  result.report = evaluate_shaper(net, config.eval_samples, config.seed + 7919);
  result.report.loss_curve = steps;
  result.report.steps = config.steps;
  return result;
}

}  // namespace collage::render
