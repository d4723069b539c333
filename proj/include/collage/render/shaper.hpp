#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <torch/torch.h>

#include "collage/nn/layers.hpp"

namespace collage::render {

struct ShaperConfig {
  int resolution = 32;
  int steps = 20000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  int eval_samples = 1000;
  nn::Activation activation = nn::Activation::kSilu;
  int log_every = 1000;
};

// Acceptor gate sigmoid(kGateSharpness * (u - 0.5 - kGateOffset)): below 0.0025 for every
// denied action, above 0.997 once u >= 0.5 + 2 * kGateOffset.
inline constexpr double kGateSharpness = 200.0;
inline constexpr double kGateOffset = 0.03;

// Learned mask renderer: 9 shape components -> mask at a fixed resolution.
// Fully connected trunk followed by sub-pixel (pixel shuffle) upsampling; the
// learned mask is multiplied by the acceptor gate.
struct ShaperNetImpl : torch::nn::Module {
  explicit ShaperNetImpl(int resolution = 32,
                         nn::Activation activation = nn::Activation::kSilu);

  torch::Tensor forward(const torch::Tensor& shape_params);  // mask [B,1,S,S] in [0,1]

  int resolution() const { return resolution_; }
  bool trained() const;
  void mark_trained();

 private:
  int resolution_;
  torch::nn::Sequential trunk_{nullptr};
  torch::nn::Sequential decoder_{nullptr};
  torch::Tensor trained_flag_;
};
TORCH_MODULE(ShaperNet);

// Soft mask in [0,1]; throws UsageError if the shaper has not been trained.
torch::Tensor shaper_forward(ShaperNet& shaper, const torch::Tensor& shape_params);

// Exact binary masks [B,1,S,S] rendered by the reference rasterizer.
torch::Tensor exact_masks(const torch::Tensor& shape_params, int resolution);

// Uniform random shape parameters; acceptor drawn from [acceptor_lo, acceptor_hi).
torch::Tensor random_shape_params(int64_t n, torch::Generator& gen, double acceptor_lo = 0.0,
                                  double acceptor_hi = 1.0);

struct ShaperReport {
  int steps = 0;
  double heldout_mae = 0.0;     // mean |psi - exact| over random actions
  double denied_max = 0.0;      // max mask value over random denied actions
  double baseline_mae = 0.0;    // constant-0.5 predictor on the same actions
  double accepted_mae = 0.0;    // mean |psi - exact| over random accepted actions
  std::vector<double> loss_curve;
};

ShaperReport evaluate_shaper(ShaperNet& shaper, int samples, std::uint64_t seed);

struct PretrainedShaper {
  ShaperNet net;
  ShaperReport report;
};

using ShaperProgress = std::function<void(int step, double loss)>;

// Regresses the shaper onto exact masks of freshly sampled actions with per-pixel BCE.
// Throws TrainingDiverged on a non-finite loss.
PretrainedShaper pretrain_shaper(const ShaperConfig& config, const ShaperProgress& progress = {});

}  // namespace collage::render
