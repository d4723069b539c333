#pragma once

#include <string>

#include <torch/torch.h>

namespace collage::nn {

enum class Activation { kRelu, kTranslatedRelu, kSilu };
enum class Backbone { kSmallCnn, kResNet18 };

Activation parse_activation(const std::string& name);
Backbone parse_backbone(const std::string& name);
std::string to_string(Activation a);
std::string to_string(Backbone b);

// Convolution with weight normalisation: w = g * v / ||v|| per output channel.
struct WNConv2dImpl : torch::nn::Module {
  WNConv2dImpl(int64_t in, int64_t out, int64_t kernel, int64_t stride = 1, int64_t padding = 0,
               bool bias = true);
  torch::Tensor forward(const torch::Tensor& x);
  torch::Tensor weight();

  torch::Tensor v, g, b;
  int64_t stride, padding;
};
TORCH_MODULE(WNConv2d);

struct WNLinearImpl : torch::nn::Module {
  WNLinearImpl(int64_t in, int64_t out);
  torch::Tensor forward(const torch::Tensor& x);

  torch::Tensor v, g, b;
};
TORCH_MODULE(WNLinear);

// max(x - t, 0) + t with a learnable threshold t initialised to zero.
struct TReLUImpl : torch::nn::Module {
  TReLUImpl();
  torch::Tensor forward(const torch::Tensor& x);

  torch::Tensor threshold;
};
TORCH_MODULE(TReLU);

// Activation as a module so it can live inside a Sequential.
torch::nn::AnyModule make_activation(Activation a);

struct EncoderOptions {
  int64_t in_channels = 12;
  int64_t resolution = 32;
  Backbone backbone = Backbone::kSmallCnn;
  Activation activation = Activation::kRelu;
  bool batch_norm = false;
  int64_t base_width = 32;
};

// Image encoder producing a flat feature vector of size feature_size().
struct EncoderImpl : torch::nn::Module {
  explicit EncoderImpl(const EncoderOptions& options);
  torch::Tensor forward(const torch::Tensor& x);
  int64_t feature_size() const { return features_; }
  const EncoderOptions& options() const { return options_; }

 private:
  EncoderOptions options_;
  torch::nn::Sequential body_{nullptr};
  int64_t features_ = 0;
};
TORCH_MODULE(Encoder);

// Copies parameters and buffers of src into dst (same architecture).
void copy_parameters(torch::nn::Module& dst, const torch::nn::Module& src);

}  // namespace collage::nn
