#include "collage/nn/layers.hpp"

#include <cmath>

#include "collage/errors.hpp"

namespace collage::nn {

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "trelu") return Activation::kTranslatedRelu;
  if (name == "silu") return Activation::kSilu;
  throw ConfigurationError("unknown activation '" + name + "' (relu|trelu|silu)");
}

Backbone parse_backbone(const std::string& name) {
  if (name == "small_cnn") return Backbone::kSmallCnn;
  if (name == "resnet18") return Backbone::kResNet18;
  throw ConfigurationError("unknown backbone '" + name + "' (small_cnn|resnet18)");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kTranslatedRelu: return "trelu";
    case Activation::kSilu: return "silu";
  }
  return "relu";
}
std::string to_string(Backbone b) { return b == Backbone::kSmallCnn ? "small_cnn" : "resnet18"; }

namespace {

torch::Tensor norm_except_dim0(const torch::Tensor& v) {
  std::vector<int64_t> dims;
  for (int64_t d = 1; d < v.dim(); ++d) dims.push_back(d);
  return v.pow(2).sum(dims, /*keepdim=*/true).add(1e-12).sqrt();
}

}  // namespace

WNConv2dImpl::WNConv2dImpl(int64_t in, int64_t out, int64_t kernel, int64_t stride_,
                           int64_t padding_, bool bias)
    : stride(stride_), padding(padding_) {
  auto w = torch::empty({out, in, kernel, kernel});
  torch::nn::init::kaiming_uniform_(w, std::sqrt(5.0));
  v = register_parameter("v", w);
  g = register_parameter("g", norm_except_dim0(w).detach().clone());
  if (bias) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in * kernel * kernel));
    b = register_parameter("b", torch::empty({out}).uniform_(-bound, bound));
  }
}

torch::Tensor WNConv2dImpl::weight() { return g * v / norm_except_dim0(v); }

torch::Tensor WNConv2dImpl::forward(const torch::Tensor& x) {
  return torch::conv2d(x, weight(), b.defined() ? b : torch::Tensor(), stride, padding);
}

WNLinearImpl::WNLinearImpl(int64_t in, int64_t out) {
  auto w = torch::empty({out, in});
  torch::nn::init::kaiming_uniform_(w, std::sqrt(5.0));
  v = register_parameter("v", w);
  g = register_parameter("g", norm_except_dim0(w).detach().clone());
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  b = register_parameter("b", torch::empty({out}).uniform_(-bound, bound));
}

torch::Tensor WNLinearImpl::forward(const torch::Tensor& x) {
  return torch::linear(x, g * v / norm_except_dim0(v), b);
}

TReLUImpl::TReLUImpl() { threshold = register_parameter("threshold", torch::zeros({1})); }

torch::Tensor TReLUImpl::forward(const torch::Tensor& x) {
  return torch::relu(x - threshold) + threshold;
}

torch::nn::AnyModule make_activation(Activation a) {
  if (a == Activation::kTranslatedRelu) return torch::nn::AnyModule(TReLU());
  if (a == Activation::kSilu) return torch::nn::AnyModule(torch::nn::SiLU());
  return torch::nn::AnyModule(torch::nn::ReLU());
}

namespace {

struct BasicBlockImpl : torch::nn::Module {
  BasicBlockImpl(int64_t in, int64_t out, int64_t stride, Activation act, bool bn) {
    conv1 = register_module("conv1", WNConv2d(in, out, 3, stride, 1, !bn));
    conv2 = register_module("conv2", WNConv2d(out, out, 3, 1, 1, !bn));
    act1 = make_activation(act);
    act2 = make_activation(act);
    register_module("act1", act1.ptr());
    register_module("act2", act2.ptr());
    if (bn) {
      bn1 = register_module("bn1", torch::nn::BatchNorm2d(out));
      bn2 = register_module("bn2", torch::nn::BatchNorm2d(out));
    }
    if (stride != 1 || in != out) shortcut = register_module("shortcut", WNConv2d(in, out, 1, stride, 0));
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto y = conv1(x);
    if (bn1) y = bn1(y);
    y = act1.forward(y);
    y = conv2(y);
    if (bn2) y = bn2(y);
    return act2.forward(y + (shortcut ? shortcut(x) : x));
  }

  WNConv2d conv1{nullptr}, conv2{nullptr}, shortcut{nullptr};
  torch::nn::BatchNorm2d bn1{nullptr}, bn2{nullptr};
  torch::nn::AnyModule act1, act2;
};
TORCH_MODULE(BasicBlock);

}  // namespace

EncoderImpl::EncoderImpl(const EncoderOptions& options) : options_(options) {
  body_ = torch::nn::Sequential();
  const int64_t res = options.resolution;
  if (options.backbone == Backbone::kSmallCnn) {
    if (res % 16 != 0) throw ConfigurationError("small_cnn backbone needs resolution divisible by 16");
    const int64_t w = options.base_width;
    const int64_t widths[4] = {w, 2 * w, 2 * w, 4 * w};
    int64_t in = options.in_channels;
    for (int64_t out : widths) {
      body_->push_back(WNConv2d(in, out, 3, 2, 1, !options.batch_norm));
      if (options.batch_norm) body_->push_back(torch::nn::BatchNorm2d(out));
      body_->push_back(make_activation(options.activation));
      in = out;
    }
    body_->push_back(torch::nn::Flatten());
    features_ = in * (res / 16) * (res / 16);
  } else {
    const int64_t w = 2 * options.base_width;
    body_->push_back(WNConv2d(options.in_channels, w, 3, 1, 1, !options.batch_norm));
    if (options.batch_norm) body_->push_back(torch::nn::BatchNorm2d(w));
    body_->push_back(make_activation(options.activation));
    int64_t in = w;
    const int64_t widths[4] = {w, 2 * w, 4 * w, 8 * w};
    const int64_t strides[4] = {1, 2, 2, 2};
    for (int s = 0; s < 4; ++s) {
      body_->push_back(BasicBlock(in, widths[s], strides[s], options.activation, options.batch_norm));
      body_->push_back(BasicBlock(widths[s], widths[s], 1, options.activation, options.batch_norm));
      in = widths[s];
    }
    body_->push_back(torch::nn::AdaptiveAvgPool2d(1));
    body_->push_back(torch::nn::Flatten());
    features_ = in;
  }
  register_module("body", body_);
}

torch::Tensor EncoderImpl::forward(const torch::Tensor& x) {
  if (x.dim() != 4 || x.size(1) != options_.in_channels || x.size(2) != options_.resolution ||
      x.size(3) != options_.resolution) {
    throw DimensionError("encoder input must be [B," + std::to_string(options_.in_channels) + "," +
                         std::to_string(options_.resolution) + "," +
                         std::to_string(options_.resolution) + "]");
  }
  return body_->forward(x);
}

void copy_parameters(torch::nn::Module& dst, const torch::nn::Module& src) {
  torch::NoGradGuard guard;
  auto dp = dst.named_parameters(true);
  auto sp = src.named_parameters(true);
  for (const auto& item : sp) dp[item.key()].copy_(item.value());
  auto db = dst.named_buffers(true);
  auto sb = src.named_buffers(true);
  for (const auto& item : sb) db[item.key()].copy_(item.value());
}

}  // namespace collage::nn
