#include "collage/tensor_bridge.hpp"

#include "collage/errors.hpp"

namespace collage {

torch::Tensor to_tensor(const imaging::ImagePlane& img) {
  auto data = img.data();
  return torch::from_blob(const_cast<float*>(data.data()),
                          {imaging::ImagePlane::kChannels, img.height(), img.width()},
                          torch::kFloat32)
      .clone();
}

torch::Tensor stack_images(std::span<const imaging::ImagePlane> images) {
  if (images.empty()) throw UsageError("stack_images: empty batch");
  std::vector<torch::Tensor> ts;
  ts.reserve(images.size());
  for (const auto& img : images) {
    if (!img.same_shape(images.front())) throw DimensionError("stack_images: mixed shapes");
    ts.push_back(to_tensor(img));
  }
  return torch::stack(ts);
}

imaging::ImagePlane to_image(const torch::Tensor& t) {
  torch::Tensor x = t.detach();
  if (x.dim() == 4 && x.size(0) == 1) x = x.squeeze(0);
  if (x.dim() != 3 || x.size(0) != imaging::ImagePlane::kChannels)
    throw DimensionError("to_image expects a [3,H,W] tensor");
  x = x.to(torch::kCPU, torch::kFloat32).contiguous();
  const auto h = static_cast<int>(x.size(1));
  const auto w = static_cast<int>(x.size(2));
  const float* p = x.data_ptr<float>();
  return imaging::ImagePlane::from_planar(h, w, std::vector<float>(p, p + x.numel()));
}

std::vector<imaging::ImagePlane> unstack_images(const torch::Tensor& batch) {
  std::vector<imaging::ImagePlane> out;
  out.reserve(static_cast<std::size_t>(batch.size(0)));
  for (int64_t i = 0; i < batch.size(0); ++i) out.push_back(to_image(batch[i]));
  return out;
}

torch::Tensor to_tensor(const imaging::Mask& mask) {
  return torch::from_blob(const_cast<float*>(mask.values.data()), {1, mask.height, mask.width},
                          torch::kFloat32)
      .clone();
}

imaging::Mask to_mask(const torch::Tensor& t) {
  torch::Tensor x = t.detach().to(torch::kCPU, torch::kFloat32).contiguous();
  if (x.dim() == 3) x = x.squeeze(0);
  if (x.dim() != 2) throw DimensionError("to_mask expects [1,H,W] or [H,W]");
  imaging::Mask m(static_cast<int>(x.size(0)), static_cast<int>(x.size(1)));
  std::copy_n(x.data_ptr<float>(), x.numel(), m.values.begin());
  return m;
}

torch::Tensor to_tensor(const render::ActionVector& a) {
  return torch::from_blob(const_cast<float*>(a.values.data()), {render::kActionDim},
                          torch::kFloat32)
      .clone();
}

render::ActionVector to_action(const torch::Tensor& t) {
  torch::Tensor x = t.detach().to(torch::kCPU, torch::kFloat32).contiguous().view({-1});
  return render::ActionVector::from_span(
      std::span<const float>(x.data_ptr<float>(), static_cast<std::size_t>(x.numel())));
}

}  // namespace collage
