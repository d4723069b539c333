#pragma once

#include <span>
#include <vector>

#include <torch/torch.h>

#include "collage/imaging/image.hpp"
#include "collage/render/action.hpp"

namespace collage {

// [3,H,W] float tensor copy of an image.
torch::Tensor to_tensor(const imaging::ImagePlane& img);
// [B,3,H,W] stack; all images must share a shape.
torch::Tensor stack_images(std::span<const imaging::ImagePlane> images);
// Accepts [3,H,W] or [1,3,H,W]; values are clamped into [0,1].
imaging::ImagePlane to_image(const torch::Tensor& t);
std::vector<imaging::ImagePlane> unstack_images(const torch::Tensor& batch);

torch::Tensor to_tensor(const imaging::Mask& mask);  // [1,H,W]
imaging::Mask to_mask(const torch::Tensor& t);

torch::Tensor to_tensor(const render::ActionVector& a);  // [12]
render::ActionVector to_action(const torch::Tensor& t);

}  // namespace collage
