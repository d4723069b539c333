#pragma once

#include "collage/imaging/image.hpp"
#include "collage/render/action.hpp"

namespace collage::render {

// kNearest: nearest mask tap, bilinear material (the exact path). kBilinear / kBSpline: mask
// and masked material sampled with zero fill by bilinear or cubic B-spline taps.
enum class MaskSampling { kNearest, kBilinear, kBSpline };

// Rigid warp of the masked material onto the canvas. The cut centre
// (x_cut*(Wm-1), y_cut*(Hm-1)) lands on the glue point (x_glue*(Wc-1), y_glue*(Hc-1))
// and the scrap is rotated by action.angle() about it.
// out = canvas * (1 - T(mask)) + T(material * mask), clamped to [0,1].
imaging::ImagePlane warp_and_composite(const imaging::ImagePlane& canvas,
                                       const imaging::ImagePlane& material,
                                       const imaging::Mask& mask, const ActionVector& action,
                                       MaskSampling sampling = MaskSampling::kBilinear);

// Non-differentiable transition used for every real environment step:
// exact quad mask, nearest-neighbour mask warp. Identity when the acceptor denies.
imaging::ImagePlane transition_exact(const imaging::ImagePlane& canvas,
                                     const imaging::ImagePlane& material,
                                     const ActionVector& action);

namespace serial {
imaging::ImagePlane warp_and_composite(const imaging::ImagePlane& canvas,
                                       const imaging::ImagePlane& material,
                                       const imaging::Mask& mask, const ActionVector& action,
                                       MaskSampling sampling = MaskSampling::kBilinear);
}  // namespace serial

}  // namespace collage::render
