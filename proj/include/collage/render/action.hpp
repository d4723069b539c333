#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace collage::render {

inline constexpr int kActionDim = 12;
// Components fed to the shaper: x_cut, y_cut, w, h, p1..p4, acceptor.
inline constexpr int kShapeDim = 9;
inline constexpr float kAcceptThreshold = 0.5f;

enum ActionIndex : int {
  kXCut = 0,
  kYCut,
  kWidth,
  kHeight,
  kP1,
  kP2,
  kP3,
  kP4,
  kXGlue,
  kYGlue,
  kTheta,
  kAcceptor,
};

// Twelve normalised scalars driving one cut-and-paste.
struct ActionVector {
  std::array<float, kActionDim> values{};

  float operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  float& operator[](int i) { return values[static_cast<std::size_t>(i)]; }

  bool accepts() const { return values[kAcceptor] >= kAcceptThreshold; }
  // Rotation in radians; theta = 0.5 is no rotation.
  double angle() const;
  std::array<float, kShapeDim> shape_params() const;
  // Copy with every component clamped into [0,1].
  ActionVector clamped() const;

  static ActionVector from_span(std::span<const float> v);
  bool operator==(const ActionVector&) const = default;
};

}  // namespace collage::render
