#pragma once

#include <vector>

#include "collage/imaging/image.hpp"

namespace collage::planner {

struct Window {
  int scale = 0;  // u: side length in pixels
  int row = 0;
  int col = 0;
  int index = 0;  // row-major position within its scale
};

// ceil(rho * u), ignoring representation error in rho * u.
int window_stride(int u, double rho);
// ceil((dim - u) / stride) + 1
int axis_positions(int dim, int u, int stride);

// Sliding u x u windows with stride ceil(rho*u); the last position on each axis is clamped
// flush to the border. Row-major. Throws ConfigurationError when u exceeds the image.
std::vector<Window> plan_windows(int width, int height, int u, double rho);

// Standard normal CDF of population z-scores; 0.5 everywhere when the spread is zero.
std::vector<double> standardize(const std::vector<double>& complexities);

// round(k_max * co_p^tau), at least 1 when floor_one is set.
int cycle_budget(double co_p, int k_max, double tau, bool floor_one);

struct WindowPlan {
  Window window;
  double complexity = 0.0;
  double z = 0.0;
  double co_p = 0.5;
  int budget = 0;
};

struct ScalePlan {
  int scale = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<WindowPlan> windows;
};

struct MultiScalePlan {
  int width = 0;
  int height = 0;
  double rho = 0.5;
  int k_max = 8;
  double tau = 1.0;
  std::vector<ScalePlan> levels;  // coarse to fine

  long total_pastes() const;
  bool operator==(const MultiScalePlan&) const = default;
};

bool operator==(const Window&, const Window&);
bool operator==(const WindowPlan&, const WindowPlan&);
bool operator==(const ScalePlan&, const ScalePlan&);

// Windows per scale, Sobel complexity of each target crop, per-scale standardisation and
// budgets; the coarsest scale guarantees every window at least one cycle.
MultiScalePlan build_plan(const imaging::ImagePlane& target, const std::vector<int>& scales,
                          double rho, int k_max, double tau);

}  // namespace collage::planner
