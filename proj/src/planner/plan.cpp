#include "collage/planner/plan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "collage/errors.hpp"
#include "collage/imaging/complexity.hpp"

namespace collage::planner {

int window_stride(int u, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigurationError("rho must lie in (0,1]");
  if (u < 1) throw ConfigurationError("window size must be positive");
  return static_cast<int>(std::ceil(rho * u - 1e-9));
}

int axis_positions(int dim, int u, int stride) {
  return (dim - u + stride - 1) / stride + 1;
}

std::vector<Window> plan_windows(int width, int height, int u, double rho) {
  if (u < 1 || u > std::min(width, height)) {
    throw ConfigurationError("window size " + std::to_string(u) + " does not fit a " +
                             std::to_string(width) + "x" + std::to_string(height) + " image");
  }
  const int s = window_stride(u, rho);
  const int ny = axis_positions(height, u, s);
  const int nx = axis_positions(width, u, s);
  std::vector<Window> out;
  out.reserve(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    const int row = std::min(iy * s, height - u);
    for (int ix = 0; ix < nx; ++ix) {
      const int col = std::min(ix * s, width - u);
      out.push_back({u, row, col, static_cast<int>(out.size())});
    }
  }
  return out;
}

std::vector<double> standardize(const std::vector<double>& complexities) {
  if (complexities.empty()) throw UsageError("standardize needs at least one value");
  const double n = static_cast<double>(complexities.size());
  double mean = 0.0;
  for (double c : complexities) mean += c;
  mean /= n;
  double var = 0.0;
  for (double c : complexities) var += (c - mean) * (c - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> out(complexities.size(), 0.5);
  if (sd == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double z = (complexities[i] - mean) / sd;
    out[i] = 0.5 * std::erfc(-z / std::sqrt(2.0));
  }
  return out;
}

int cycle_budget(double co_p, int k_max, double tau, bool floor_one) {
  if (k_max < 1) throw ConfigurationError("K_max must be at least 1");
  if (!(tau > 0.0)) throw ConfigurationError("tau must be positive");
  co_p = std::clamp(co_p, 0.0, 1.0);
  int k = static_cast<int>(std::lround(k_max * std::pow(co_p, tau)));
  if (floor_one) k = std::max(k, 1);
  return std::clamp(k, 0, k_max);
}

long MultiScalePlan::total_pastes() const {
  long total = 0;
  for (const auto& level : levels)
    for (const auto& w : level.windows) total += w.budget;
  return total;
}

bool operator==(const Window& a, const Window& b) {
  return a.scale == b.scale && a.row == b.row && a.col == b.col && a.index == b.index;
}
bool operator==(const WindowPlan& a, const WindowPlan& b) {
  return a.window == b.window && a.complexity == b.complexity && a.z == b.z &&
         a.co_p == b.co_p && a.budget == b.budget;
}
bool operator==(const ScalePlan& a, const ScalePlan& b) {
  return a.scale == b.scale && a.mean == b.mean && a.stddev == b.stddev &&
         a.windows == b.windows;
}

MultiScalePlan build_plan(const imaging::ImagePlane& target, const std::vector<int>& scales,
                          double rho, int k_max, double tau) {
  if (scales.empty()) throw ConfigurationError("scale sequence is empty");
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (scales[i] >= scales[i - 1]) {
      throw ConfigurationError("scale sequence must be strictly decreasing");
    }
  }
  if (k_max < 1) throw ConfigurationError("K_max must be at least 1");
  if (!(tau > 0.0)) throw ConfigurationError("tau must be positive");

  MultiScalePlan plan;
  plan.width = target.width();
  plan.height = target.height();
  plan.rho = rho;
  plan.k_max = k_max;
  plan.tau = tau;
  for (std::size_t si = 0; si < scales.size(); ++si) {
    const int u = scales[si];
    ScalePlan level;
    level.scale = u;
    std::vector<double> co;
    for (const auto& w : plan_windows(target.width(), target.height(), u, rho)) {
      WindowPlan wp;
      wp.window = w;
      wp.complexity = imaging::complexity(target.crop(w.row, w.col, u, u));
      co.push_back(wp.complexity);
      level.windows.push_back(wp);
    }
    double mean = 0.0;
    for (double c : co) mean += c;
    mean /= static_cast<double>(co.size());
    double var = 0.0;
    for (double c : co) var += (c - mean) * (c - mean);
    level.mean = mean;
    level.stddev = std::sqrt(var / static_cast<double>(co.size()));

    const auto probs = standardize(co);
    for (std::size_t i = 0; i < level.windows.size(); ++i) {
      auto& wp = level.windows[i];
      wp.z = level.stddev > 0.0 ? (wp.complexity - mean) / level.stddev : 0.0;
      wp.co_p = probs[i];
      wp.budget = cycle_budget(wp.co_p, k_max, tau, si == 0);
    }
    plan.levels.push_back(std::move(level));
  }
  return plan;
}

}  // namespace collage::planner
