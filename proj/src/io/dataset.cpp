#include "collage/io/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include "collage/errors.hpp"
#include "collage/io/image_io.hpp"

namespace collage::io {

namespace fs = std::filesystem;

std::vector<fs::path> list_images(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw ConfigurationError("dataset directory " + root.string() + " does not exist");
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

SplitFiles split_files(std::vector<fs::path> files, double eval_fraction, std::uint64_t seed) {
  if (!(eval_fraction >= 0.0 && eval_fraction <= 1.0)) {
    throw ConfigurationError("eval fraction must lie in [0,1]");
  }
  std::sort(files.begin(), files.end());
  std::mt19937_64 rng(seed);
  for (std::size_t i = files.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(files[i - 1], files[pick(rng)]);
  }
  const auto n_eval = static_cast<std::size_t>(std::lround(eval_fraction * files.size()));
  SplitFiles out;
  out.eval.assign(files.begin(), files.begin() + static_cast<std::ptrdiff_t>(n_eval));
  out.train.assign(files.begin() + static_cast<std::ptrdiff_t>(n_eval), files.end());
  return out;
}

std::vector<imaging::ImagePlane> load_dataset(const DatasetSpec& spec, const WarningSink& warn) {
  auto files = list_images(spec.root);
  if (spec.split != Split::kAll) {
    auto parts = split_files(std::move(files), spec.eval_fraction, spec.seed);
    files = spec.split == Split::kTrain ? std::move(parts.train) : std::move(parts.eval);
  }
  std::vector<imaging::ImagePlane> out;
  for (const auto& f : files) {
    try {
      auto img = read_image(f);
      if (spec.resolution > 0) img = imaging::resize_bilinear(img, spec.resolution, spec.resolution);
      out.push_back(std::move(img));
    } catch (const std::runtime_error& e) {
      if (warn) warn(e.what());
      else std::cerr << "warning: skipping " << f.string() << ": " << e.what() << '\n';
    }
  }
  if (out.empty()) {
    throw ConfigurationError("no usable images in " + spec.root.string());
  }
  return out;
}

}  // namespace collage::io
