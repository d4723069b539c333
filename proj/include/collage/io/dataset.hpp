#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "collage/imaging/image.hpp"

namespace collage::io {

enum class Split { kTrain, kEval, kAll };

struct DatasetSpec {
  std::filesystem::path root;
  Split split = Split::kAll;
  int resolution = 32;        // square; <= 0 keeps the native size
  double eval_fraction = 0.2;
  std::uint64_t seed = 7;
};

// Image files under root (recursive), sorted by path.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& root);

struct SplitFiles {
  std::vector<std::filesystem::path> train;
  std::vector<std::filesystem::path> eval;
};

// Seeded shuffle of the sorted file list; the first round(n * eval_fraction) files go to eval.
SplitFiles split_files(std::vector<std::filesystem::path> files, double eval_fraction,
                       std::uint64_t seed);

using WarningSink = std::function<void(const std::string&)>;

// Decoded, 3-channel, resized images of the requested split in split order. Unreadable files
// are reported to `warn` and skipped. Throws ConfigurationError when nothing is left.
std::vector<imaging::ImagePlane> load_dataset(const DatasetSpec& spec, const WarningSink& warn = {});

}  // namespace collage::io
