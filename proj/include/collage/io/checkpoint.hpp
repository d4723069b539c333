#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "collage/agent/models.hpp"
#include "collage/io/config.hpp"
#include "collage/render/shaper.hpp"
#include "collage/reward/critic.hpp"

namespace collage::io {

inline constexpr int kCheckpointVersion = 1;

// Single-file archive: magic line, header length, JSON header (version, config, metadata,
// section table with sizes and FNV-1a digests), then the serialized parameter blobs.
struct Checkpoint {
  RunConfig config;
  render::ShaperNet shaper{nullptr};
  std::optional<agent::AgentModels> agent;
  reward::CriticNet critic{nullptr};
  std::map<std::string, double> metadata;
};

// Writes to a temporary sibling, then renames over path.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// Throws IncompatibleVersion on a version mismatch and IntegrityError on a truncated or
// corrupted file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace collage::io
