#pragma once

#include <filesystem>

#include "collage/imaging/image.hpp"

namespace collage::io {

// PNG/JPEG (anything OpenCV decodes) to RGB in [0,1]; grayscale is replicated, alpha dropped.
// Throws std::runtime_error when the file cannot be decoded.
imaging::ImagePlane read_image(const std::filesystem::path& path);

// 8-bit RGB PNG. Throws std::runtime_error on failure.
void write_png(const std::filesystem::path& path, const imaging::ImagePlane& image);

bool is_image_file(const std::filesystem::path& path);

}  // namespace collage::io
