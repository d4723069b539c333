#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "collage/imaging/image.hpp"

namespace collage::io {

// Handwriting-like digits: white glyph on black with random font, scale, stroke, rotation
// and offset.
std::vector<imaging::ImagePlane> synth_digits(int count, int size, std::uint64_t seed);

// Procedural materials: stripes, checks, value noise, gradients and blobs in random colours.
std::vector<imaging::ImagePlane> synth_textures(int count, int size, std::uint64_t seed);

// Writes images as zero-padded PNGs (00000.png, ...).
void write_corpus(const std::filesystem::path& dir, const std::vector<imaging::ImagePlane>& images);

}  // namespace collage::io
