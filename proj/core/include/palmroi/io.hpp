#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "palmroi/image.hpp"

namespace palmroi::io {

/// Reads 8-bit gray or colour PNG, or binary PGM (P5, maxval <= 255).
/// Colour is reduced to luma with round(0.299 R + 0.587 G + 0.114 B).
/// Throws Error(Io).
GrayImage read_image(const std::filesystem::path& path);

/// 8-bit grayscale PNG.
void write_png(const std::filesystem::path& path, const GrayImage& img);

/// 1-bit PNG: nonzero pixels are white.
void write_binary_png(const std::filesystem::path& path, const BinaryImage& mask);

/// 8-bit RGB PNG; `rgb` holds width*height*3 bytes.
void write_rgb_png(const std::filesystem::path& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

/// Whole-file helpers.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace palmroi::io
