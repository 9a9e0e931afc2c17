#pragma once

#include <filesystem>
#include <string>

#include "myosynth/image.hpp"

/// Raster file formats. PNG output carries no timestamps, so identical
/// images encode to identical bytes.
namespace myosynth::io {

void write_png_rgb(const std::filesystem::path& path, const RgbImage& img);
void write_png_gray8(const std::filesystem::path& path, const Image<std::uint8_t>& img);
void write_png_gray16(const std::filesystem::path& path, const Image<std::uint16_t>& img);

/// Decoded PNG with its native depth and channel count.
struct PngData {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint16_t> samples;  // interleaved, row-major
};
PngData read_png(const std::filesystem::path& path);

RgbImage read_png_rgb(const std::filesystem::path& path);
Image<std::uint8_t> read_png_gray8(const std::filesystem::path& path);
Image<std::uint16_t> read_png_gray16(const std::filesystem::path& path);

/// Binary mask stored as 8-bit 0/255; reading treats any nonzero as set.
void write_mask_png(const std::filesystem::path& path, const Mask& mask);
Mask read_mask_png(const std::filesystem::path& path);

/// Instance labels as 16-bit gray; throws if an id exceeds 65535.
void write_labels_png(const std::filesystem::path& path, const LabelImage& labels);
LabelImage read_labels_png(const std::filesystem::path& path);

/// Uncompressed little-endian single-channel 32-bit float TIFF (one strip).
void write_tiff_float(const std::filesystem::path& path, const FloatImage& img);
/// Reads single-channel float32 TIFFs, either byte order, any strip layout,
/// uncompressed.
FloatImage read_tiff_float(const std::filesystem::path& path);

/// Probability map wire format: 16-bit gray PNG (value / 65535) or float32
/// TIFF. Throws IoError describing the first violation.
ProbabilityMap read_probability(const std::filesystem::path& path);
void write_probability_png(const std::filesystem::path& path, const ProbabilityMap& prob);
void write_probability_tiff(const std::filesystem::path& path, const ProbabilityMap& prob);

/// Format check for probability files; empty string when valid.
std::string check_probability_file(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace myosynth::io
