#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctsep/image.hpp"

namespace ctsep {

/// How raw block entropies are stretched onto 0..255.
enum class EntropyNorm {
  MinMax,  ///< affine map of [min raw, max raw] of this image onto [0, 255]
  Fixed,   ///< affine map of [0, log2(k*k)] onto [0, 255]
};

/// Per-pixel Shannon entropy (bits) of the k x k block centred on each pixel.
struct EntropyMap {
  std::size_t width = 0;
  std::size_t height = 0;
  int block_size = 0;
  std::vector<double> raw;

  double at(std::size_t x, std::size_t y) const { return raw[y * width + x]; }
};

struct QuantizedEntropyMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> levels;
  double min_raw = 0.0;
  double max_raw = 0.0;

  std::uint8_t at(std::size_t x, std::size_t y) const { return levels[y * width + x]; }
};

/// log2(k * k), the entropy of a block whose samples are all distinct.
double max_block_entropy(int block_size);

/// Plug-in entropy (bits) of a sample of 8-bit levels.
double sample_entropy(std::span<const std::uint8_t> levels);

/// Entropy of the k x k block centred on (x, y). Intensities are quantized to
/// 256 levels and borders use replicate padding.
double block_entropy(const GrayImage& img, std::size_t x, std::size_t y, int block_size);

EntropyMap entropy_map(const GrayImage& img, int block_size);

QuantizedEntropyMap quantize_entropy(const EntropyMap& map,
                                     EntropyNorm norm = EntropyNorm::MinMax);

}  // namespace ctsep
