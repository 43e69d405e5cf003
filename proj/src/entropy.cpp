#include "ctsep/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ctsep/error.hpp"

namespace ctsep {

namespace {

using Histogram = std::array<std::uint32_t, 256>;

void check_block_size(int k) {
  require(k >= 3 && k % 2 == 1,
          "block size must be odd and at least 3 (got " + std::to_string(k) + ")");
}

// H = log2(N) - (1/N) sum c log2 c, clamped to the admissible range so that
// the endpoints come out exact.
double histogram_entropy(const Histogram& hist, std::size_t total) {
  const double n = static_cast<double>(total);
  double acc = 0.0;
  for (std::uint32_t c : hist) {
    if (c > 1) acc += c * std::log2(static_cast<double>(c));
  }
  const double upper = std::log2(n);
  return std::clamp(upper - acc / n, 0.0, upper);
}

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return 0;
  if (static_cast<std::size_t>(i) >= n) return n - 1;
  return static_cast<std::size_t>(i);
}

}  // namespace

double max_block_entropy(int block_size) {
  check_block_size(block_size);
  return std::log2(static_cast<double>(block_size) * block_size);
}

double sample_entropy(std::span<const std::uint8_t> levels) {
  require(!levels.empty(), "entropy of an empty sample is undefined");
  Histogram hist{};
  for (auto v : levels) ++hist[v];
  return histogram_entropy(hist, levels.size());
}

double block_entropy(const GrayImage& img, std::size_t x, std::size_t y, int block_size) {
  check_block_size(block_size);
  require(x < img.width() && y < img.height(), "block centre lies outside the image");
  const auto r = static_cast<std::ptrdiff_t>(block_size / 2);
  const auto cx = static_cast<std::ptrdiff_t>(x);
  const auto cy = static_cast<std::ptrdiff_t>(y);
  Histogram hist{};
  for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
    const std::size_t yy = clamp_index(cy + dy, img.height());
    for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
      ++hist[quantize_byte(img(clamp_index(cx + dx, img.width()), yy))];
    }
  }
  return histogram_entropy(hist, static_cast<std::size_t>(block_size) * block_size);
}

EntropyMap entropy_map(const GrayImage& img, int block_size) {
  check_block_size(block_size);
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const auto r = static_cast<std::ptrdiff_t>(block_size / 2);
  const std::size_t total = static_cast<std::size_t>(block_size) * block_size;
  const auto levels = quantize_bytes(img);
  auto level = [&](std::ptrdiff_t x, std::ptrdiff_t y) {
    return levels[clamp_index(y, h) * w + clamp_index(x, w)];
  };

  EntropyMap map{w, h, block_size, std::vector<double>(w * h)};
  // Sliding histogram along each row: drop the leftmost column, add the new
  // rightmost one.
  for (std::size_t y = 0; y < h; ++y) {
    const auto cy = static_cast<std::ptrdiff_t>(y);
    Histogram hist{};
    for (std::ptrdiff_t dy = -r; dy <= r; ++dy)
      for (std::ptrdiff_t dx = -r; dx <= r; ++dx) ++hist[level(dx, cy + dy)];
    for (std::size_t x = 0; x < w; ++x) {
      const auto cx = static_cast<std::ptrdiff_t>(x);
      if (x > 0) {
        for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
          --hist[level(cx - r - 1, cy + dy)];
          ++hist[level(cx + r, cy + dy)];
        }
      }
      map.raw[y * w + x] = histogram_entropy(hist, total);
    }
  }
  return map;
}

QuantizedEntropyMap quantize_entropy(const EntropyMap& map, EntropyNorm norm) {
  require(!map.raw.empty() && map.raw.size() == map.width * map.height,
          "entropy map does not match its dimensions");
  QuantizedEntropyMap q{map.width, map.height, std::vector<std::uint8_t>(map.raw.size(), 0)};
  if (norm == EntropyNorm::Fixed) {
    q.min_raw = 0.0;
    q.max_raw = max_block_entropy(map.block_size);
  } else {
    const auto [lo, hi] = std::minmax_element(map.raw.begin(), map.raw.end());
    q.min_raw = *lo;
    q.max_raw = *hi;
  }
  const double range = q.max_raw - q.min_raw;
  if (range <= 0.0) return q;
  for (std::size_t i = 0; i < map.raw.size(); ++i) {
    const double t = std::clamp((map.raw[i] - q.min_raw) / range, 0.0, 1.0);
    q.levels[i] = static_cast<std::uint8_t>(std::floor(255.0 * t + 0.5));
  }
  return q;
}

}  // namespace ctsep
