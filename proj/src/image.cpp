#include "ctsep/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctsep/error.hpp"

namespace ctsep {

namespace {

void check_dims(std::size_t width, std::size_t height) {
  require(width >= 1 && height >= 1, "image dimensions must be at least 1x1");
}

}  // namespace

GrayImage::GrayImage(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  require(std::isfinite(fill), "image intensities must be finite");
  data_.assign(width * height, fill);
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  require(data_.size() == width * height,
          "image data length " + std::to_string(data_.size()) +
              " does not match " + std::to_string(width) + "x" + std::to_string(height));
  require(std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); }),
          "image intensities must be finite");
}

RgbImage::RgbImage(std::size_t width, std::size_t height)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(3 * width * height, 0);
}

RgbImage::RgbImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  require(data_.size() == 3 * width * height, "RGB data length does not match dimensions");
}

GrayImage to_grayscale(std::size_t width, std::size_t height, std::span<const double> r,
                       std::span<const double> g, std::span<const double> b) {
  check_dims(width, height);
  const std::size_t n = width * height;
  require(r.size() == n && g.size() == n && b.size() == n,
          "channel lengths do not match image dimensions");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = g[i] + 0.299 * (r[i] - g[i]) + 0.114 * (b[i] - g[i]);
  }
  return GrayImage(width, height, std::move(out));
}

double snap_to_lattice(double v) noexcept {
  return std::nearbyint(v / kIntensityQuantum) * kIntensityQuantum;
}

void snap_to_lattice(GrayImage& img) noexcept {
  for (double& v : img.data()) v = snap_to_lattice(v);
}

std::uint8_t quantize_byte(double intensity) noexcept {
  const double c = std::clamp(intensity, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(255.0 * c + 0.5));
}

std::vector<std::uint8_t> quantize_bytes(const GrayImage& img) {
  std::vector<std::uint8_t> out(img.size());
  std::transform(img.data().begin(), img.data().end(), out.begin(), quantize_byte);
  return out;
}

RgbImage jet_colormap(std::size_t width, std::size_t height,
                      std::span<const std::uint8_t> levels) {
  RgbImage out(width, height);
  require(levels.size() == width * height, "level map does not match image dimensions");
  auto ramp = [](double t, double center) {
    const double c = std::clamp(1.5 - std::abs(4.0 * t - center), 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * c));
  };
  auto rgb = out.data();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double t = levels[i] / 255.0;
    rgb[3 * i + 0] = ramp(t, 3.0);
    rgb[3 * i + 1] = ramp(t, 2.0);
    rgb[3 * i + 2] = ramp(t, 1.0);
  }
  return out;
}

}  // namespace ctsep
