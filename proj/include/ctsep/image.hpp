#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ctsep {

/// Row-major grid of real intensities, nominally in [0, 1].
///
/// Construction validates the shape (both dimensions >= 1, data size equal to
/// width * height) and rejects non-finite samples. Pixel access is unchecked.
class GrayImage {
 public:
  GrayImage(std::size_t width, std::size_t height, double fill = 0.0);
  GrayImage(std::size_t width, std::size_t height, std::vector<double> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t x, std::size_t y) const noexcept {
    return data_[y * width_ + x];
  }
  double& operator()(std::size_t x, std::size_t y) noexcept {
    return data_[y * width_ + x];
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool same_shape(const GrayImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> data_;
};

/// Interleaved 8-bit RGB triples, row-major.
class RgbImage {
 public:
  RgbImage(std::size_t width, std::size_t height);
  RgbImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> data_;
};

/// Spacing of the intensity lattice. Loaded images and ladder images are
/// rounded to multiples of this, which makes f - u exactly representable for
/// any two lattice values of magnitude below 2, so the decomposition identity
/// u + (f - u) == f holds bitwise.
inline constexpr double kIntensityQuantum = 0x1p-52;

/// Nearest lattice value (ties to even). Values of magnitude >= 2 are
/// returned unchanged.
double snap_to_lattice(double v) noexcept;
void snap_to_lattice(GrayImage& img) noexcept;

/// Rec. 601 luma on [0, 1] channels: 0.299 r + 0.587 g + 0.114 b, evaluated
/// as g + 0.299 (r - g) + 0.114 (b - g) so that gray triples map to themselves
/// exactly.
GrayImage to_grayscale(std::size_t width, std::size_t height,
                       std::span<const double> r, std::span<const double> g,
                       std::span<const double> b);

/// Clamp to [0, 1], scale by 255 and round half up.
std::uint8_t quantize_byte(double intensity) noexcept;

/// Per-pixel quantize_byte over a whole image.
std::vector<std::uint8_t> quantize_bytes(const GrayImage& img);

/// Classic jet ramp evaluated in closed form, one RGB triple per input byte.
RgbImage jet_colormap(std::size_t width, std::size_t height,
                      std::span<const std::uint8_t> levels);

/// Loads a PGM (P2/P5, maxval 255 or 65535) or an 8-bit gray/RGB PNG.
/// The format is chosen by magic bytes, not by extension. Samples are divided
/// by maxval and snapped to the intensity lattice.
GrayImage load_image(const std::filesystem::path& path);

/// Writes a PNG when the extension is ".png", binary PGM (P5) otherwise.
void save_image(const GrayImage& img, const std::filesystem::path& path);
void save_image(const RgbImage& img, const std::filesystem::path& path);

/// Writes 8-bit samples verbatim as a P5 PGM (no rescaling).
void save_levels_pgm(std::size_t width, std::size_t height,
                     std::span<const std::uint8_t> levels,
                     const std::filesystem::path& path);

/// Affine range recorded next to a 16-bit signed-field export.
struct SignedRange {
  double min = 0.0;
  double max = 0.0;
};

/// Writes an unbounded real field as a 16-bit P5 PGM, mapping [min, max] of
/// the data onto [0, 65535], plus a sidecar text file holding min and max.
/// A constant field is written as all zeros with min == max.
SignedRange save_signed_pgm16(std::span<const double> values, std::size_t width,
                              std::size_t height,
                              const std::filesystem::path& pgm_path,
                              const std::filesystem::path& sidecar_path);

}  // namespace ctsep
