#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctsep/entropy.hpp"
#include "ctsep/image.hpp"
#include "ctsep/tv_solver.hpp"

namespace ctsep {

/// Ladder lambdas are quoted for intensities on [0, intensity_scale]; images
/// live on [0, 1], so a ladder entry lambda is solved as ROF(f, lambda *
/// intensity_scale). The default reads them on the 8-bit scale.
inline constexpr double kByteIntensityScale = 255.0;

/// {start + i * step : i < count}, largest first.
std::vector<double> lambda_ladder(double start, double step, std::size_t count);

/// Scale 0 is the input itself; scale i >= 1 is the ROF solution at lambdas[i - 1], with
/// lambdas strictly decreasing so that higher scales are smoother.
struct ScaleLadder {
  std::vector<double> lambdas;
  double intensity_scale = kByteIntensityScale;
  std::vector<GrayImage> images;
  std::vector<SolveReport> reports;  // one per ROF scale

  std::size_t n_scales() const noexcept { return lambdas.size(); }
  std::size_t width() const noexcept { return images.front().width(); }
  std::size_t height() const noexcept { return images.front().height(); }
};

/// Solves every scale independently from f and snaps each result to the
/// intensity lattice. Solves may run on several threads; each one is
/// single-threaded so the result does not depend on scheduling.
ScaleLadder build_ladder(const GrayImage& f, std::span<const double> lambdas,
                         const SolverConfig& config,
                         double intensity_scale = kByteIntensityScale);

/// min(n, floor(level * (n + 1) / 256)): equal-width bins, 0 -> 0, 255 -> n.
/// Level 255 always maps to n, also when n >= 256.
std::size_t bin_assign(std::uint8_t level, std::size_t n_scales) noexcept;

struct Decomposition {
  GrayImage cartoon;
  GrayImage texture;
  std::vector<std::uint32_t> scale_index;  // row-major, values in [0, n]
};

/// Copies each cartoon pixel from the ladder scale its entropy level selects;
/// texture is the residual f - cartoon. When f lies on the intensity lattice
/// (every loaded image does) cartoon + texture == f holds bitwise.
Decomposition compose_cartoon(const ScaleLadder& ladder, const QuantizedEntropyMap& levels);

/// Everything the end-to-end run produces, for callers that report on it.
struct PipelineResult {
  ScaleLadder ladder;
  EntropyMap entropy;
  QuantizedEntropyMap levels;
  Decomposition decomposition;
};

PipelineResult run_pipeline(const GrayImage& f, std::span<const double> lambdas, int block_size,
                            const SolverConfig& config, EntropyNorm norm = EntropyNorm::MinMax,
                            double intensity_scale = kByteIntensityScale);

/// compose_cartoon(build_ladder(f, ...), quantize_entropy(entropy_map(f, k))).
/// Entropy is always measured on f itself.
Decomposition decompose(const GrayImage& f, std::span<const double> lambdas, int block_size,
                        const SolverConfig& config, EntropyNorm norm = EntropyNorm::MinMax,
                        double intensity_scale = kByteIntensityScale);

}  // namespace ctsep
