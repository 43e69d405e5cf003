#include "ctsep/decomposer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <thread>

#include "ctsep/error.hpp"

namespace ctsep {

std::vector<double> lambda_ladder(double start, double step, std::size_t count) {
  require(std::isfinite(start) && start > 0.0, "lambda start must be positive");
  require(std::isfinite(step) && step >= 0.0, "lambda step must be non-negative");
  require(count >= 1, "lambda count must be at least 1");
  require(step > 0.0 || count == 1, "lambda step 0 with count > 1 yields duplicate scales");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[count - 1 - i] = start + static_cast<double>(i) * step;
  }
  return out;
}

ScaleLadder build_ladder(const GrayImage& f, std::span<const double> lambdas,
                         const SolverConfig& config, double intensity_scale) {
  config.validate();
  require(std::isfinite(intensity_scale) && intensity_scale > 0.0,
          "intensity scale must be positive");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(std::isfinite(lambdas[i]) && lambdas[i] > 0.0, "ladder lambdas must be positive");
    if (i > 0)
      require(lambdas[i] < lambdas[i - 1], "ladder lambdas must be strictly decreasing");
  }

  const std::size_t n = lambdas.size();
  std::vector<std::optional<RofResult>> solved(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        solved[i].emplace(rof_solve(f, lambdas[i] * intensity_scale, config));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      fail(e.kind(), "scale " + std::to_string(i + 1) + " (lambda " +
                         std::to_string(lambdas[i]) + "): " + e.what());
    }
  }

  ScaleLadder ladder;
  ladder.lambdas.assign(lambdas.begin(), lambdas.end());
  ladder.intensity_scale = intensity_scale;
  ladder.images.reserve(n + 1);
  ladder.images.push_back(f);
  for (auto& s : solved) {
    snap_to_lattice(s->image);
    ladder.images.push_back(std::move(s->image));
    ladder.reports.push_back(std::move(s->report));
  }
  return ladder;
}

std::size_t bin_assign(std::uint8_t level, std::size_t n_scales) noexcept {
  // The top level is pinned explicitly: for n >= 256 the bin formula alone
  // would stop short of n.
  if (level == 255) return n_scales;
  return std::min(n_scales, static_cast<std::size_t>(level) * (n_scales + 1) / 256);
}

Decomposition compose_cartoon(const ScaleLadder& ladder, const QuantizedEntropyMap& levels) {
  require(!ladder.images.empty(), "ladder has no images");
  require(levels.width == ladder.width() && levels.height == ladder.height() &&
              levels.levels.size() == levels.width * levels.height,
          "entropy map dimensions do not match the ladder");
  const GrayImage& f = ladder.images.front();
  const std::size_t n = ladder.n_scales();

  Decomposition out{f, GrayImage(f.width(), f.height()),
                    std::vector<std::uint32_t>(f.size(), 0)};
  auto cartoon = out.cartoon.data();
  auto texture = out.texture.data();
  const auto source = f.data();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t s = bin_assign(levels.levels[i], n);
    out.scale_index[i] = static_cast<std::uint32_t>(s);
    cartoon[i] = ladder.images[s].data()[i];
    texture[i] = source[i] - cartoon[i];
  }
  return out;
}

PipelineResult run_pipeline(const GrayImage& f, std::span<const double> lambdas, int block_size,
                            const SolverConfig& config, EntropyNorm norm,
                            double intensity_scale) {
  EntropyMap entropy = entropy_map(f, block_size);
  QuantizedEntropyMap levels = quantize_entropy(entropy, norm);
  ScaleLadder ladder = build_ladder(f, lambdas, config, intensity_scale);
  Decomposition parts = compose_cartoon(ladder, levels);
  return {std::move(ladder), std::move(entropy), std::move(levels), std::move(parts)};
}

Decomposition decompose(const GrayImage& f, std::span<const double> lambdas, int block_size,
                        const SolverConfig& config, EntropyNorm norm, double intensity_scale) {
  return run_pipeline(f, lambdas, block_size, config, norm, intensity_scale).decomposition;
}

}  // namespace ctsep
