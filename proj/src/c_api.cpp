#include "ctsep/ctsep.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "ctsep/decomposer.hpp"
#include "ctsep/entropy.hpp"
#include "ctsep/error.hpp"
#include "ctsep/image.hpp"
#include "ctsep/tv_solver.hpp"

struct ctsep_image {
  ctsep::GrayImage image;
};

struct ctsep_rgb_image {
  ctsep::RgbImage image;
};

struct ctsep_rof_result {
  ctsep_image image;
  ctsep::SolveReport report;
};

struct ctsep_entropy {
  ctsep::EntropyMap map;
  ctsep::QuantizedEntropyMap levels;
};

struct ctsep_decomposition {
  std::vector<double> lambdas;
  std::vector<ctsep::SolveReport> reports;
  std::vector<ctsep_image> ladder;
  ctsep_image cartoon;
  ctsep_image texture;
  std::vector<std::uint32_t> scale_index;
  ctsep_entropy entropy;
};

namespace {

thread_local std::string last_error;

ctsep_status status_of(ctsep::ErrorKind kind) {
  switch (kind) {
    case ctsep::ErrorKind::InvalidArgument:
      return CTSEP_ERR_INVALID_ARGUMENT;
    case ctsep::ErrorKind::Io:
      return CTSEP_ERR_IO;
    case ctsep::ErrorKind::Format:
      return CTSEP_ERR_FORMAT;
    case ctsep::ErrorKind::Solver:
      return CTSEP_ERR_SOLVER;
  }
  return CTSEP_ERR_INTERNAL;
}

template <class Body>
ctsep_status guarded(Body&& body) noexcept {
  last_error.clear();
  try {
    body();
    return CTSEP_OK;
  } catch (const ctsep::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return CTSEP_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (p == nullptr) ctsep::fail(ctsep::ErrorKind::InvalidArgument, std::string(what) + " is null");
}

ctsep::SolverConfig to_cpp(const ctsep_solver_config& c) {
  ctsep::SolverConfig out;
  out.epsilon = c.epsilon;
  out.step_size = c.step_size;
  out.tolerance = c.tolerance;
  out.max_iterations = c.max_iterations;
  switch (c.method) {
    case CTSEP_METHOD_DESCENT:
      out.method = ctsep::SolverMethod::ExplicitDescent;
      break;
    case CTSEP_METHOD_DUAL:
      out.method = ctsep::SolverMethod::DualProjection;
      break;
    default:
      ctsep::fail(ctsep::ErrorKind::InvalidArgument, "unknown solver method");
  }
  return out;
}

ctsep::EntropyNorm to_cpp(ctsep_entropy_norm norm) {
  switch (norm) {
    case CTSEP_NORM_MINMAX:
      return ctsep::EntropyNorm::MinMax;
    case CTSEP_NORM_FIXED:
      return ctsep::EntropyNorm::Fixed;
  }
  ctsep::fail(ctsep::ErrorKind::InvalidArgument, "unknown entropy normalization");
}

const ctsep::SolveReport* scale_report(const ctsep_decomposition* d, size_t scale) {
  if (d == nullptr || scale == 0 || scale > d->reports.size()) return nullptr;
  return &d->reports[scale - 1];
}

}  // namespace

extern "C" {

const char* ctsep_last_error(void) { return last_error.c_str(); }

const char* ctsep_status_string(ctsep_status status) {
  switch (status) {
    case CTSEP_OK:
      return "ok";
    case CTSEP_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case CTSEP_ERR_IO:
      return "i/o error";
    case CTSEP_ERR_FORMAT:
      return "unsupported or corrupt format";
    case CTSEP_ERR_SOLVER:
      return "solver failure";
    case CTSEP_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

ctsep_solver_config ctsep_solver_config_default(ctsep_method method) {
  const auto c = method == CTSEP_METHOD_DUAL ? ctsep::SolverConfig::dual_defaults()
                                              : ctsep::SolverConfig::descent_defaults();
  return ctsep_solver_config{c.epsilon, c.step_size, c.tolerance, c.max_iterations,
                             method == CTSEP_METHOD_DUAL ? CTSEP_METHOD_DUAL
                                                         : CTSEP_METHOD_DESCENT};
}

// ---- grayscale images

ctsep_status ctsep_image_create(size_t width, size_t height, const double* data,
                                ctsep_image** out) {
  return guarded([&] {
    need(out, "output handle");
    need(data, "image data");
    std::vector<double> copy(data, data + width * height);
    *out = new ctsep_image{ctsep::GrayImage(width, height, std::move(copy))};
  });
}

ctsep_status ctsep_image_load(const char* path, ctsep_image** out) {
  return guarded([&] {
    need(out, "output handle");
    need(path, "path");
    *out = new ctsep_image{ctsep::load_image(path)};
  });
}

ctsep_status ctsep_image_save(const ctsep_image* image, const char* path) {
  return guarded([&] {
    need(image, "image");
    need(path, "path");
    ctsep::save_image(image->image, path);
  });
}

ctsep_status ctsep_image_clone(const ctsep_image* image, ctsep_image** out) {
  return guarded([&] {
    need(image, "image");
    need(out, "output handle");
    *out = new ctsep_image{image->image};
  });
}

void ctsep_image_free(ctsep_image* image) { delete image; }

size_t ctsep_image_width(const ctsep_image* image) { return image ? image->image.width() : 0; }
size_t ctsep_image_height(const ctsep_image* image) { return image ? image->image.height() : 0; }
const double* ctsep_image_data(const ctsep_image* image) {
  return image ? image->image.data().data() : nullptr;
}

ctsep_status ctsep_image_save_signed16(const ctsep_image* image, const char* pgm_path,
                                       const char* sidecar_path) {
  return guarded([&] {
    need(image, "image");
    need(pgm_path, "pgm path");
    need(sidecar_path, "sidecar path");
    ctsep::save_signed_pgm16(image->image.data(), image->image.width(), image->image.height(),
                             pgm_path, sidecar_path);
  });
}

ctsep_status ctsep_levels_save_pgm(size_t width, size_t height, const uint8_t* levels,
                                   const char* path) {
  return guarded([&] {
    need(levels, "levels");
    need(path, "path");
    ctsep::save_levels_pgm(width, height, {levels, width * height}, path);
  });
}

// ---- colour

ctsep_status ctsep_jet_colormap(size_t width, size_t height, const uint8_t* levels,
                                ctsep_rgb_image** out) {
  return guarded([&] {
    need(levels, "levels");
    need(out, "output handle");
    *out = new ctsep_rgb_image{ctsep::jet_colormap(width, height, {levels, width * height})};
  });
}

ctsep_status ctsep_rgb_image_save(const ctsep_rgb_image* image, const char* path) {
  return guarded([&] {
    need(image, "image");
    need(path, "path");
    ctsep::save_image(image->image, path);
  });
}

const uint8_t* ctsep_rgb_image_data(const ctsep_rgb_image* image) {
  return image ? image->image.data().data() : nullptr;
}

void ctsep_rgb_image_free(ctsep_rgb_image* image) { delete image; }

// ---- ROF

ctsep_status ctsep_tv_energy(const ctsep_image* u, const ctsep_image* f, double lambda,
                             double epsilon, double* out) {
  return guarded([&] {
    need(u, "u");
    need(f, "f");
    need(out, "output");
    *out = ctsep::tv_energy(u->image, f->image, lambda, epsilon);
  });
}

ctsep_status ctsep_rof(const ctsep_image* f, double lambda, const ctsep_solver_config* config,
                       ctsep_rof_result** out) {
  return guarded([&] {
    need(f, "f");
    need(config, "config");
    need(out, "output handle");
    auto result = ctsep::rof_solve(f->image, lambda, to_cpp(*config));
    *out = new ctsep_rof_result{{std::move(result.image)}, std::move(result.report)};
  });
}

const ctsep_image* ctsep_rof_image(const ctsep_rof_result* r) { return r ? &r->image : nullptr; }
int64_t ctsep_rof_iterations(const ctsep_rof_result* r) {
  return r ? r->report.iterations_used : 0;
}
double ctsep_rof_final_energy(const ctsep_rof_result* r) {
  return r ? r->report.final_energy : std::numeric_limits<double>::quiet_NaN();
}
int ctsep_rof_converged(const ctsep_rof_result* r) { return r && r->report.converged ? 1 : 0; }
size_t ctsep_rof_trace_length(const ctsep_rof_result* r) {
  return r ? r->report.energy_trace.size() : 0;
}
const double* ctsep_rof_trace(const ctsep_rof_result* r) {
  return r ? r->report.energy_trace.data() : nullptr;
}
void ctsep_rof_free(ctsep_rof_result* r) { delete r; }

// ---- entropy

ctsep_status ctsep_entropy_compute(const ctsep_image* image, int block_size,
                                   ctsep_entropy_norm norm, ctsep_entropy** out) {
  return guarded([&] {
    need(image, "image");
    need(out, "output handle");
    const auto n = to_cpp(norm);
    auto map = ctsep::entropy_map(image->image, block_size);
    auto levels = ctsep::quantize_entropy(map, n);
    *out = new ctsep_entropy{std::move(map), std::move(levels)};
  });
}

size_t ctsep_entropy_width(const ctsep_entropy* m) { return m ? m->map.width : 0; }
size_t ctsep_entropy_height(const ctsep_entropy* m) { return m ? m->map.height : 0; }
const double* ctsep_entropy_raw(const ctsep_entropy* m) { return m ? m->map.raw.data() : nullptr; }
const uint8_t* ctsep_entropy_levels(const ctsep_entropy* m) {
  return m ? m->levels.levels.data() : nullptr;
}
double ctsep_entropy_min_raw(const ctsep_entropy* m) {
  return m ? m->levels.min_raw : std::numeric_limits<double>::quiet_NaN();
}
double ctsep_entropy_max_raw(const ctsep_entropy* m) {
  return m ? m->levels.max_raw : std::numeric_limits<double>::quiet_NaN();
}
void ctsep_entropy_free(ctsep_entropy* m) { delete m; }

// ---- decomposition

ctsep_status ctsep_lambda_ladder(double start, double step, size_t count, double* out) {
  return guarded([&] {
    need(out, "output buffer");
    const auto values = ctsep::lambda_ladder(start, step, count);
    std::copy(values.begin(), values.end(), out);
  });
}

size_t ctsep_bin_assign(uint8_t level, size_t n_scales) {
  return ctsep::bin_assign(level, n_scales);
}

ctsep_status ctsep_decompose(const ctsep_image* f, const double* lambdas, size_t n_lambdas,
                             int block_size, ctsep_entropy_norm norm,
                             const ctsep_solver_config* config, double intensity_scale,
                             ctsep_decomposition** out) {
  return guarded([&] {
    need(f, "f");
    need(config, "config");
    need(out, "output handle");
    if (n_lambdas > 0) need(lambdas, "lambdas");
    auto run = ctsep::run_pipeline(f->image, {lambdas, n_lambdas}, block_size, to_cpp(*config),
                                   to_cpp(norm), intensity_scale);

    auto d = std::make_unique<ctsep_decomposition>(ctsep_decomposition{
        std::move(run.ladder.lambdas),
        std::move(run.ladder.reports),
        {},
        {std::move(run.decomposition.cartoon)},
        {std::move(run.decomposition.texture)},
        std::move(run.decomposition.scale_index),
        {std::move(run.entropy), std::move(run.levels)},
    });
    d->ladder.reserve(run.ladder.images.size());
    for (auto& img : run.ladder.images) d->ladder.push_back({std::move(img)});
    *out = d.release();
  });
}

const ctsep_image* ctsep_decomposition_cartoon(const ctsep_decomposition* d) {
  return d ? &d->cartoon : nullptr;
}
const ctsep_image* ctsep_decomposition_texture(const ctsep_decomposition* d) {
  return d ? &d->texture : nullptr;
}
const uint32_t* ctsep_decomposition_scale_index(const ctsep_decomposition* d) {
  return d ? d->scale_index.data() : nullptr;
}
const ctsep_entropy* ctsep_decomposition_entropy(const ctsep_decomposition* d) {
  return d ? &d->entropy : nullptr;
}
size_t ctsep_decomposition_scales(const ctsep_decomposition* d) {
  return d ? d->lambdas.size() : 0;
}
const ctsep_image* ctsep_decomposition_ladder_image(const ctsep_decomposition* d, size_t scale) {
  if (d == nullptr || scale >= d->ladder.size()) return nullptr;
  return &d->ladder[scale];
}
double ctsep_decomposition_lambda(const ctsep_decomposition* d, size_t scale) {
  if (d == nullptr || scale == 0 || scale > d->lambdas.size())
    return std::numeric_limits<double>::quiet_NaN();
  return d->lambdas[scale - 1];
}
int64_t ctsep_decomposition_iterations(const ctsep_decomposition* d, size_t scale) {
  const auto* r = scale_report(d, scale);
  return r ? r->iterations_used : 0;
}
double ctsep_decomposition_energy(const ctsep_decomposition* d, size_t scale) {
  const auto* r = scale_report(d, scale);
  return r ? r->final_energy : std::numeric_limits<double>::quiet_NaN();
}
int ctsep_decomposition_converged(const ctsep_decomposition* d, size_t scale) {
  const auto* r = scale_report(d, scale);
  return r && r->converged ? 1 : 0;
}
void ctsep_decomposition_free(ctsep_decomposition* d) { delete d; }

}  // extern "C"
