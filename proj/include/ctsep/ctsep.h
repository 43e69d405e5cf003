/*
 * ctsep: entropy-guided cartoon/texture separation.
 *
 * C interface over the C++ core. Objects are opaque handles created by
 * ctsep_* constructors and released with the matching *_free function.
 * Every fallible call returns a ctsep_status; on failure the message for the
 * calling thread is available from ctsep_last_error() until the next call.
 * Pointers returned by accessors are borrowed and stay valid for the life of
 * the owning handle.
 */
#ifndef CTSEP_H
#define CTSEP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CTSEP_BUILDING)
#    define CTSEP_API __declspec(dllexport)
#  else
#    define CTSEP_API __declspec(dllimport)
#  endif
#else
#  define CTSEP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctsep_status {
  CTSEP_OK = 0,
  CTSEP_ERR_INVALID_ARGUMENT = 1,
  CTSEP_ERR_IO = 2,
  CTSEP_ERR_FORMAT = 3,
  CTSEP_ERR_SOLVER = 4,
  CTSEP_ERR_INTERNAL = 5
} ctsep_status;

typedef enum ctsep_method {
  CTSEP_METHOD_DESCENT = 0,
  CTSEP_METHOD_DUAL = 1
} ctsep_method;

typedef enum ctsep_entropy_norm {
  CTSEP_NORM_MINMAX = 0,
  CTSEP_NORM_FIXED = 1
} ctsep_entropy_norm;

typedef struct ctsep_solver_config {
  double epsilon;
  double step_size;
  double tolerance;
  int64_t max_iterations;
  ctsep_method method;
} ctsep_solver_config;

typedef struct ctsep_image ctsep_image;
typedef struct ctsep_rgb_image ctsep_rgb_image;
typedef struct ctsep_rof_result ctsep_rof_result;
typedef struct ctsep_entropy ctsep_entropy;
typedef struct ctsep_decomposition ctsep_decomposition;

CTSEP_API const char* ctsep_last_error(void);
CTSEP_API const char* ctsep_status_string(ctsep_status status);

/* Default controls for the given method. */
CTSEP_API ctsep_solver_config ctsep_solver_config_default(ctsep_method method);

/* ---- grayscale images ---- */

CTSEP_API ctsep_status ctsep_image_create(size_t width, size_t height, const double* data,
                                          ctsep_image** out);
CTSEP_API ctsep_status ctsep_image_load(const char* path, ctsep_image** out);
/* PNG when the path ends in .png, binary PGM otherwise. */
CTSEP_API ctsep_status ctsep_image_save(const ctsep_image* image, const char* path);
CTSEP_API ctsep_status ctsep_image_clone(const ctsep_image* image, ctsep_image** out);
CTSEP_API void ctsep_image_free(ctsep_image* image);
CTSEP_API size_t ctsep_image_width(const ctsep_image* image);
CTSEP_API size_t ctsep_image_height(const ctsep_image* image);
CTSEP_API const double* ctsep_image_data(const ctsep_image* image);

/* Writes a signed field as 16-bit PGM plus a "min:/max:" sidecar. */
CTSEP_API ctsep_status ctsep_image_save_signed16(const ctsep_image* image, const char* pgm_path,
                                                 const char* sidecar_path);

/* Writes raw bytes (one per pixel) as an 8-bit P5 PGM. */
CTSEP_API ctsep_status ctsep_levels_save_pgm(size_t width, size_t height, const uint8_t* levels,
                                             const char* path);

/* ---- colour ---- */

CTSEP_API ctsep_status ctsep_jet_colormap(size_t width, size_t height, const uint8_t* levels,
                                          ctsep_rgb_image** out);
CTSEP_API ctsep_status ctsep_rgb_image_save(const ctsep_rgb_image* image, const char* path);
CTSEP_API const uint8_t* ctsep_rgb_image_data(const ctsep_rgb_image* image);
CTSEP_API void ctsep_rgb_image_free(ctsep_rgb_image* image);

/* ---- ROF ---- */

CTSEP_API ctsep_status ctsep_tv_energy(const ctsep_image* u, const ctsep_image* f, double lambda,
                                       double epsilon, double* out);
CTSEP_API ctsep_status ctsep_rof(const ctsep_image* f, double lambda,
                                 const ctsep_solver_config* config, ctsep_rof_result** out);
CTSEP_API const ctsep_image* ctsep_rof_image(const ctsep_rof_result* result);
CTSEP_API int64_t ctsep_rof_iterations(const ctsep_rof_result* result);
CTSEP_API double ctsep_rof_final_energy(const ctsep_rof_result* result);
CTSEP_API int ctsep_rof_converged(const ctsep_rof_result* result);
CTSEP_API size_t ctsep_rof_trace_length(const ctsep_rof_result* result);
CTSEP_API const double* ctsep_rof_trace(const ctsep_rof_result* result);
CTSEP_API void ctsep_rof_free(ctsep_rof_result* result);

/* ---- entropy ---- */

CTSEP_API ctsep_status ctsep_entropy_compute(const ctsep_image* image, int block_size,
                                             ctsep_entropy_norm norm, ctsep_entropy** out);
CTSEP_API size_t ctsep_entropy_width(const ctsep_entropy* map);
CTSEP_API size_t ctsep_entropy_height(const ctsep_entropy* map);
CTSEP_API const double* ctsep_entropy_raw(const ctsep_entropy* map);
CTSEP_API const uint8_t* ctsep_entropy_levels(const ctsep_entropy* map);
CTSEP_API double ctsep_entropy_min_raw(const ctsep_entropy* map);
CTSEP_API double ctsep_entropy_max_raw(const ctsep_entropy* map);
CTSEP_API void ctsep_entropy_free(ctsep_entropy* map);

/* ---- decomposition ---- */

/* Fills out[0..count) with the ladder, largest lambda first. */
CTSEP_API ctsep_status ctsep_lambda_ladder(double start, double step, size_t count, double* out);
CTSEP_API size_t ctsep_bin_assign(uint8_t level, size_t n_scales);

/* Ladder lambdas refer to intensities on [0, intensity_scale] (255 for the
 * 8-bit convention, 1 for the raw [0, 1] image domain). */
#define CTSEP_BYTE_INTENSITY_SCALE 255.0

CTSEP_API ctsep_status ctsep_decompose(const ctsep_image* f, const double* lambdas,
                                       size_t n_lambdas, int block_size, ctsep_entropy_norm norm,
                                       const ctsep_solver_config* config, double intensity_scale,
                                       ctsep_decomposition** out);
CTSEP_API const ctsep_image* ctsep_decomposition_cartoon(const ctsep_decomposition* d);
CTSEP_API const ctsep_image* ctsep_decomposition_texture(const ctsep_decomposition* d);
CTSEP_API const uint32_t* ctsep_decomposition_scale_index(const ctsep_decomposition* d);
CTSEP_API const ctsep_entropy* ctsep_decomposition_entropy(const ctsep_decomposition* d);
CTSEP_API size_t ctsep_decomposition_scales(const ctsep_decomposition* d);
/* Ladder image for scale 0..n (0 is the input). */
CTSEP_API const ctsep_image* ctsep_decomposition_ladder_image(const ctsep_decomposition* d,
                                                              size_t scale);
/* Per-scale solver diagnostics, scale in 1..n. */
CTSEP_API double ctsep_decomposition_lambda(const ctsep_decomposition* d, size_t scale);
CTSEP_API int64_t ctsep_decomposition_iterations(const ctsep_decomposition* d, size_t scale);
CTSEP_API double ctsep_decomposition_energy(const ctsep_decomposition* d, size_t scale);
CTSEP_API int ctsep_decomposition_converged(const ctsep_decomposition* d, size_t scale);
CTSEP_API void ctsep_decomposition_free(ctsep_decomposition* d);

#ifdef __cplusplus
}
#endif

#endif /* CTSEP_H */
