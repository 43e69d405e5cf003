/* Exercises the C interface from plain C: handle lifetimes, status codes and
 * the per-thread error message. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "ctsep/ctsep.h"

static int failures = 0;

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: CHECK failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_images(const char* dir) {
  const double px[6] = {0.0, 0.25, 0.5, 0.75, 1.0, 0.125};
  ctsep_image* img = NULL;
  CHECK(ctsep_image_create(3, 2, px, &img) == CTSEP_OK);
  CHECK(ctsep_image_width(img) == 3);
  CHECK(ctsep_image_height(img) == 2);
  CHECK(ctsep_image_data(img)[3] == 0.75);

  ctsep_image* copy = NULL;
  CHECK(ctsep_image_clone(img, &copy) == CTSEP_OK);
  CHECK(memcmp(ctsep_image_data(copy), px, sizeof px) == 0);
  ctsep_image_free(copy);

  char path[512];
  snprintf(path, sizeof path, "%s/c_api.png", dir);
  CHECK(ctsep_image_save(img, path) == CTSEP_OK);
  ctsep_image* back = NULL;
  CHECK(ctsep_image_load(path, &back) == CTSEP_OK);
  for (int i = 0; i < 6; ++i) CHECK(fabs(ctsep_image_data(back)[i] - px[i]) <= 1.0 / 255.0);
  ctsep_image_free(back);

  char pgm[512], side[512];
  snprintf(pgm, sizeof pgm, "%s/c_api_signed.pgm", dir);
  snprintf(side, sizeof side, "%s/c_api_signed.txt", dir);
  CHECK(ctsep_image_save_signed16(img, pgm, side) == CTSEP_OK);

  const uint8_t levels[6] = {0, 50, 100, 150, 200, 255};
  snprintf(path, sizeof path, "%s/c_api_levels.pgm", dir);
  CHECK(ctsep_levels_save_pgm(3, 2, levels, path) == CTSEP_OK);

  ctsep_rgb_image* jet = NULL;
  CHECK(ctsep_jet_colormap(3, 2, levels, &jet) == CTSEP_OK);
  CHECK(ctsep_rgb_image_data(jet)[2] == 128);
  snprintf(path, sizeof path, "%s/c_api_jet.png", dir);
  CHECK(ctsep_rgb_image_save(jet, path) == CTSEP_OK);
  ctsep_rgb_image_free(jet);
  ctsep_image_free(img);
}

static void test_errors(const char* dir) {
  ctsep_image* img = NULL;
  const double bad[1] = {NAN};
  CHECK(ctsep_image_create(1, 1, bad, &img) == CTSEP_ERR_INVALID_ARGUMENT);
  CHECK(img == NULL);
  CHECK(strlen(ctsep_last_error()) > 0);
  CHECK(ctsep_image_create(0, 1, NULL, &img) == CTSEP_ERR_INVALID_ARGUMENT);
  CHECK(ctsep_image_create(2, 2, NULL, NULL) == CTSEP_ERR_INVALID_ARGUMENT);

  char path[512];
  snprintf(path, sizeof path, "%s/does_not_exist.pgm", dir);
  CHECK(ctsep_image_load(path, &img) == CTSEP_ERR_IO);
  snprintf(path, sizeof path, "%s/garbage.pgm", dir);
  FILE* fp = fopen(path, "wb");
  fputs("P5\n3", fp);
  fclose(fp);
  CHECK(ctsep_image_load(path, &img) == CTSEP_ERR_FORMAT);
  CHECK(strstr(ctsep_last_error(), "unsupported or corrupt format") != NULL);
  CHECK(ctsep_image_load(NULL, &img) == CTSEP_ERR_INVALID_ARGUMENT);

  CHECK(strcmp(ctsep_status_string(CTSEP_OK), ctsep_status_string(CTSEP_ERR_IO)) != 0);
  CHECK(ctsep_image_width(NULL) == 0);
  CHECK(ctsep_image_data(NULL) == NULL);
  ctsep_image_free(NULL);
  ctsep_rof_free(NULL);
  ctsep_entropy_free(NULL);
  ctsep_decomposition_free(NULL);

  double ladder[3];
  CHECK(ctsep_lambda_ladder(0.005, 0.0, 3, ladder) == CTSEP_ERR_INVALID_ARGUMENT);
  CHECK(ctsep_lambda_ladder(0.005, 0.002, 3, NULL) == CTSEP_ERR_INVALID_ARGUMENT);
}

static void test_rof(void) {
  const double px[4] = {0.1, 0.9, 0.4, 0.6};
  ctsep_image* f = NULL;
  CHECK(ctsep_image_create(2, 2, px, &f) == CTSEP_OK);

  double e = -1.0;
  CHECK(ctsep_tv_energy(f, f, 1.0, 0.0, &e) == CTSEP_OK);
  CHECK(e > 0.0);

  ctsep_solver_config dual = ctsep_solver_config_default(CTSEP_METHOD_DUAL);
  CHECK(dual.step_size == 0.125);
  CHECK(dual.max_iterations == 5000);
  ctsep_solver_config descent = ctsep_solver_config_default(CTSEP_METHOD_DESCENT);
  CHECK(descent.epsilon == 1e-3);
  CHECK(descent.max_iterations == 50000);

  ctsep_rof_result* r = NULL;
  CHECK(ctsep_rof(f, 2.0, &dual, &r) == CTSEP_OK);
  CHECK(ctsep_rof_iterations(r) >= 1);
  CHECK(ctsep_rof_trace_length(r) == (size_t)ctsep_rof_iterations(r));
  CHECK(ctsep_rof_trace(r)[ctsep_rof_trace_length(r) - 1] == ctsep_rof_final_energy(r));
  CHECK(ctsep_rof_converged(r) == 1);
  CHECK(ctsep_image_width(ctsep_rof_image(r)) == 2);
  ctsep_rof_free(r);

  dual.step_size = 0.5;
  r = NULL;
  CHECK(ctsep_rof(f, 2.0, &dual, &r) == CTSEP_ERR_INVALID_ARGUMENT);
  CHECK(r == NULL);
  CHECK(ctsep_rof(f, -1.0, &descent, &r) == CTSEP_ERR_INVALID_ARGUMENT);
  ctsep_image_free(f);
}

static void test_entropy_and_decompose(void) {
  double px[16 * 16];
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) px[y * 16 + x] = x < 8 ? 0.5 : ((x + y) % 2 ? 0.25 : 0.75);
  ctsep_image* f = NULL;
  CHECK(ctsep_image_create(16, 16, px, &f) == CTSEP_OK);

  ctsep_entropy* m = NULL;
  CHECK(ctsep_entropy_compute(f, 3, CTSEP_NORM_MINMAX, &m) == CTSEP_OK);
  CHECK(ctsep_entropy_width(m) == 16);
  CHECK(ctsep_entropy_raw(m)[0] == 0.0);
  CHECK(ctsep_entropy_min_raw(m) == 0.0);
  CHECK(ctsep_entropy_max_raw(m) > 0.9);
  ctsep_entropy_free(m);
  CHECK(ctsep_entropy_compute(f, 4, CTSEP_NORM_MINMAX, &m) == CTSEP_ERR_INVALID_ARGUMENT);

  double lambdas[3];
  CHECK(ctsep_lambda_ladder(0.005, 0.02, 3, lambdas) == CTSEP_OK);
  CHECK(lambdas[2] == 0.005);
  CHECK(ctsep_bin_assign(128, 5) == 3);

  ctsep_solver_config cfg = ctsep_solver_config_default(CTSEP_METHOD_DUAL);
  ctsep_decomposition* d = NULL;
  CHECK(ctsep_decompose(f, lambdas, 3, 3, CTSEP_NORM_MINMAX, &cfg, CTSEP_BYTE_INTENSITY_SCALE,
                        &d) == CTSEP_OK);
  CHECK(ctsep_decomposition_scales(d) == 3);
  const double* u = ctsep_image_data(ctsep_decomposition_cartoon(d));
  const double* v = ctsep_image_data(ctsep_decomposition_texture(d));
  const uint32_t* s = ctsep_decomposition_scale_index(d);
  for (int i = 0; i < 256; ++i) {
    CHECK(u[i] + v[i] == ctsep_image_data(f)[i]);
    CHECK(s[i] <= 3);
    CHECK(u[i] == ctsep_image_data(ctsep_decomposition_ladder_image(d, s[i]))[i]);
  }
  CHECK(ctsep_decomposition_ladder_image(d, 4) == NULL);
  CHECK(ctsep_decomposition_lambda(d, 1) == lambdas[0]);
  CHECK(ctsep_decomposition_iterations(d, 3) >= 1);
  CHECK(ctsep_decomposition_converged(d, 2) == 1);
  CHECK(ctsep_decomposition_energy(d, 1) > 0.0);
  CHECK(ctsep_entropy_width(ctsep_decomposition_entropy(d)) == 16);
  ctsep_decomposition_free(d);

  const double increasing[2] = {0.01, 0.02};
  d = NULL;
  CHECK(ctsep_decompose(f, increasing, 2, 9, CTSEP_NORM_MINMAX, &cfg, 255.0, &d) ==
        CTSEP_ERR_INVALID_ARGUMENT);
  CHECK(d == NULL);
  ctsep_image_free(f);
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  test_images(dir);
  test_errors(dir);
  test_rof();
  test_entropy_and_decompose();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
