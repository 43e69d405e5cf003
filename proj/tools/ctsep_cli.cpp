// Command-line front end for libctsep. Everything goes through the C API.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctsep/ctsep.h"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitIo = 2,
  kExitSolver = 3,
};

/// Carries an exit code up to main() with a one-line diagnostic.
struct CliFailure {
  int code;
  std::string message;
};

[[noreturn]] void invalid(const std::string& message) { throw CliFailure{kExitValidation, message}; }

void check(ctsep_status status, const std::string& context) {
  if (status == CTSEP_OK) return;
  int code = kExitIo;
  if (status == CTSEP_ERR_INVALID_ARGUMENT) code = kExitValidation;
  if (status == CTSEP_ERR_SOLVER) code = kExitSolver;
  throw CliFailure{code, context + ": " + ctsep_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ImagePtr = std::unique_ptr<ctsep_image, Deleter<ctsep_image, ctsep_image_free>>;
using RgbPtr = std::unique_ptr<ctsep_rgb_image, Deleter<ctsep_rgb_image, ctsep_rgb_image_free>>;
using RofPtr = std::unique_ptr<ctsep_rof_result, Deleter<ctsep_rof_result, ctsep_rof_free>>;
using EntropyPtr = std::unique_ptr<ctsep_entropy, Deleter<ctsep_entropy, ctsep_entropy_free>>;
using DecompPtr =
    std::unique_ptr<ctsep_decomposition, Deleter<ctsep_decomposition, ctsep_decomposition_free>>;

std::string num(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

// ---------------------------------------------------------------- options

void validate_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) invalid("intensity scale must be positive");
}

struct SolverFlags {
  std::string solver = "dual";
  double epsilon = 1e-3;
  std::optional<double> step_size;
  double tolerance = 1e-6;
  std::optional<long long> max_iterations;

  void add_to(CLI::App& app, bool allow_both) {
    std::vector<std::string> choices = {"descent", "dual"};
    if (allow_both) choices.push_back("both");
    app.add_option("--solver", solver, "ROF solver")->check(CLI::IsMember(choices));
    app.add_option("--epsilon", epsilon, "gradient regularizer of the explicit scheme");
    app.add_option("--step-size", step_size,
                   "time step (descent, default 0.25*epsilon) or projection step (dual, "
                   "default 0.125)");
    app.add_option("--tolerance", tolerance, "relative energy change stopping threshold");
    app.add_option("--max-iterations", max_iterations,
                   "iteration cap (default 50000 descent, 5000 dual)");
  }

  ctsep_solver_config config_for(ctsep_method method) const {
    ctsep_solver_config c = ctsep_solver_config_default(method);
    c.epsilon = epsilon;
    c.tolerance = tolerance;
    if (method == CTSEP_METHOD_DESCENT) c.step_size = 0.25 * epsilon;
    if (step_size) c.step_size = *step_size;
    if (max_iterations) c.max_iterations = *max_iterations;
    return c;
  }

  std::vector<ctsep_method> methods() const {
    if (solver == "descent") return {CTSEP_METHOD_DESCENT};
    if (solver == "dual") return {CTSEP_METHOD_DUAL};
    return {CTSEP_METHOD_DESCENT, CTSEP_METHOD_DUAL};
  }

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) invalid("epsilon must be positive");
    if (step_size && (!(*step_size > 0.0) || !std::isfinite(*step_size)))
      invalid("step size must be positive");
    if (!(tolerance > 0.0) || !std::isfinite(tolerance)) invalid("tolerance must be positive");
    if (max_iterations && *max_iterations < 1) invalid("max iterations must be at least 1");
    if (step_size && solver != "descent" && *step_size > 0.125)
      invalid("dual projection step must not exceed 0.125");
  }
};

struct EntropyFlags {
  int block_size = 9;
  std::string norm = "minmax";

  void add_to(CLI::App& app) {
    app.add_option("--block-size", block_size, "odd side length k of the entropy block");
    app.add_option("--entropy-norm", norm, "entropy normalization onto 0..255")
        ->check(CLI::IsMember({"minmax", "fixed"}));
  }

  ctsep_entropy_norm value() const { return norm == "fixed" ? CTSEP_NORM_FIXED : CTSEP_NORM_MINMAX; }

  void validate() const {
    if (block_size % 2 == 0) invalid("block size must be odd");
    if (block_size < 3) invalid("block size must be at least 3");
  }
};

struct RunConfig {
  std::string input_path;
  std::string output_dir = ".";
  double lambda_start = 0.005;
  double lambda_step = 0.002;
  long long scales = 5;
  EntropyFlags entropy;
  SolverFlags solver;
  double intensity_scale = CTSEP_BYTE_INTENSITY_SCALE;
  bool emit_entropy_png = false;
  bool emit_scale_map = false;

  void validate() const {
    entropy.validate();
    solver.validate();
    if (solver.solver == "both") invalid("--solver both is only available for rof");
    if (scales < 0) invalid("scales must be non-negative");
    if (!(lambda_start > 0.0) || !std::isfinite(lambda_start))
      invalid("lambda start must be positive");
    if (!(lambda_step >= 0.0) || !std::isfinite(lambda_step))
      invalid("lambda step must be non-negative");
    if (scales > 1 && lambda_step == 0.0)
      invalid("lambda step must be positive when more than one scale is requested");
    validate_scale(intensity_scale);
  }
};

void add_intensity_scale(CLI::App& app, double& scale) {
  app.add_option("--intensity-scale", scale,
                 "lambda values refer to intensities on [0, scale]; 255 = 8-bit units, 1 = raw");
}

/// INI reader for the top-level --config option. Keys outside any section are
/// routed to the subcommand named on the command line, so one flat file
/// serves every subcommand.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  explicit SubcommandConfig(const CLI::App& app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    const auto chosen = app_.get_subcommands();
    if (chosen.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty() || item.parents.front() == "default")
        item.parents.assign(1, chosen.front()->get_name());
    }
    return items;
  }

 private:
  const CLI::App& app_;
};

void add_common(CLI::App& app, std::string& input, std::string& output_dir) {
  app.add_option("--input", input, "input image (PGM or PNG)")->required();
  app.add_option("--output-dir", output_dir, "directory for results (created if missing)");
}

// ---------------------------------------------------------------- helpers

ImagePtr load(const std::string& path) {
  ctsep_image* raw = nullptr;
  check(ctsep_image_load(path.c_str(), &raw), "cannot load " + path);
  return ImagePtr(raw);
}

void prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliFailure{kExitIo, "cannot create output directory " + dir + ": " + ec.message()};
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
  if (!out) throw CliFailure{kExitIo, "cannot write " + path};
}

void save_jet(const ctsep_entropy* map, const std::string& path) {
  ctsep_rgb_image* rgb = nullptr;
  check(ctsep_jet_colormap(ctsep_entropy_width(map), ctsep_entropy_height(map),
                           ctsep_entropy_levels(map), &rgb),
        "jet colormap");
  RgbPtr owned(rgb);
  check(ctsep_rgb_image_save(rgb, path.c_str()), "write " + path);
}

ImagePtr centred_texture(const ctsep_image* texture) {
  const size_t w = ctsep_image_width(texture);
  const size_t h = ctsep_image_height(texture);
  const double* v = ctsep_image_data(texture);
  std::vector<double> shifted(v, v + w * h);
  for (double& s : shifted) s = std::min(1.0, std::max(0.0, 0.5 + s));
  ctsep_image* raw = nullptr;
  check(ctsep_image_create(w, h, shifted.data(), &raw), "texture view");
  return ImagePtr(raw);
}

// ---------------------------------------------------------------- decompose

int cmd_decompose(const RunConfig& cfg) {
  cfg.validate();
  const ctsep_method method = cfg.solver.methods().front();
  const ctsep_solver_config solver = cfg.solver.config_for(method);

  std::vector<double> lambdas(static_cast<size_t>(cfg.scales));
  if (cfg.scales > 0)
    check(ctsep_lambda_ladder(cfg.lambda_start, cfg.lambda_step, lambdas.size(), lambdas.data()),
          "lambda ladder");

  ImagePtr f = load(cfg.input_path);
  ctsep_decomposition* raw = nullptr;
  check(ctsep_decompose(f.get(), lambdas.data(), lambdas.size(), cfg.entropy.block_size,
                        cfg.entropy.value(), &solver, cfg.intensity_scale, &raw),
        "decompose");
  DecompPtr d(raw);
  const size_t w = ctsep_image_width(f.get());
  const size_t h = ctsep_image_height(f.get());
  const size_t n = ctsep_decomposition_scales(d.get());

  prepare_dir(cfg.output_dir);
  const auto& dir = cfg.output_dir;
  check(ctsep_image_save(ctsep_decomposition_cartoon(d.get()), out_path(dir, "cartoon.png").c_str()),
        "write cartoon");
  ImagePtr view = centred_texture(ctsep_decomposition_texture(d.get()));
  check(ctsep_image_save(view.get(), out_path(dir, "texture.png").c_str()), "write texture");
  check(ctsep_image_save_signed16(ctsep_decomposition_texture(d.get()),
                                  out_path(dir, "texture_raw.pgm").c_str(),
                                  out_path(dir, "texture_raw.txt").c_str()),
        "write raw texture");

  const ctsep_entropy* entropy = ctsep_decomposition_entropy(d.get());
  check(ctsep_levels_save_pgm(w, h, ctsep_entropy_levels(entropy),
                              out_path(dir, "entropy_raw.pgm").c_str()),
        "write entropy map");
  if (cfg.emit_entropy_png) save_jet(entropy, out_path(dir, "entropy_jet.png"));
  if (cfg.emit_scale_map) {
    const uint32_t* idx = ctsep_decomposition_scale_index(d.get());
    std::vector<uint8_t> stretched(w * h, 0);
    if (n > 0) {
      for (size_t i = 0; i < stretched.size(); ++i)
        stretched[i] = static_cast<uint8_t>((255 * idx[i] + n / 2) / n);
    }
    check(ctsep_levels_save_pgm(w, h, stretched.data(), out_path(dir, "scale_map.pgm").c_str()),
          "write scale map");
  }

  std::ostringstream report;
  report << "command: decompose\n"
         << "input: " << cfg.input_path << "\n"
         << "width: " << w << "\n"
         << "height: " << h << "\n"
         << "block_size: " << cfg.entropy.block_size << "\n"
         << "entropy_norm: " << cfg.entropy.norm << "\n"
         << "entropy_min: " << num(ctsep_entropy_min_raw(entropy)) << "\n"
         << "entropy_max: " << num(ctsep_entropy_max_raw(entropy)) << "\n"
         << "solver: " << (method == CTSEP_METHOD_DUAL ? "dual" : "descent") << "\n"
         << "epsilon: " << num(solver.epsilon) << "\n"
         << "step_size: " << num(solver.step_size) << "\n"
         << "tolerance: " << num(solver.tolerance) << "\n"
         << "max_iterations: " << solver.max_iterations << "\n"
         << "intensity_scale: " << num(cfg.intensity_scale) << "\n"
         << "scales: " << n << "\n";
  report << "lambdas:";
  for (size_t s = 1; s <= n; ++s) report << " " << num(ctsep_decomposition_lambda(d.get(), s));
  report << "\n";
  for (size_t s = 1; s <= n; ++s) {
    report << "scale_" << s << ": lambda=" << num(ctsep_decomposition_lambda(d.get(), s))
           << " iterations=" << ctsep_decomposition_iterations(d.get(), s)
           << " energy=" << num(ctsep_decomposition_energy(d.get(), s))
           << " converged=" << (ctsep_decomposition_converged(d.get(), s) ? "yes" : "no") << "\n";
  }
  std::vector<size_t> counts(n + 1, 0);
  const uint32_t* idx = ctsep_decomposition_scale_index(d.get());
  for (size_t i = 0; i < w * h; ++i) ++counts[idx[i]];
  for (size_t s = 0; s <= n; ++s) report << "pixels_scale_" << s << ": " << counts[s] << "\n";
  write_text(out_path(dir, "run_report.txt"), report.str());
  return kExitOk;
}

// ---------------------------------------------------------------- entropy

int cmd_entropy(const std::string& input, const std::string& dir, const EntropyFlags& flags) {
  flags.validate();
  ImagePtr img = load(input);
  ctsep_entropy* raw = nullptr;
  check(ctsep_entropy_compute(img.get(), flags.block_size, flags.value(), &raw), "entropy");
  EntropyPtr map(raw);

  prepare_dir(dir);
  check(ctsep_levels_save_pgm(ctsep_entropy_width(raw), ctsep_entropy_height(raw),
                              ctsep_entropy_levels(raw), out_path(dir, "entropy_raw.pgm").c_str()),
        "write entropy map");
  save_jet(raw, out_path(dir, "entropy_jet.png"));
  return kExitOk;
}

// ---------------------------------------------------------------- rof

int cmd_rof(const std::string& input, const std::string& dir, double lambda,
            double intensity_scale, const SolverFlags& flags) {
  flags.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) invalid("lambda must be positive");
  validate_scale(intensity_scale);
  const double solver_lambda = lambda * intensity_scale;
  ImagePtr f = load(input);

  struct Run {
    const char* name;
    RofPtr result;
  };
  std::vector<Run> runs;
  for (ctsep_method m : flags.methods()) {
    const ctsep_solver_config c = flags.config_for(m);
    ctsep_rof_result* raw = nullptr;
    check(ctsep_rof(f.get(), solver_lambda, &c, &raw), "rof");
    runs.push_back({m == CTSEP_METHOD_DUAL ? "dual" : "descent", RofPtr(raw)});
  }

  prepare_dir(dir);
  const std::string stem = "rof_" + num(lambda);
  const bool both = runs.size() > 1;
  std::ostringstream report;
  report << "command: rof\n"
         << "input: " << input << "\n"
         << "lambda: " << num(lambda) << "\n"
         << "intensity_scale: " << num(intensity_scale) << "\n"
         << "solver_lambda: " << num(solver_lambda) << "\n";
  for (const auto& run : runs) {
    const std::string base = both ? stem + "_" + run.name : stem;
    check(ctsep_image_save(ctsep_rof_image(run.result.get()), out_path(dir, base + ".png").c_str()),
          "write " + base);
    std::ostringstream csv;
    csv << "iteration,energy\n";
    const double* trace = ctsep_rof_trace(run.result.get());
    for (size_t i = 0; i < ctsep_rof_trace_length(run.result.get()); ++i)
      csv << i + 1 << "," << num(trace[i]) << "\n";
    write_text(out_path(dir, base + "_trace.csv"), csv.str());
    report << run.name << "_iterations: " << ctsep_rof_iterations(run.result.get()) << "\n"
           << run.name << "_energy: " << num(ctsep_rof_final_energy(run.result.get())) << "\n"
           << run.name << "_converged: " << (ctsep_rof_converged(run.result.get()) ? "yes" : "no")
           << "\n";
  }
  if (both) {
    const ctsep_image* a = ctsep_rof_image(runs[0].result.get());
    const ctsep_image* b = ctsep_rof_image(runs[1].result.get());
    double linf = 0.0;
    for (size_t i = 0; i < ctsep_image_width(a) * ctsep_image_height(a); ++i)
      linf = std::max(linf, std::abs(ctsep_image_data(a)[i] - ctsep_image_data(b)[i]));
    report << "linf_disagreement: " << num(linf) << "\n";
  }
  write_text(out_path(dir, "rof_report.txt"), report.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-guided cartoon/texture separation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
  app.config_formatter(std::make_shared<SubcommandConfig>(app));
  app.allow_config_extras(CLI::config_extras_mode::ignore_all);

  RunConfig run;
  CLI::App* decompose = app.add_subcommand("decompose", "multi-scale ROF cartoon/texture split");
  add_common(*decompose, run.input_path, run.output_dir);
  decompose->add_option("--scales", run.scales, "number of ROF scales (0 = identity)");
  decompose->add_option("--lambda-start", run.lambda_start, "smallest lambda of the ladder");
  decompose->add_option("--lambda-step", run.lambda_step, "lambda increment between scales");
  add_intensity_scale(*decompose, run.intensity_scale);
  run.entropy.add_to(*decompose);
  run.solver.add_to(*decompose, false);
  decompose->add_flag("--emit-entropy-png", run.emit_entropy_png, "write entropy_jet.png");
  decompose->add_flag("--emit-scale-map", run.emit_scale_map, "write scale_map.pgm");

  std::string ent_input, ent_dir = ".";
  EntropyFlags ent_flags;
  CLI::App* entropy = app.add_subcommand("entropy", "local block-entropy map");
  add_common(*entropy, ent_input, ent_dir);
  ent_flags.add_to(*entropy);

  std::string rof_input, rof_dir = ".";
  double rof_lambda = 0.0;
  double rof_scale = CTSEP_BYTE_INTENSITY_SCALE;
  SolverFlags rof_flags;
  CLI::App* rof = app.add_subcommand("rof", "single-scale ROF filtering");
  add_common(*rof, rof_input, rof_dir);
  rof->add_option("--lambda", rof_lambda, "fidelity weight")->required();
  add_intensity_scale(*rof, rof_scale);
  rof_flags.add_to(*rof, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*decompose) return cmd_decompose(run);
    if (*entropy) return cmd_entropy(ent_input, ent_dir, ent_flags);
    return cmd_rof(rof_input, rof_dir, rof_lambda, rof_scale, rof_flags);
  } catch (const CliFailure& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
}
