#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ctsep/image.hpp"

namespace ctsep {

enum class SolverMethod {
  ExplicitDescent,
  DualProjection,
};

/// Iteration controls for ROF minimization.
///
/// `epsilon` regularizes |grad u| in the explicit scheme and `step_size` is its
/// artificial time step; the dual solver reads `step_size` as its projection
/// step tau (at most 1/8). Both solvers stop when the relative energy change
/// between consecutive iterates drops below `tolerance`.
struct SolverConfig {
  double epsilon = 1e-3;
  double step_size = 0.25e-3;
  double tolerance = 1e-6;
  std::int64_t max_iterations = 50000;
  SolverMethod method = SolverMethod::ExplicitDescent;

  static SolverConfig descent_defaults();
  static SolverConfig dual_defaults();

  /// Throws Error(InvalidArgument) when a field is out of range.
  void validate() const;
};

struct SolveReport {
  std::int64_t iterations_used = 0;
  double final_energy = 0.0;
  std::vector<double> energy_trace;
  bool converged = false;
};

struct RofResult {
  GrayImage image;
  SolveReport report;
};

/// Forward-difference gradient with a zero difference on the last column
/// (x component) and last row (y component).
struct Gradient {
  std::vector<double> dx;
  std::vector<double> dy;
};

Gradient gradient(const GrayImage& u);

/// Negative adjoint of `gradient`: backward differences, so that
/// sum(div p) == 0 for any field.
std::vector<double> divergence(std::span<const double> px, std::span<const double> py,
                               std::size_t width, std::size_t height);

/// sum sqrt(eps^2 + |grad u|^2) + lambda/2 * sum (f - u)^2.
double tv_energy(const GrayImage& u, const GrayImage& f, double lambda, double epsilon);

/// Isotropic discrete total variation (tv_energy with u == f, eps == 0).
double total_variation(const GrayImage& u);

/// Gradient descent on the eps-regularized ROF energy, starting from f:
///   u <- (u + dt * (div(grad u / sqrt(eps^2 + |grad u|^2)) + lambda f)) / (1 + dt lambda)
/// which is the explicit step with the fidelity term taken implicitly. The
/// curvature term needs dt of order eps / 4 for stability.
RofResult rof_descent(const GrayImage& f, double lambda, const SolverConfig& config);

/// Dual fixed-point projection, starting from p = 0. The reported energies are
/// exact (eps = 0) ROF energies of the primal iterate f - div(p) / lambda.
RofResult rof_dual(const GrayImage& f, double lambda, const SolverConfig& config);

/// Dispatches on config.method.
RofResult rof_solve(const GrayImage& f, double lambda, const SolverConfig& config);

}  // namespace ctsep
