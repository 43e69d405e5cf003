#include <doctest.h>

#include <cmath>
#include <random>

#include "ctsep/error.hpp"
#include "ctsep/tv_solver.hpp"
#include "test_support.hpp"

using namespace ctsep;
namespace t = ctsep::testing;

namespace {

SolverConfig descent(double eps, double tol, std::int64_t iters = 200000) {
  SolverConfig c = SolverConfig::descent_defaults();
  c.epsilon = eps;
  c.step_size = 0.25 * eps;
  c.tolerance = tol;
  c.max_iterations = iters;
  return c;
}

SolverConfig dual(double tol, std::int64_t iters = 200000) {
  SolverConfig c = SolverConfig::dual_defaults();
  c.tolerance = tol;
  c.max_iterations = iters;
  return c;
}

double l2_distance(const GrayImage& a, const GrayImage& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("tv_energy hand-evaluated cases") {
  const GrayImage c(5, 4, 0.3);
  CHECK(tv_energy(c, c, 7.0, 0.0) == 0.0);

  const GrayImage u(2, 1, std::vector<double>{0.0, 1.0});
  const GrayImage f(2, 1, std::vector<double>{0.0, 0.0});
  CHECK(tv_energy(u, f, 2.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));

  // 2x2: only the top-left pixel has both differences.
  const GrayImage sq(2, 2, std::vector<double>{0.0, 3.0, 4.0, 4.0});
  CHECK(total_variation(sq) == doctest::Approx(5.0 + 1.0 + 0.0).epsilon(1e-15));

  std::mt19937_64 rng(5);
  const GrayImage r = t::random_image(6, 5, rng);
  CHECK(tv_energy(r, r, 0.1, 0.0) == doctest::Approx(total_variation(r)).epsilon(1e-14));

  // eps adds sqrt(eps^2) per flat pixel.
  CHECK(tv_energy(c, c, 1.0, 0.5) == doctest::Approx(0.5 * 20).epsilon(1e-14));
}

TEST_CASE("tv_energy validates its arguments") {
  const GrayImage a(2, 2), b(3, 2);
  CHECK_THROWS_AS(tv_energy(a, b, 1.0, 0.0), Error);
  CHECK_THROWS_AS(tv_energy(a, a, 0.0, 0.0), Error);
  CHECK_THROWS_AS(tv_energy(a, a, -1.0, 0.0), Error);
  CHECK_THROWS_AS(tv_energy(a, a, 1.0, -1e-3), Error);
}

TEST_CASE("divergence is the negative adjoint of the gradient") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (auto [w, h] : {std::pair<std::size_t, std::size_t>{1, 1}, {1, 7}, {6, 1}, {5, 8}, {9, 9}}) {
    const GrayImage u = t::random_image(w, h, rng);
    std::vector<double> px(w * h), py(w * h);
    for (double& v : px) v = d(rng);
    for (double& v : py) v = d(rng);
    const Gradient g = gradient(u);
    const auto div = divergence(px, py, w, h);
    double lhs = 0.0, rhs = 0.0, total = 0.0;
    for (std::size_t i = 0; i < w * h; ++i) {
      lhs += g.dx[i] * px[i] + g.dy[i] * py[i];
      rhs -= u.data()[i] * div[i];
      total += div[i];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(std::abs(total) < 1e-12);
  }
}

TEST_CASE("gradient uses Neumann boundaries") {
  const GrayImage u(3, 2, std::vector<double>{0, 1, 3, 2, 2, 2});
  const Gradient g = gradient(u);
  CHECK(g.dx == std::vector<double>{1, 2, 0, 0, 0, 0});
  CHECK(g.dy == std::vector<double>{2, 1, -1, 0, 0, 0});
}

TEST_CASE("constant input is a fixed point of both solvers") {
  const GrayImage f(7, 5, 0.625);
  const auto a = rof_descent(f, 0.05, descent(1e-3, 1e-6, 500));
  const auto b = rof_dual(f, 0.05, dual(1e-6, 500));
  CHECK(a.image == f);
  CHECK(b.image == f);
}

TEST_CASE("1x1 image is returned unchanged") {
  const GrayImage f(1, 1, 0.3);
  for (double lambda : {1e-3, 0.05, 10.0}) {
    CHECK(rof_descent(f, lambda, SolverConfig::descent_defaults()).image == f);
    CHECK(rof_dual(f, lambda, SolverConfig::dual_defaults()).image == f);
  }
}

TEST_CASE("very large lambda keeps the input") {
  std::mt19937_64 rng(3);
  const GrayImage f = t::random_image(8, 8, rng);
  const auto a = rof_descent(f, 1e6, SolverConfig::descent_defaults());
  const auto b = rof_dual(f, 1e6, SolverConfig::dual_defaults());
  CHECK(t::linf(a.image, f) < 1e-3);
  CHECK(t::linf(b.image, f) < 1e-3);
}

TEST_CASE("descent energy is within 0.5% of the dual energy") {
  // eps = 1e-4 keeps the smoothing bias of the regularized energy small.
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const GrayImage f = t::random_image(8, 8, rng);
    const auto a = rof_descent(f, 0.05, descent(1e-4, 1e-9, 2000000));
    const auto b = rof_dual(f, 0.05, dual(1e-10));
    const double ea = tv_energy(a.image, f, 0.05, 0.0);
    const double eb = tv_energy(b.image, f, 0.05, 0.0);
    CHECK(std::abs(ea - eb) <= 0.005 * eb);
  }
}

TEST_CASE("solvers agree on random 8x8 images at tolerance 1e-8") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    const GrayImage f = t::random_image(8, 8, rng);
    for (double lambda : {0.05, 0.5, 5.0}) {
      const auto a = rof_descent(f, lambda, descent(1e-3, 1e-8));
      const auto b = rof_dual(f, lambda, dual(1e-8));
      CHECK(t::linf(a.image, b.image) <= 1e-2);
    }
  }
}

TEST_CASE("2x2 outputs match the brute-force minimizer") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 4; ++trial) {
    const GrayImage f = t::random_image(2, 2, rng);
    const std::array<double, 4> fa{f.data()[0], f.data()[1], f.data()[2], f.data()[3]};
    for (double lambda : {0.5, 2.0, 8.0}) {
      const auto ref = t::brute_force_rof_2x2(fa, lambda);
      const auto a = rof_descent(f, lambda, descent(1e-5, 1e-12, 5000000));
      const auto b = rof_dual(f, lambda, dual(1e-12));
      for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(a.image.data()[i] - ref[i]) <= 1e-3);
        CHECK(std::abs(b.image.data()[i] - ref[i]) <= 1e-3);
      }
    }
  }
}

TEST_CASE("descent energy trace is non-increasing for step <= 0.2 eps") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const GrayImage f = t::random_image(12, 9, rng);
    for (double eps : {1e-3, 1e-2}) {
      SolverConfig c = descent(eps, 1e-9, 20000);
      c.step_size = 0.2 * eps;
      const auto r = rof_descent(f, 0.1, c);
      REQUIRE(!r.report.energy_trace.empty());
      double prev = tv_energy(f, f, 0.1, eps);
      for (double e : r.report.energy_trace) {
        CHECK(e <= prev + 1e-12);
        prev = e;
      }
      CHECK(r.report.final_energy == r.report.energy_trace.back());
      CHECK(r.report.iterations_used == static_cast<std::int64_t>(r.report.energy_trace.size()));
    }
  }
}

TEST_CASE("maximum principle and mean preservation") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const GrayImage f = t::random_image(10, 7, rng);
    const auto [lo, hi] = std::minmax_element(f.data().begin(), f.data().end());
    for (double lambda : {0.01, 0.2, 3.0}) {
      for (const auto& r : {rof_descent(f, lambda, descent(1e-3, 1e-8)), rof_dual(f, lambda, dual(1e-8))}) {
        CHECK(r.report.converged);
        for (double v : r.image.data()) {
          CHECK(v >= *lo - 1e-6);
          CHECK(v <= *hi + 1e-6);
        }
        CHECK(std::abs(t::mean(r.image) - t::mean(f)) <= 1e-3);
      }
    }
  }
}

TEST_CASE("smaller lambda moves the output further from the input") {
  std::mt19937_64 rng(4);
  const GrayImage f = t::random_image(16, 16, rng);
  const double lambdas[] = {0.02, 0.1, 0.5, 2.0, 10.0};
  for (auto solve : {+[](const GrayImage& g, double l) { return rof_dual(g, l, dual(1e-9)); },
                     +[](const GrayImage& g, double l) { return rof_descent(g, l, descent(1e-3, 1e-9)); }}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double l : lambdas) {
      const double d = l2_distance(solve(f, l).image, f);
      CHECK(d <= prev + 1e-6);
      prev = d;
    }
  }
}

TEST_CASE("solver configuration is validated") {
  const GrayImage f(2, 2, 0.5);
  SolverConfig c = SolverConfig::descent_defaults();
  CHECK(c.epsilon == 1e-3);
  CHECK(c.step_size == 0.25e-3);
  CHECK(c.tolerance == 1e-6);
  CHECK(c.max_iterations == 50000);
  const SolverConfig d = SolverConfig::dual_defaults();
  CHECK(d.step_size == 0.125);
  CHECK(d.max_iterations == 5000);
  CHECK(d.method == SolverMethod::DualProjection);

  auto bad = [&](auto mutate, SolverConfig base) {
    mutate(base);
    CHECK_THROWS_AS(rof_solve(f, 1.0, base), Error);
  };
  bad([](SolverConfig& s) { s.epsilon = 0.0; }, c);
  bad([](SolverConfig& s) { s.step_size = -1.0; }, c);
  bad([](SolverConfig& s) { s.tolerance = 0.0; }, c);
  bad([](SolverConfig& s) { s.max_iterations = 0; }, c);
  bad([](SolverConfig& s) { s.step_size = 0.2; }, d);
  CHECK_THROWS_AS(rof_dual(f, 0.0, d), Error);
  CHECK_THROWS_AS(rof_descent(f, NAN, c), Error);
}

TEST_CASE("iteration cap is honoured and reported") {
  std::mt19937_64 rng(6);
  const GrayImage f = t::random_image(8, 8, rng);
  SolverConfig c = descent(1e-3, 1e-15, 7);
  const auto r = rof_descent(f, 0.05, c);
  CHECK(r.report.iterations_used == 7);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.energy_trace.size() == 7);
}
