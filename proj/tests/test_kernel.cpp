#include <chrono>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace tfe;

TEST_SUITE("kernel") {
  TEST_CASE("1D mass and runtime") {
    auto t0 = std::chrono::steady_clock::now();
    KernelTable t = eval_kernel(1, default_grid(1), 4);
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(std::abs(kernel_mass(t) - 1) < 1e-6);
    CHECK(sec < 30);
  }

  TEST_CASE("derivative slices integrate to zero") {
    const auto& t = fixture::table1d();
    CHECK(std::abs(kernel_mass(t, MultiIndex{1})) < 1e-6);
    CHECK(std::abs(kernel_mass(t, MultiIndex{3})) < 1e-6);
  }

  TEST_CASE("1D values against the Taylor series") {
    const auto& t = fixture::table1d();
    const Grid& g = t.grid;
    double worst = 0;
    for (int m : {0, 1, 2, 5}) {
      const auto& v = t.at(MultiIndex{m});
      for (double y : {0.0, 0.35, 1.0, 2.2, 3.7, 5.0, -4.15}) {
        int i = static_cast<int>(std::lround(y / g.h + g.R / g.h));
        worst = std::max(worst, std::abs(v[i] - oracle::kernel_1d(g.coord(i), m)));
      }
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("parity under reflection") {
    const auto& t = fixture::table1d();
    const int n = t.grid.per_axis();
    for (int m = 0; m <= 5; ++m) {
      const auto& v = t.at(MultiIndex{m});
      double s = (m % 2) ? -1.0 : 1.0, worst = 0;
      for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(v[i] - s * v[n - 1 - i]));
      CHECK(worst < 1e-14);
    }
  }

  TEST_CASE("symbol route matches centered differences of the lower slice") {
    const auto& t = fixture::table1d();
    const double h = t.grid.h;
    const int n = t.grid.per_axis();
    for (int m = 1; m <= 4; ++m) {
      const auto& lo = t.at(MultiIndex{m - 1});
      const auto& hi = t.at(MultiIndex{m});
      double worst = 0, scale = sup_norm(hi);
      for (int i = 2; i + 2 < n; ++i) {
        double fd = (lo[i - 2] - 8 * lo[i - 1] + 8 * lo[i + 1] - lo[i + 2]) / (12 * h);
        worst = std::max(worst, std::abs(fd - hi[i]));
      }
      CHECK(worst < 1e-4 * scale);
    }
  }

  TEST_CASE("decay bound holds pointwise") {
    const auto& t = fixture::table1d();
    auto D = decay_prefactors(t);
    for (const auto& [b, v] : t.values) {
      double worst = 0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        double r = t.grid.abs_y(i);
        worst = std::max(worst, std::abs(v[i]) - D.at(b) * std::exp(-t.d_fit * std::pow(r, 4.0 / 3.0)));
      }
      CHECK(worst <= 1e-13 * sup_norm(v));
    }
    CHECK(t.d_fit > 0);
    CHECK(t.d_fit <= asymptotic_decay_constant());
  }

  TEST_CASE("small box is rejected") {
    CHECK_THROWS_AS(eval_kernel(1, Grid::make(1, 0.05, 4.0), 2), Error);
    try {
      eval_kernel(1, Grid::make(1, 0.05, 4.0), 2);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::QuadratureDivergence);
    }
  }

  TEST_CASE("2D mass and radial values") {
    const auto& t = fixture::table2d();
    CHECK(std::abs(kernel_mass(t) - 1) < 1e-4);
    const auto& v = t.at(MultiIndex{0, 0});
    double worst = 0;
    double y[2];
    for (std::size_t i = 0; i < v.size(); i += 997) {
      t.grid.node(i, y);
      double r = std::hypot(y[0], y[1]);
      if (r > 8) continue;
      worst = std::max(worst, std::abs(v[i] - oracle::kernel_2d(r)));
    }
    CHECK(worst < 1e-6);
    CHECK(std::abs(kernel_mass(t, MultiIndex{1, 0})) < 1e-4);
  }

  TEST_CASE("unsupported dimension") {
    CHECK_THROWS_AS(Grid::make(3, 0.1, 10), Error);
  }
}
