#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "tfe/semigroup.hpp"

using namespace tfe;

TEST_SUITE("semigroup") {
  TEST_CASE("moment-cancelled data decays at -k/4") {
    const auto& t = fixture::table1d();
    std::vector<double> taus{2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6};
    for (int k = 1; k <= 3; ++k) {
      auto u0 = decay_test_data(k, t);
      for (int m = 0; m < k; ++m) CHECK(std::abs(moments(u0, MultiIndex{m})) < 1e-10);
      auto fit = decay_rate_fit(u0, taus, t);
      CHECK(fit.lambda == doctest::Approx(-k / 4.0).epsilon(0.05));
    }
  }

  TEST_CASE("mass mode does not decay") {
    const auto& t = fixture::table1d();
    auto u0 = eigenfunction(MultiIndex{0}, t);
    auto fit = decay_rate_fit(u0, {2, 3, 4, 5, 6}, t);
    CHECK(std::abs(fit.lambda) < 0.01);
  }

  TEST_CASE("spectral and convolution routes agree") {
    const auto& t = fixture::table1d();
    auto u0 = sample(t.grid, [](const double* y) { return std::exp(-y[0] * y[0]) * (1 + 0.5 * y[0]); });
    for (double tau : {0.0, 0.5, 1.0, 2.0, 4.0, 6.0}) {
      auto c = convolution_solution(u0, tau, t);
      auto s = spectral_solution(u0, tau, 10, t);
      auto sr = restrict_to(s.as_function(), c.grid);
      double d = sup_diff(sr, c.as_function());
      CHECK(d < 1e-3);
    }
  }

  TEST_CASE("tau = 0 gives the kernel convolution") {
    // F * u0 for u0 = delta-like narrow Gaussian is close to F itself
    const auto& t = fixture::table1d();
    const double s = 0.05;
    auto u0 = sample(t.grid, [s](const double* y) { return std::exp(-y[0] * y[0] / (s * s)) / (s * std::sqrt(M_PI)); });
    auto c = convolution_solution(u0, 0, t);
    double worst = 0;
    for (std::size_t i = 0; i < c.values.size(); i += 7) {
      double y = c.grid.coord(static_cast<int>(i));
      worst = std::max(worst, std::abs(c.values[i] - oracle::kernel_1d(y)));
    }
    CHECK(worst < 2e-3);
  }

  TEST_CASE("mass is conserved") {
    const auto& t = fixture::table1d();
    auto u0 = sample(t.grid, [](const double* y) { return std::exp(-2 * y[0] * y[0]); });
    double m0 = integrate(u0.grid, u0.v);
    for (double tau : {0.0, 1.5, 3.0}) {
      auto w = convolution_solution(u0, tau, t);
      CHECK(integrate(w.grid, w.values) == doctest::Approx(m0).epsilon(1e-6));
    }
  }

  TEST_CASE("flow property through the dilation law") {
    // data g(c, s) evolved for t1 + t2 equals g(c e^{-t1/4}, s e^{-t1/4}) evolved for t2
    const auto& t = fixture::table1d();
    auto gauss = [&](double c, double s) {
      return sample(t.grid, [c, s](const double* y) {
        double z = (y[0] - c) / s;
        return std::exp(-z * z) / (s * std::sqrt(M_PI));
      });
    };
    const double t1 = 1.5, t2 = 1.5, c = 2.0, s = 0.6, q = std::exp(-t1 / 4);
    auto a = convolution_solution(gauss(c, s), t1 + t2, t);
    auto b = convolution_solution(gauss(c * q, s * q), t2, t);
    CHECK(sup_diff(a.as_function(), b.as_function()) < 1e-6);
    auto sa = spectral_solution(gauss(c, s), t1 + t2, 10, t);
    auto sb = spectral_solution(gauss(c * q, s * q), t2, 10, t);
    CHECK(sup_diff(sa.as_function(), sb.as_function(), 0.2) < 1e-3);
  }

  TEST_CASE("fat tails are rejected") {
    const auto& t = fixture::table1d();
    auto u0 = sample(t.grid, [](const double*) { return 1.0; });
    CHECK_THROWS_AS(moments(u0, MultiIndex{0}), Error);
  }
}
