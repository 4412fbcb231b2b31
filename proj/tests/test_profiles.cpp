#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "tfe/profiles.hpp"

using namespace tfe;

namespace {

std::vector<double> sampled(const Grid& g, const std::function<double(double)>& fn) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g.coord(static_cast<int>(i)));
  return v;
}

}  // namespace

TEST_SUITE("profiles") {
  TEST_CASE("constants solve the problem with alpha = 0") {
    Grid g = Grid::make(1, 0.02, 4, true);
    for (double n : {0.0, 0.2, 0.5}) {
      for (Kind kd : {Kind::Global, Kind::Blowup}) {
        auto p = make_profile(kd, n, 0.0, g, std::vector<double>(g.size(), 0.7));
        CHECK(residual_sup(p) < 1e-12);
        CHECK(p.beta_exp == doctest::Approx(0.25));
      }
    }
  }

  TEST_CASE("monomials are blow-up solutions") {
    // f = y^k with alpha = -k/(4 - k n); for k <= 2 the flux vanishes, for k = 3 only at n = 0
    Grid g = Grid::make(1, 0.05, 3.2, true);
    for (int k = 1; k <= 3; ++k) {
      for (double n : {0.0, 0.1, 0.3}) {
        if (k == 3 && n > 0) continue;
        double alpha = -k / (4 - k * n);
        auto p = make_profile(Kind::Blowup, n, alpha, g, sampled(g, [k](double y) { return std::pow(y, k); }), k % 2, k);
        CHECK(residual_sup(p) < 1e-8);
      }
    }
  }

  TEST_CASE("the kernel solves the global problem at n = 0") {
    Grid g = Grid::make(1, 0.05, 8, true);
    auto p = make_profile(Kind::Global, 0.0, 0.25, g, sampled(g, [](double y) { return oracle::kernel_1d(y); }));
    // fourth-order differences of a smooth function at h = 0.05
    CHECK(residual_sup(p) < 1e-5);
    auto wrong = make_profile(Kind::Global, 0.0, 0.3, g, p.f);
    CHECK(residual_sup(wrong) > 1e-3);
  }

  TEST_CASE("blow-up shooting recovers the exact exponent") {
    for (int k : {1, 2}) {
      for (double n : {0.1, 0.2}) {
        double exact = -k / (4 - k * n);
        auto p = shoot_blowup_profile(n, k, 1, -k / 4.0);
        CHECK(p.alpha == doctest::Approx(exact).epsilon(1e-8));
        REQUIRE(p.growth_exponent.has_value());
        CHECK(*p.growth_exponent == doctest::Approx(k).epsilon(1e-3));
        CHECK(p.parity == k % 2);
        // the profile is a multiple of y^k
        double c = profile_value(p, 1.0);
        CHECK(std::abs(profile_value(p, 2.5) - c * std::pow(2.5, k)) < 1e-8 * std::abs(c) * std::pow(2.5, k));
        CHECK_THROWS_AS(mass_conservation_check(p), Error);
      }
    }
  }

  TEST_CASE("global profiles approach the kernel as n shrinks") {
    std::vector<double> dist;
    for (double n : {0.2, 0.1}) {
      auto p = shoot_global_profile(n);
      CHECK(p.alpha == doctest::Approx(1 / (4 + n)).epsilon(1e-12));
      REQUIRE(p.interface_radius.has_value());
      CHECK(*p.interface_radius > 5);
      auto mc = mass_conservation_check(p);
      CHECK(mc.mass_error < 1e-6);
      CHECK(mc.trapezoid_error < 1e-4);
      CHECK(std::abs(mc.exponent_identity) < 1e-15);
      // f''' ~ |y - z|^-n at a sign change, so differences are only checked away from zeros
      auto r = residual_nep(p);
      double worst = 0;
      for (std::size_t i = 0; i < r.size() && p.grid.coord(static_cast<int>(i)) <= 6; ++i) {
        bool near_zero = false;
        for (int d = -10; d <= 10; ++d) {
          int j = static_cast<int>(i) + d;
          if (j >= 0 && j + 1 < static_cast<int>(p.f.size()) && (p.f[j] < 0) != (p.f[j + 1] < 0)) near_zero = true;
        }
        if (!near_zero && std::isfinite(r[i])) worst = std::max(worst, std::abs(r[i]));
      }
      CHECK(worst < 1e-6);
      CHECK(p.zero_count > 0);
      dist.push_back(sup_distance(p, [](double y) { return oracle::kernel_1d(y); }, 4.0));
    }
    CHECK(dist[1] < dist[0]);
    // first order in n
    CHECK(dist[1] / dist[0] == doctest::Approx(0.5).epsilon(0.1));
  }

  TEST_CASE("scaling invariance of a global profile") {
    auto p = shoot_global_profile(0.2);
    for (double lam : {0.5, 2.0}) CHECK(scaling_check(p, lam) < 1e-6);
  }

  TEST_CASE("expansion diagnostic") {
    Grid g = Grid::make(1, 0.05, 10, false);
    auto one = expansion_diagnostic(g, std::vector<double>(g.size(), 1.0), {0.2, 0.1});
    for (const auto& r : one) {
      CHECK(r.l1_error == 0);
      CHECK(r.second_order == 0);
    }
    // constant c: |(c^n - 1)/n - ln c| times the box length
    const double c = 0.3;
    auto rows = expansion_diagnostic(g, std::vector<double>(g.size(), c), {0.2, 0.1, 0.05});
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      double e = std::abs((std::pow(c, r.n) - 1) / r.n - std::log(c));
      CHECK(r.l1_error == doctest::Approx(20 * e).epsilon(1e-12));
      CHECK(r.second_order == doctest::Approx(20 * 0.5 * r.n * std::log(c) * std::log(c)).epsilon(1e-12));
      CHECK(r.l8_bound == doctest::Approx(std::exp(-1 / r.n) / r.n));
    }
    CHECK_THROWS_AS(expansion_diagnostic(g, {1.0, 2.0}, {0.1}), Error);
  }
}
