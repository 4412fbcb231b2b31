#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "tfe/branching.hpp"

using namespace tfe;

TEST_SUITE("branching") {
  TEST_CASE("gamma01 is -16 eta / N^2 and linear in eta") {
    const auto& t = fixture::table1d();
    for (double eta : {0.5, 1.0, 2.0}) CHECK(gamma01(eta, t).gamma == doctest::Approx(-16 * eta).epsilon(1e-6));
    const auto& t2 = fixture::table2d();
    CHECK(gamma01(1.0, t2).gamma == doctest::Approx(-4.0).epsilon(1e-3));
    CHECK(gamma01(3.0, t2).gamma == doctest::Approx(3 * gamma01(1.0, t2).gamma).epsilon(1e-9));
  }

  TEST_CASE("blow-up k = 0 coefficient vanishes") {
    CHECK(std::abs(mu10(fixture::table1d())) < 1e-8);
    CHECK(std::abs(mu10(fixture::table2d())) < 1e-6);
  }

  TEST_CASE("mass pairing identity") {
    // <1, y.grad psi_0> = -N <1, psi_0> = -N, so the combination is zero
    CHECK(std::abs(mass_pairing(fixture::table1d())) < 1e-6);
    CHECK(std::abs(mass_pairing(fixture::table2d())) < 1e-6);
  }

  TEST_CASE("log-weighted integral against tanh-sinh") {
    const auto& t = fixture::table1d();
    SparsePolynomial adj = SparsePolynomial::constant(1, 1);
    adj.add_term(MultiIndex{2}, 1);
    LogField a = field_from_polynomial(adj, t.grid);
    LogField tg = field_from_kernel({{MultiIndex{0}, 1.0}}, t);
    // zeros on a node and between nodes
    for (Rational z2 : {Rational(1), Rational(10247, 10000)}) {
      SparsePolynomial combo = SparsePolynomial::constant(1, -z2);
      combo.add_term(MultiIndex{2}, 1);
      auto r = log_weighted_integral(a, field_from_polynomial(combo, t.grid), tg);
      // -int 2y ln|y^2 - z^2| F'''(y) dy, split into ln|y - z| + ln|y + z|
      const double z = std::sqrt(z2.convert_to<double>());
      auto phi = [](double y) { return -2 * y * oracle::kernel_1d(y, 3); };
      double ref = oracle::log_integral(phi, z, -24, 24) + oracle::log_integral(phi, -z, -24, 24);
      CHECK(r.value == doctest::Approx(ref).epsilon(1e-4));
      CHECK(std::abs(r.direct - r.ibp) < 1e-4 * std::abs(ref));
      CHECK(r.zeros == 2);
    }
  }

  TEST_CASE("1D simple solvability is consistent between the two log forms") {
    const auto& t = fixture::table1d();
    for (int k = 1; k <= 3; ++k) {
      auto s = assemble_simple_solvability(k, Kind::Blowup, 1.0, t);
      CHECK(std::abs(s.residual) < 1e-4 * (1 + std::abs(s.coefficient)));
    }
    for (int k = 0; k <= 2; ++k) {
      auto s = assemble_simple_solvability(k, Kind::Global, 1.0, t);
      CHECK(std::abs(s.residual) < 1e-3 * (1 + std::abs(s.coefficient)));
    }
    CHECK(assemble_simple_solvability(1, Kind::Blowup, 1.0, t).coefficient == doctest::Approx(-1.0 / 16).epsilon(1e-6));
    CHECK(assemble_simple_solvability(2, Kind::Blowup, 1.0, t).coefficient == doctest::Approx(-1.0 / 4).epsilon(1e-6));
  }

  TEST_CASE("blow-up k = 3 coefficient from a log-moment oracle") {
    // psi*_3 = y^3/sqrt6: transport <psi_3, y psi*_3'> = 3 <psi_3, psi*_3> = 3, and the log term
    // reduces to 3 int F'''' ln|y| dy
    auto phi = [](double y) { return oracle::kernel_1d(y, 4); };
    double logterm = 3 * oracle::log_integral(phi, 0.0, -24, 24);
    double mu = (-3.0 / 16) * 3 - logterm;
    auto s = assemble_simple_solvability(3, Kind::Blowup, 1.0, fixture::table1d());
    CHECK(s.pairing == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.transport == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(s.coefficient == doctest::Approx(mu).epsilon(1e-4));
  }

  TEST_CASE("conic classification") {
    CHECK(conic_classify({1, 0, 1, 0, 0, -1}).circle);
    CHECK(conic_classify({1, 0, 2, 0, 0, -1}).type == ConicType::Ellipse);
    auto h = conic_classify({1, 0, -1, 0, 0, -1});
    CHECK(h.type == ConicType::Hyperbola);
    CHECK(h.rectangular);
    CHECK(conic_classify({1, 0, 0, 0, -1, 0}).type == ConicType::Parabola);
    auto lp = conic_classify({1, 0, -1, 0, 0, 0});
    CHECK(lp.degenerate);
    CHECK(conic_classify({0, 0, 0, 1, 1, -1}).line);
  }

  TEST_CASE("conic intersections") {
    Conic circle{1, 0, 1, 0, 0, -0.5};
    Conic pair{1, 0, -1, 0, 0, 0};  // y = +-x
    auto r = intersect_conics(circle, pair);
    REQUIRE(r.points.size() == 4);
    for (const auto& p : r.points) {
      CHECK(std::abs(std::abs(p.x) - 0.5) < 1e-9);
      CHECK(std::abs(std::abs(p.y) - 0.5) < 1e-9);
    }
    CHECK(r.in_simplex == 1);
    Conic scaled{2, 0, 2, 0, 0, -1};
    CHECK_THROWS_AS(intersect_conics(circle, scaled), Error);
  }

  TEST_CASE("quadratic branch solver") {
    auto two = solve_quadratic_branch({1, -1, 0.1875});  // roots 1/4, 3/4
    CHECK(two.status == QuadStatus::Regular);
    REQUIRE(two.roots.size() == 2);
    CHECK(two.roots[0].root + two.roots[1].root == doctest::Approx(1.0));
    auto one = solve_quadratic_branch({1, 0, -0.25});  // 1/2 inside, -1/2 outside
    CHECK(one.roots.size() == 1);
    CHECK(one.roots[0].root == doctest::Approx(0.5));
    auto none = solve_quadratic_branch({1, 0, 1});
    CHECK(none.status == QuadStatus::NoSolution);
    CHECK(none.roots.empty());
    CHECK(solve_quadratic_branch({0, 0, 0}).status == QuadStatus::Continuum);
    CHECK_THROWS_AS(solve_quadratic_branch({0, 0, 0}, 0, 0, true), Error);
    CHECK(solve_quadratic_branch({0, 2, -1}).status == QuadStatus::Linear);
    auto cert = solve_quadratic_branch({1, -1, 0.1875}, 1e-3);
    for (const auto& c : cert.roots) {
      CHECK(c.enclosure_certified);
      CHECK(c.lo < c.root);
      CHECK(c.hi > c.root);
    }
  }

  TEST_CASE("exponents") {
    CHECK(alpha_exact(0, Rational(1, 5), Kind::Global, 1) == Rational(5, 21));
    CHECK(alpha_exact(2, 0, Kind::Global, 2) == Rational(1));
    CHECK(alpha_exact(3, 0, Kind::Blowup, 1) == Rational(-3, 4));
    CHECK_THROWS_AS(alpha_exact(1, Rational(1, 10), Kind::Blowup, 1), Error);
    CHECK(alpha_expansion(1, 0.1, Kind::Blowup, 1, -0.0625) == doctest::Approx(-0.25 - 0.00625));
    // at n = 0 the shifted eigenvalue is alpha - (k + N)/4
    CHECK(spectrum_shift(0.25, 0, 1, 1) == doctest::Approx(-0.25));
  }

  TEST_CASE("rescaled eigenfunctions solve the shifted problem") {
    const auto& t = fixture::table1d();
    for (int k : {0, 1, 3}) CHECK(spectrum_shift_residual(0.3, 0.2, k, t) < 1e-6);
  }
}
