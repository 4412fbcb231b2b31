#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "tfe/spectral.hpp"

using namespace tfe;

namespace {

// -Lap^2 p - (1/4) y.grad p on a 1D coefficient map, test-side
std::map<int, double> bstar_1d(const std::map<int, double>& p) {
  std::map<int, double> r;
  for (auto [d, c] : p) {
    if (d >= 4) r[d - 4] -= c * d * (d - 1) * (d - 2) * (d - 3);
    r[d] -= 0.25 * d * c;
  }
  return r;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("multi-index bookkeeping") {
    CHECK(MultiIndex{2, 1}.order() == 3);
    CHECK(MultiIndex{2, 3}.factorial() == 12);
    CHECK(MultiIndex{1, 0}.label() == "1.0");
    for (int k = 0; k <= 4; ++k) CHECK(multi_indices(2, k).size() == static_cast<std::size_t>(k + 1));
    auto v = multi_indices_upto(2, 2);
    CHECK(v.front() == MultiIndex{0, 0});
    CHECK(v[1] == MultiIndex{1, 0});
  }

  TEST_CASE("adjoint polynomials match the closed form in 1D") {
    for (int b = 0; b <= 12; ++b) {
      SparsePolynomial p = adjoint_polynomial(MultiIndex{b});
      auto ref = oracle::hermite_1d(b);
      CHECK(p.terms.size() == ref.size());
      for (auto [d, c] : ref) {
        double got = p.terms.at(MultiIndex{d}).convert_to<double>() / std::sqrt(static_cast<double>(p.normalizer));
        CHECK(got == doctest::Approx(c).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("adjoint eigen-identity is exact") {
    for (int b = 0; b <= 12; ++b) {
      SparsePolynomial p = adjoint_polynomial(MultiIndex{b});
      CHECK(exactly_equal(apply_B_star(p), p.scaled(Rational(-b, 4))));
    }
    for (int k = 0; k <= 8; ++k)
      for (const auto& b : multi_indices(2, k)) {
        SparsePolynomial p = adjoint_polynomial(b);
        CHECK(exactly_equal(apply_B_star(p), p.scaled(Rational(-k, 4))));
      }
  }

  TEST_CASE("test-side adjoint operator agrees in double precision") {
    for (int b = 0; b <= 9; ++b) {
      auto ref = oracle::hermite_1d(b);
      auto r = bstar_1d(ref);
      for (auto [d, c] : r) {
        double want = ref.count(d) ? -b / 4.0 * ref.at(d) : 0.0;
        CHECK(c == doctest::Approx(want).epsilon(1e-12).scale(1));
      }
    }
  }

  TEST_CASE("1D Gram matrix against exact moments") {
    const auto& t = fixture::table1d();
    GramReport g = orthogonality_matrix(5, t);
    double dev = 0, oracle_dev = 0;
    for (std::size_t i = 0; i < g.betas.size(); ++i)
      for (std::size_t j = 0; j < g.betas.size(); ++j) {
        double exact = oracle::gram_entry(g.betas[i].c, adjoint_polynomial(g.betas[j]));
        oracle_dev = std::max(oracle_dev, std::abs(exact - (i == j)));
        dev = std::max(dev, std::abs(g.G(i, j) - exact));
      }
    CHECK(oracle_dev < 1e-10);
    CHECK(dev < 1e-5);
  }

  TEST_CASE("2D Gram matrix against exact moments") {
    const auto& t = fixture::table2d();
    GramReport g = orthogonality_matrix(3, t);
    double dev = 0;
    for (std::size_t i = 0; i < g.betas.size(); ++i)
      for (std::size_t j = 0; j < g.betas.size(); ++j) {
        double exact = oracle::gram_entry(g.betas[i].c, adjoint_polynomial(g.betas[j]));
        CHECK(std::abs(exact - (i == j)) < 1e-10);
        dev = std::max(dev, std::abs(g.G(i, j) - exact));
      }
    CHECK(dev < 1e-3);
  }

  TEST_CASE("eigen-residuals by both routes") {
    const auto& t = fixture::table1d();
    for (int b = 0; b <= 5; ++b) {
      CHECK(eigen_residual(MultiIndex{b}, t) < 1e-4);
      CHECK(eigen_residual(MultiIndex{b}, t, 0.8, true) < 1e-4);
    }
    const auto& t2 = fixture::table2d();
    for (const auto& b : multi_indices_upto(2, 2)) CHECK(eigen_residual(b, t2) < 1e-3);
  }

  TEST_CASE("polynomial algebra") {
    SparsePolynomial p = SparsePolynomial::monomial(MultiIndex{4}, 3);
    CHECK(exactly_equal(p.bilaplacian(), SparsePolynomial::constant(1, 72)));
    CHECK(exactly_equal(p.euler(), p.scaled(4)));
    CHECK((p - p).is_zero());
    SparsePolynomial q = SparsePolynomial::monomial(MultiIndex{2, 1});
    CHECK(exactly_equal(q.laplacian(), SparsePolynomial::monomial(MultiIndex{0, 1}, 2)));
    double y[2] = {1.5, -2.0};
    CHECK(q.eval(y) == doctest::Approx(-4.5));
  }

  TEST_CASE("kmax zero gives a single unit entry") {
    GramReport g = orthogonality_matrix(0, fixture::table1d());
    CHECK(g.G.rows() == 1);
    CHECK(g.G(0, 0) == doctest::Approx(1).epsilon(1e-6));
  }
}
