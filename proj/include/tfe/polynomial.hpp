#pragma once

#include <map>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "tfe/common.hpp"

namespace tfe {

using Rational = boost::multiprecision::cpp_rational;

// Exact multivariate polynomial. The represented value is terms / sqrt(normalizer).
struct SparsePolynomial {
  int N = 1;
  std::map<MultiIndex, Rational> terms;
  std::uint64_t normalizer = 1;

  SparsePolynomial() = default;
  explicit SparsePolynomial(int n) : N(n) {}

  static SparsePolynomial monomial(const MultiIndex& b, const Rational& c = 1);
  static SparsePolynomial constant(int N, const Rational& c);

  void add_term(const MultiIndex& b, const Rational& c);
  int degree() const;
  bool is_zero() const { return terms.empty(); }

  SparsePolynomial operator+(const SparsePolynomial& o) const;
  SparsePolynomial operator-(const SparsePolynomial& o) const;
  SparsePolynomial scaled(const Rational& c) const;

  SparsePolynomial derivative(int axis) const;
  SparsePolynomial laplacian() const;
  SparsePolynomial bilaplacian() const;
  // y . grad p: each monomial scaled by its degree
  SparsePolynomial euler() const;

  double eval(const double* y) const;  // includes 1/sqrt(normalizer)
  void gradient(const double* y, double* g) const;
  std::string to_string() const;
};

bool exactly_equal(const SparsePolynomial& a, const SparsePolynomial& b);

}  // namespace tfe
