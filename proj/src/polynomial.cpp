#include "tfe/polynomial.hpp"

#include <cmath>
#include <sstream>

namespace tfe {

SparsePolynomial SparsePolynomial::monomial(const MultiIndex& b, const Rational& c) {
  SparsePolynomial p(b.dim());
  p.add_term(b, c);
  return p;
}

SparsePolynomial SparsePolynomial::constant(int N, const Rational& c) {
  return monomial(MultiIndex(std::vector<int>(N, 0)), c);
}

void SparsePolynomial::add_term(const MultiIndex& b, const Rational& c) {
  if (c == 0) return;
  auto it = terms.find(b);
  if (it == terms.end()) {
    terms.emplace(b, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms.erase(it);
}

int SparsePolynomial::degree() const {
  int d = -1;
  for (const auto& [b, c] : terms) d = std::max(d, b.order());
  return d;
}

SparsePolynomial SparsePolynomial::operator+(const SparsePolynomial& o) const {
  SparsePolynomial r = *this;
  for (const auto& [b, c] : o.terms) r.add_term(b, c);
  return r;
}

SparsePolynomial SparsePolynomial::operator-(const SparsePolynomial& o) const {
  SparsePolynomial r = *this;
  for (const auto& [b, c] : o.terms) r.add_term(b, -c);
  return r;
}

SparsePolynomial SparsePolynomial::scaled(const Rational& s) const {
  SparsePolynomial r(N);
  r.normalizer = normalizer;
  for (const auto& [b, c] : terms) r.add_term(b, c * s);
  return r;
}

SparsePolynomial SparsePolynomial::derivative(int axis) const {
  SparsePolynomial r(N);
  r.normalizer = normalizer;
  for (const auto& [b, c] : terms) {
    if (b[axis] == 0) continue;
    MultiIndex nb = b;
    nb.c[axis] -= 1;
    r.add_term(nb, c * b[axis]);
  }
  return r;
}

SparsePolynomial SparsePolynomial::laplacian() const {
  SparsePolynomial r(N);
  r.normalizer = normalizer;
  for (int i = 0; i < N; ++i) r = r + derivative(i).derivative(i);
  return r;
}

SparsePolynomial SparsePolynomial::bilaplacian() const { return laplacian().laplacian(); }

SparsePolynomial SparsePolynomial::euler() const {
  SparsePolynomial r(N);
  r.normalizer = normalizer;
  for (const auto& [b, c] : terms) r.add_term(b, c * b.order());
  return r;
}

double SparsePolynomial::eval(const double* y) const {
  double s = 0;
  for (const auto& [b, c] : terms) {
    double m = c.convert_to<double>();
    for (int i = 0; i < N; ++i) m *= std::pow(y[i], b[i]);
    s += m;
  }
  return s / std::sqrt(static_cast<double>(normalizer));
}

void SparsePolynomial::gradient(const double* y, double* g) const {
  for (int i = 0; i < N; ++i) g[i] = derivative(i).eval(y);
}

std::string SparsePolynomial::to_string() const {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << it->second;
    for (int i = 0; i < N; ++i)
      if (it->first[i] > 0) os << "*y" << (N > 1 ? std::to_string(i + 1) : "") << "^" << it->first[i];
  }
  if (first) os << "0";
  os << ")/sqrt(" << normalizer << ")";
  return os.str();
}

bool exactly_equal(const SparsePolynomial& a, const SparsePolynomial& b) {
  return a.N == b.N && a.normalizer == b.normalizer && a.terms == b.terms;
}

}  // namespace tfe
