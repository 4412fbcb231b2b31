#include "tfe/spectral.hpp"

#include <cmath>

namespace tfe {

namespace {

Rational factorial_q(int j) {
  Rational r = 1;
  for (int i = 2; i <= j; ++i) r *= i;
  return r;
}

double weight_fn(Weight w, double a, double r) {
  switch (w) {
    case Weight::None: return 1.0;
    case Weight::Rho: return std::exp(a * std::pow(r, 4.0 / 3.0));
    case Weight::RhoStar: return std::exp(-a * std::pow(r, 4.0 / 3.0));
  }
  return 1.0;
}

}  // namespace

SampledFunction eigenfunction(const MultiIndex& beta, const KernelTable& table) {
  if (beta.order() > table.K || !table.has(beta))
    throw Error(ErrorKind::OrderExceeded, "|beta|=" + std::to_string(beta.order()) + " > K=" + std::to_string(table.K));
  double s = ((beta.order() % 2) ? -1.0 : 1.0) / std::sqrt(static_cast<double>(beta.factorial()));
  SampledFunction f(table.grid, table.at(beta));
  for (double& x : f.v) x *= s;
  f.spectral[beta] = s;
  return f;
}

SparsePolynomial adjoint_polynomial(const MultiIndex& beta) {
  SparsePolynomial term = SparsePolynomial::monomial(beta);
  SparsePolynomial p = term;
  for (int j = 1; 4 * j <= beta.order(); ++j) {
    term = term.bilaplacian();
    p = p + term.scaled(Rational(1) / factorial_q(j));
  }
  p.normalizer = beta.factorial();
  return p;
}

EigenPair eigen_pair(const MultiIndex& beta, const KernelTable& table) {
  return {beta, Rational(-beta.order(), 4), eigenfunction(beta, table), adjoint_polynomial(beta)};
}

SparsePolynomial apply_B_star(const SparsePolynomial& p) {
  return p.bilaplacian().scaled(-1) - p.euler().scaled(Rational(1, 4));
}

SampledFunction sample_polynomial(const Grid& g, const SparsePolynomial& p) {
  std::vector<std::pair<MultiIndex, double>> t;
  double s = 1.0 / std::sqrt(static_cast<double>(p.normalizer));
  for (const auto& [b, c] : p.terms) t.emplace_back(b, c.convert_to<double>() * s);
  SampledFunction f(g);
  double y[2];
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.node(i, y);
    double v = 0;
    for (const auto& [b, c] : t) {
      double m = c;
      for (int k = 0; k < p.N; ++k) m *= std::pow(y[k], b[k]);
      v += m;
    }
    f.v[i] = v;
  }
  return f;
}

SampledFunction apply_B_fd(const SampledFunction& f, double tail_tol) {
  const Grid& g = f.grid;
  if (g.radial) throw Error(ErrorKind::GridMismatch, "apply_B needs a Cartesian grid");
  const int n = g.per_axis();
  const double h = g.h;
  const int gh = 3;
  SampledFunction out(g);
  auto at = [&](int i, int j) { return g.N == 1 ? f.v[i] : f.v[static_cast<std::size_t>(i) * n + j]; };
  // boundary band must already be negligible
  double band = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    int i = g.N == 1 ? static_cast<int>(idx) : static_cast<int>(idx / n);
    int j = g.N == 1 ? gh : static_cast<int>(idx % n);
    bool edge = i < gh || i >= n - gh || j < gh || j >= n - gh;
    if (edge) band = std::max(band, std::abs(f.v[idx]));
  }
  if (band > tail_tol)
    throw Error(ErrorKind::BoundaryContamination, "stencil reaches boundary where |f| = " + std::to_string(band));
  auto d1 = [&](auto&& F, int k) { return (F(k - 2) - 8 * F(k - 1) + 8 * F(k + 1) - F(k + 2)) / (12 * h); };
  auto d2 = [&](auto&& F, int k) {
    return (-F(k - 2) + 16 * F(k - 1) - 30 * F(k) + 16 * F(k + 1) - F(k + 2)) / (12 * h * h);
  };
  auto d4 = [&](auto&& F, int k) {
    return (-F(k - 3) + 12 * F(k - 2) - 39 * F(k - 1) + 56 * F(k) - 39 * F(k + 1) + 12 * F(k + 2) - F(k + 3)) /
           (6 * h * h * h * h);
  };
  if (g.N == 1) {
    for (int i = gh; i < n - gh; ++i) {
      auto F = [&](int k) { return f.v[k]; };
      double y = g.coord(i);
      out.v[i] = -d4(F, i) + 0.25 * y * d1(F, i) + 0.25 * f.v[i];
    }
    return out;
  }
  parallel_for(static_cast<std::size_t>(n - 2 * gh), [&](std::size_t ii) {
    int i = static_cast<int>(ii) + gh;
    double y1 = g.coord(i);
    for (int j = gh; j < n - gh; ++j) {
      double y2 = g.coord(j);
      auto Fx = [&](int k) { return at(k, j); };
      auto Fy = [&](int k) { return at(i, k); };
      // mixed term: d2 along axis 1 of (d2 along axis 2)
      auto D2y = [&](int k) {
        auto G = [&](int m) { return at(k, m); };
        return d2(G, j);
      };
      double bil = d4(Fx, i) + d4(Fy, j) + 2 * d2(D2y, i);
      out.v[static_cast<std::size_t>(i) * n + j] =
          -bil + 0.25 * (y1 * d1(Fx, i) + y2 * d1(Fy, j)) + 0.5 * at(i, j);
    }
  });
  return out;
}

SampledFunction apply_B(const SampledFunction& f, const KernelTable* table, double tail_tol) {
  const int N = f.grid.N;
  if (table && f.has_spectral() && table->grid.same_as(f.grid)) {
    bool ok = true;
    for (const auto& [b, c] : f.spectral) {
      for (int i = 0; i < N; ++i) {
        MultiIndex b4 = b;
        b4.c[i] += 4;
        if (!table->has(b4) || !table->has(b.unit(i))) ok = false;
      }
      if (N == 2) {
        MultiIndex b22 = b;
        b22.c[0] += 2;
        b22.c[1] += 2;
        if (!table->has(b22)) ok = false;
      }
    }
    if (ok) {
      SampledFunction out(f.grid);
      out.spectral.clear();
      const Grid& g = f.grid;
      double y[2];
      for (const auto& [b, c] : f.spectral) {
        const auto& v0 = table->at(b);
        std::vector<const std::vector<double>*> d4s, d1s;
        for (int i = 0; i < N; ++i) {
          MultiIndex b4 = b;
          b4.c[i] += 4;
          d4s.push_back(&table->at(b4));
          d1s.push_back(&table->at(b.unit(i)));
        }
        const std::vector<double>* mixed = nullptr;
        if (N == 2) {
          MultiIndex b22 = b;
          b22.c[0] += 2;
          b22.c[1] += 2;
          mixed = &table->at(b22);
        }
        for (std::size_t k = 0; k < g.size(); ++k) {
          g.node(k, y);
          double bil = 0, adv = 0;
          for (int i = 0; i < N; ++i) {
            bil += (*d4s[i])[k];
            adv += y[i] * (*d1s[i])[k];
          }
          if (mixed) bil += 2 * (*mixed)[k];
          out.v[k] += c * (-bil + 0.25 * adv + 0.25 * N * v0[k]);
        }
      }
      return out;
    }
  }
  return apply_B_fd(f, tail_tol);
}

double inner_product(const SampledFunction& f, const SampledFunction& g, Weight w, double a) {
  if (!f.grid.same_as(g.grid)) throw Error(ErrorKind::GridMismatch, "inner product on different grids");
  double s = 0;
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    double wt = f.grid.weight(i);
    if (w != Weight::None) wt *= weight_fn(w, a, f.grid.abs_y(i));
    s += wt * f.v[i] * g.v[i];
  }
  return s;
}

double inner_product(const SampledFunction& f, const SparsePolynomial& p, Weight w, double a) {
  if (p.N != f.grid.N) throw Error(ErrorKind::GridMismatch, "polynomial dimension differs from grid");
  return inner_product(f, sample_polynomial(f.grid, p), w, a);
}

GramReport orthogonality_matrix(int kmax, const KernelTable& table) {
  if (kmax > table.K) throw Error(ErrorKind::OrderExceeded, "kmax > table K");
  GramReport r;
  r.betas = multi_indices_upto(table.grid.N, kmax);
  const std::size_t m = r.betas.size();
  std::vector<SampledFunction> psi(m), adj(m);
  for (std::size_t i = 0; i < m; ++i) {
    psi[i] = eigenfunction(r.betas[i], table);
    adj[i] = sample_polynomial(table.grid, adjoint_polynomial(r.betas[i]));
  }
  r.G = Eigen::MatrixXd::Zero(m, m);
  parallel_for(m * m, [&](std::size_t job) {
    std::size_t i = job / m, j = job % m;
    r.G(i, j) = inner_product(psi[i], adj[j]);
  });
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j)
        r.max_diag_dev = std::max(r.max_diag_dev, std::abs(r.G(i, j) - 1.0));
      else
        r.max_offdiag = std::max(r.max_offdiag, std::abs(r.G(i, j)));
    }
  return r;
}

double eigen_residual(const MultiIndex& beta, const KernelTable& table, double inner, bool fd) {
  auto psi = eigenfunction(beta, table);
  auto Bpsi = fd ? apply_B_fd(psi, 1e300) : apply_B(psi, &table);
  double lam = beta.order() / 4.0;
  double m = 0;
  for (std::size_t i = 0; i < psi.v.size(); ++i)
    if (table.grid.inner(i, inner)) m = std::max(m, std::abs(Bpsi.v[i] + lam * psi.v[i]));
  return m;
}

}  // namespace tfe
