#include "tfe/semigroup.hpp"

#include <cmath>

#include <boost/math/special_functions/hermite.hpp>

namespace tfe {

namespace {

double boundary_max(const SampledFunction& f) {
  const Grid& g = f.grid;
  const int n = g.per_axis();
  double m = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    int i = g.N == 1 ? static_cast<int>(idx) : static_cast<int>(idx / n);
    int j = g.N == 1 ? 1 : static_cast<int>(idx % n);
    if (i == 0 || i == n - 1 || (g.N == 2 && (j == 0 || j == n - 1))) m = std::max(m, std::abs(f.v[idx]));
  }
  return m;
}

// 4-point Lagrange weights for offset t in [0,1) between nodes 1 and 2 of (0,1,2,3)
void lagrange4(double t, double* w) {
  double u = t + 1.0;  // position relative to node 0
  w[0] = -(u - 1) * (u - 2) * (u - 3) / 6.0;
  w[1] = u * (u - 2) * (u - 3) / 2.0;
  w[2] = -u * (u - 1) * (u - 3) / 2.0;
  w[3] = u * (u - 1) * (u - 2) / 6.0;
}

}  // namespace

double moments(const SampledFunction& u0, const MultiIndex& beta, double tail_tol) {
  if (boundary_max(u0) > tail_tol) throw Error(ErrorKind::TailTooFat, "initial data does not decay at the grid boundary");
  const Grid& g = u0.grid;
  double y[2];
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.node(i, y);
    double m = u0.v[i] * g.weight(i);
    for (int k = 0; k < g.N; ++k) m *= std::pow(y[k], beta[k]);
    s += m;
  }
  return s / std::sqrt(static_cast<double>(beta.factorial()));
}

EvolutionState spectral_solution(const SampledFunction& u0, double tau, int kmax, const KernelTable& table,
                                 double tail_tol) {
  if (tau < 0) throw Error(ErrorKind::ConfigError, "tau must be non-negative");
  if (kmax > table.K) throw Error(ErrorKind::OrderExceeded, "kmax > table K");
  EvolutionState st;
  st.grid = table.grid;
  st.tau = tau;
  st.provenance = "spectral";
  st.values.assign(table.grid.size(), 0.0);
  double msum = 0;
  for (const auto& b : multi_indices_upto(table.grid.N, kmax)) {
    double M = moments(u0, b, tail_tol);
    msum += std::abs(M);
    auto psi = eigenfunction(b, table);
    double c = std::exp(-b.order() * tau / 4.0) * M;
    for (std::size_t i = 0; i < psi.v.size(); ++i) st.values[i] += c * psi.v[i];
  }
  st.truncation_estimate = std::exp(-(kmax + 1) * tau / 4.0) * msum;
  return st;
}

namespace {

bool in_table(const Grid& g, const double* y) {
  const int n = g.per_axis();
  for (int a = 0; a < g.N; ++a) {
    int i = static_cast<int>(std::floor((y[a] - g.coord(0)) / g.h));
    if (i < 1 || i + 2 > n - 1) return false;
  }
  return true;
}

}  // namespace

double interpolate(const KernelTable& table, const MultiIndex& beta, const double* y) {
  const Grid& g = table.grid;
  const auto& v = table.at(beta);
  const int n = g.per_axis();
  const double x0 = g.coord(0);
  int base[2];
  double w[2][4];
  for (int a = 0; a < g.N; ++a) {
    double s = (y[a] - x0) / g.h;
    int i = static_cast<int>(std::floor(s));
    if (i < 1 || i + 2 > n - 1)
      throw Error(ErrorKind::InterpolationOutOfRange, "point " + std::to_string(y[a]) + " outside the kernel table");
    base[a] = i - 1;
    lagrange4(s - i, w[a]);
  }
  if (g.N == 1) {
    double r = 0;
    for (int k = 0; k < 4; ++k) r += w[0][k] * v[base[0] + k];
    return r;
  }
  double r = 0;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      r += w[0][k] * w[1][l] * v[static_cast<std::size_t>(base[0] + k) * n + base[1] + l];
  return r;
}

EvolutionState convolution_solution(const SampledFunction& u0, double tau, const KernelTable& table, double r_out) {
  if (tau < 0) throw Error(ErrorKind::ConfigError, "tau must be non-negative");
  const int N = table.grid.N;
  if (u0.grid.N != N) throw Error(ErrorKind::GridMismatch, "initial data dimension differs from table");
  if (r_out <= 0) r_out = table.grid.R / 2;
  Grid out = Grid::make(N, table.grid.h, r_out);
  const double s = std::exp(-tau / 4.0);
  // support of u0 (fixed order of nodes keeps sums deterministic)
  double umax = sup_norm(u0.v);
  std::vector<std::size_t> supp;
  for (std::size_t i = 0; i < u0.v.size(); ++i)
    if (std::abs(u0.v[i]) > 1e-17 * umax) supp.push_back(i);
  MultiIndex zero(std::vector<int>(N, 0));
  EvolutionState st;
  st.grid = out;
  st.tau = tau;
  st.provenance = "convolution";
  st.values.assign(out.size(), 0.0);
  parallel_for(out.size(), [&](std::size_t k) {
    double y[2], z[2], p[2];
    out.node(k, y);
    double acc = 0;
    for (std::size_t i : supp) {
      u0.grid.node(i, z);
      double r2 = 0;
      for (int a = 0; a < N; ++a) {
        p[a] = y[a] - z[a] * s;
        r2 += p[a] * p[a];
      }
      if (!in_table(table.grid, p)) {
        // beyond the table F is bounded by the fitted decay envelope
        double bound = std::abs(u0.v[i]) * table.D_fit * std::exp(-table.d_fit * std::pow(r2, 2.0 / 3.0));
        if (bound > 1e-13 * umax) interpolate(table, zero, p);  // throws
        continue;
      }
      acc += u0.grid.weight(i) * u0.v[i] * interpolate(table, zero, p);
    }
    st.values[k] = acc;
  });
  return st;
}

SampledFunction moment_cancelled(const SampledFunction& seed, int k, const KernelTable& table) {
  SampledFunction u(seed.grid, seed.v);
  for (const auto& b : multi_indices_upto(table.grid.N, k - 1)) {
    double c = inner_product(seed, adjoint_polynomial(b));
    auto psi = eigenfunction(b, table);
    for (std::size_t i = 0; i < u.v.size(); ++i) u.v[i] -= c * psi.v[i];
  }
  return u;
}

SampledFunction decay_test_data(int k, const KernelTable& table, double sigma) {
  const int N = table.grid.N;
  auto seed = sample(table.grid, [&](const double* y) {
    double r2 = 0;
    for (int a = 0; a < N; ++a) r2 += y[a] * y[a];
    return boost::math::hermite(k, y[0] / sigma) * std::exp(-r2 / (sigma * sigma));
  });
  return moment_cancelled(seed, k, table);
}

DecayFitResult decay_rate_fit(const SampledFunction& u0, const std::vector<double>& taus, const KernelTable& table) {
  DecayFitResult r;
  const double a = table.d_fit / 2;
  for (double t : taus) {
    auto w = convolution_solution(u0, t, table).as_function();
    double nrm = std::sqrt(inner_product(w, w, Weight::Rho, a));
    if (nrm < 1e-12) break;
    r.taus.push_back(t);
    r.norms.push_back(nrm);
  }
  if (r.taus.size() < 3) throw Error(ErrorKind::InsufficientDecay, "fewer than 3 usable fit points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = static_cast<double>(r.taus.size());
  for (std::size_t i = 0; i < r.taus.size(); ++i) {
    double x = r.taus[i], yv = std::log(r.norms[i]);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
  }
  r.lambda = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return r;
}

SampledFunction restrict_to(const SampledFunction& f, const Grid& inner) {
  const Grid& g = f.grid;
  if (g.N != inner.N || std::abs(g.h - inner.h) > 1e-14 * g.h || inner.R > g.R + 1e-12)
    throw Error(ErrorKind::GridMismatch, "restriction needs a nested grid with equal spacing");
  const int n = g.per_axis(), m = inner.per_axis();
  const int off = (n - m) / 2;
  SampledFunction r(inner);
  for (std::size_t k = 0; k < inner.size(); ++k) {
    if (g.N == 1) {
      r.v[k] = f.v[k + off];
    } else {
      int i = static_cast<int>(k / m), j = static_cast<int>(k % m);
      r.v[k] = f.v[static_cast<std::size_t>(i + off) * n + j + off];
    }
  }
  return r;
}

}  // namespace tfe
