#include "tfe/branching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/numeric/interval.hpp>
#include <Eigen/Eigenvalues>

namespace tfe {

namespace {

constexpr double kPi = std::numbers::pi;

double eigen_scale(const MultiIndex& b) {
  return ((b.order() % 2) ? -1.0 : 1.0) / std::sqrt(static_cast<double>(b.factorial()));
}

MultiIndex add_axis(const MultiIndex& b, int a, int times) {
  MultiIndex r = b;
  r.c[a] += times;
  return r;
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

LogField empty_field(const Grid& g) {
  LogField f;
  f.grid = g;
  f.v.assign(g.size(), 0.0);
  f.grad.assign(g.N, std::vector<double>(g.size(), 0.0));
  f.gradlap.assign(g.N, std::vector<double>(g.size(), 0.0));
  f.bilap.assign(g.size(), 0.0);
  return f;
}

// pi cot(pi t) - 1/t, smooth at t = 0
double cot_minus_pole(double t) {
  if (std::abs(t) < 1e-4) return -kPi * kPi * t / 3.0;
  return kPi / std::tan(kPi * t) - 1.0 / t;
}

// ln|t| - ln|2 sin(pi t)|, smooth at t = 0
double log_minus_sine(double t) {
  if (std::abs(t) < 1e-4) return -std::log(2 * kPi) + kPi * kPi * t * t / 6.0;
  return std::log(std::abs(t)) - std::log(std::abs(2 * std::sin(kPi * t)));
}

double dot_grad(const LogField& a, const LogField& b, std::size_t i, bool b_gradlap) {
  double s = 0;
  for (int k = 0; k < a.grid.N; ++k) s += a.grad[k][i] * (b_gradlap ? b.gradlap[k][i] : b.grad[k][i]);
  return s;
}

}  // namespace

const char* kind_name(Kind k) { return k == Kind::Global ? "global" : "blowup"; }

Kind parse_kind(const std::string& s) {
  if (s == "global") return Kind::Global;
  if (s == "blowup" || s == "blow-up") return Kind::Blowup;
  throw Error(ErrorKind::ConfigError, "unknown kind '" + s + "'");
}

LogField field_from_kernel(const std::map<MultiIndex, double>& combo, const KernelTable& table) {
  const Grid& g = table.grid;
  const int N = g.N;
  LogField f = empty_field(g);
  auto need = [&](const MultiIndex& b) -> const std::vector<double>& {
    if (!table.has(b)) throw Error(ErrorKind::OrderExceeded, "table lacks D^" + b.label() + " F");
    return table.at(b);
  };
  for (const auto& [beta, c] : combo) {
    axpy(f.v, c, need(beta));
    for (int a = 0; a < N; ++a) {
      axpy(f.grad[a], c, need(beta.unit(a)));
      for (int b = 0; b < N; ++b) axpy(f.gradlap[a], c, need(add_axis(beta.unit(a), b, 2)));
    }
    if (N == 1) {
      axpy(f.bilap, c, need(add_axis(beta, 0, 4)));
    } else {
      axpy(f.bilap, c, need(add_axis(beta, 0, 4)));
      axpy(f.bilap, 2 * c, need(add_axis(add_axis(beta, 0, 2), 1, 2)));
      axpy(f.bilap, c, need(add_axis(beta, 1, 4)));
    }
  }
  return f;
}

LogField field_from_eigenfunction(const MultiIndex& beta, const KernelTable& table) {
  return field_from_kernel({{beta, eigen_scale(beta)}}, table);
}

LogField field_from_polynomial(const SparsePolynomial& p, const Grid& grid) {
  LogField f;
  f.grid = grid;
  f.v = sample_polynomial(grid, p).v;
  SparsePolynomial lap = p.laplacian();
  bool zero = true;
  for (int a = 0; a < grid.N; ++a) {
    f.grad.push_back(sample_polynomial(grid, p.derivative(a)).v);
    SparsePolynomial gl = lap.derivative(a);
    zero = zero && gl.is_zero();
    f.gradlap.push_back(sample_polynomial(grid, gl).v);
  }
  f.bilap = sample_polynomial(grid, p.bilaplacian()).v;
  f.zero_gradlap = zero && p.bilaplacian().is_zero();
  return f;
}

LogField combine(const std::vector<double>& c, const std::vector<LogField>& fields) {
  if (c.size() != fields.size() || fields.empty()) throw Error(ErrorKind::GridMismatch, "combine: size mismatch");
  const Grid& g = fields[0].grid;
  LogField f = empty_field(g);
  f.zero_gradlap = true;
  for (std::size_t m = 0; m < c.size(); ++m) {
    const LogField& x = fields[m];
    if (!x.grid.same_as(g)) throw Error(ErrorKind::GridMismatch, "combine: grids differ");
    axpy(f.v, c[m], x.v);
    for (int a = 0; a < g.N; ++a) {
      axpy(f.grad[a], c[m], x.grad[a]);
      axpy(f.gradlap[a], c[m], x.gradlap[a]);
    }
    axpy(f.bilap, c[m], x.bilap);
    f.zero_gradlap = f.zero_gradlap && x.zero_gradlap;
  }
  return f;
}

LogIntegral log_weighted_integral(const LogField& adj, const LogField& combo, const LogField& target,
                                  const LogIntegralOptions& opt) {
  const Grid& g = combo.grid;
  if (!adj.grid.same_as(g) || !target.grid.same_as(g)) throw Error(ErrorKind::GridMismatch, "log integral grids differ");
  const std::size_t n = g.size();
  const int N = g.N;
  LogIntegral out;
  out.l8_scale = std::exp(-1.0 / opt.n_floor) / opt.n_floor;

  double cmax = 0, tmax = 0;
  std::vector<double> tgt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = std::abs(target.bilap[i]);
    for (int a = 0; a < N; ++a) t += std::abs(target.gradlap[a][i]);
    tgt[i] = t;
    cmax = std::max(cmax, std::abs(combo.v[i]));
    tmax = std::max(tmax, t);
  }
  if (cmax == 0) throw Error(ErrorKind::ThickNodalSet, "combination vanishes identically");
  if (target.zero_gradlap || tmax == 0) return out;

  // thick zero set: combo tiny where the target is not. An isolated node sitting on a
  // transversal zero is not counted; a near-zero node with a near-zero neighbour is.
  auto tiny = [&](std::size_t i) { return std::abs(combo.v[i]) < 1e-12 * cmax; };
  const int na = g.per_axis();
  std::size_t support = 0, near = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tgt[i] <= 1e-6 * tmax) continue;
    ++support;
    if (!tiny(i)) continue;
    bool nb = false;
    if (N == 1 || g.radial) {
      nb = (i > 0 && tiny(i - 1)) || (i + 1 < n && tiny(i + 1));
    } else {
      std::size_t r = i / na, c = i % na;
      nb = (r > 0 && tiny(i - na)) || (r + 1 < static_cast<std::size_t>(na) && tiny(i + na)) ||
           (c > 0 && tiny(i - 1)) || (c + 1 < static_cast<std::size_t>(na) && tiny(i + 1));
    }
    if (nb) ++near;
  }
  out.near_zero_fraction = support ? static_cast<double>(near) / support : 0.0;
  if (out.near_zero_fraction > opt.thick_fraction)
    throw Error(ErrorKind::ThickNodalSet, "near-zero fraction " + std::to_string(out.near_zero_fraction));

  const double cut = std::exp(-1.0 / opt.n_floor);
  std::vector<double> act(n);
  double amax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double ga = 0;
    for (int a = 0; a < N; ++a) ga += std::abs(adj.grad[a][i]);
    act[i] = (std::abs(adj.v[i]) + ga) * tgt[i];
    amax = std::max(amax, act[i]);
  }
  std::vector<char> excluded(n, 0);
  double direct = 0, ibp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (act[i] <= 1e-14 * amax) continue;
    double w = g.weight(i);
    if (std::abs(combo.v[i]) < cut) {
      excluded[i] = 1;
      out.excluded_measure += w;
      continue;
    }
    double c = combo.v[i];
    double lc = std::log(std::abs(c));
    direct += w * adj.v[i] * (dot_grad(combo, target, i, true) / c + lc * target.bilap[i]);
    ibp -= w * lc * dot_grad(adj, target, i, true);
  }

  if (N == 1 && !g.radial && opt.singular_corrections) {
    const double h = g.h;
    const int m = static_cast<int>(n);
    struct Zero {
      double z, mult;
    };
    std::vector<Zero> zeros;
    auto hermite_root = [&](int i, int k) {
      // cubic Hermite interpolant of combo on [y_i, y_k], bisection
      const double hk = (k - i) * h;
      double c0 = combo.v[i], c1 = combo.v[k], d0 = combo.grad[0][i] * hk, d1 = combo.grad[0][k] * hk;
      auto H = [&](double t) {
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * c0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * c1 + (t3 - t2) * d1;
      };
      double lo = 0, hi = 1, flo = H(0);
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi), fm = H(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return g.coord(i) + 0.5 * (lo + hi) * hk;
    };
    auto is_active = [&](int i) { return act[i] > 1e-14 * amax; };
    for (int i = 0; i + 1 < m; ++i) {
      if (excluded[i] || excluded[i + 1] || (!is_active(i) && !is_active(i + 1))) continue;
      if ((combo.v[i] < 0) != (combo.v[i + 1] < 0)) zeros.push_back({hermite_root(i, i + 1), 1.0});
    }
    // short runs of excluded nodes: zero location and multiplicity from the two flanking nodes,
    // where c/c' = (y - z)/mult
    for (int i = 0; i < m;) {
      if (!excluded[i]) {
        ++i;
        continue;
      }
      int j = i;
      while (j + 1 < m && excluded[j + 1]) ++j;
      int l = i - 1, r = j + 1;
      if (j - i < 4 && l >= 0 && r < m && combo.grad[0][l] != 0 && combo.grad[0][r] != 0) {
        double rl = combo.v[l] / combo.grad[0][l], rr = combo.v[r] / combo.grad[0][r];
        if (rr - rl > 0) {
          double mult = std::max(1.0, std::round((g.coord(r) - g.coord(l)) / (rr - rl)));
          double z = g.coord(l) - (g.coord(r) - g.coord(l)) / (rr - rl) * rl;
          // a simple zero is located exactly by the Hermite cubic
          if (mult == 1 && j == i && (combo.v[l] < 0) != (combo.v[r] < 0)) z = hermite_root(l, r);
          if (z > g.coord(l) && z < g.coord(r)) zeros.push_back({z, mult});
        }
      }
      i = j + 1;
    }
    std::sort(zeros.begin(), zeros.end(), [](const Zero& a, const Zero& b) { return a.z < b.z; });
    const double y0 = g.coord(0);
    for (const Zero& zz : zeros) {
      const double z = zz.z, mult = zz.mult;
      int il = static_cast<int>(std::floor((z - y0) / h));
      if (il < 0 || il + 1 >= m) continue;
      if (!is_active(il) && !is_active(il + 1)) continue;
      double th = (g.coord(il) - z) / h;  // in (-1, 0]
      if (th > 0) th = 0;
      double t = -th;
      // 4-point Lagrange through il-1..il+2, linear at the box edge
      auto lerp = [&](auto&& fn) {
        if (il < 1 || il + 2 >= m) return (1 - t) * fn(il) + t * fn(il + 1);
        const double u = t + 1;
        return -(u - 1) * (u - 2) * (u - 3) / 6 * fn(il - 1) + u * (u - 2) * (u - 3) / 2 * fn(il) -
               u * (u - 1) * (u - 3) / 2 * fn(il + 1) + u * (u - 1) * (u - 2) / 6 * fn(il + 2);
      };
      // local forms: pole A/(y - z) in the direct sum, log terms mult*ln|y - z| times a smooth factor
      double A = mult * lerp([&](int j) { return adj.v[j] * target.gradlap[0][j]; });
      double lb = mult * lerp([&](int j) { return adj.v[j] * target.bilap[j]; });
      double a = mult * lerp([&](int j) { return -adj.grad[0][j] * target.gradlap[0][j]; });
      // excluded nodes near z are already missing from both sums
      int j0 = -100;
      double s0 = 0;
      for (int off = -2; off <= 3; ++off) {
        int j = il + off;
        if (j < 0 || j >= m || !excluded[j]) continue;
        double s = off + th;
        if (j0 == -100 || std::abs(s) < std::abs(s0)) {
          j0 = off;
          s0 = s;
        }
      }
      if (j0 == -100) {
        double lsin = std::log(std::abs(2 * std::sin(kPi * th)));
        direct -= A * kPi / std::tan(kPi * th) + h * lb * lsin;
        ibp -= h * a * lsin;
      } else {
        double rest_pole = 0, rest_log = 0;
        for (int off = -2; off <= 3; ++off) {
          int j = il + off;
          if (off == j0 || j < 0 || j >= m || !excluded[j]) continue;
          rest_pole += 1.0 / (off + th);
          rest_log += std::log(std::abs((off + th) * h));
        }
        double lfix = log_minus_sine(s0) + std::log(h) + rest_log;
        // regular parts at the dropped nodes, interpolated from the nearest retained nodes
        auto reg = [&](int j, bool direct_form) {
          double y = g.coord(j), c = combo.v[j], lc = std::log(std::abs(c)), d = y - z;
          double G = target.gradlap[0][j];
          if (direct_form) return adj.v[j] * (combo.grad[0][j] * G / c + lc * target.bilap[j]) - A / d - lb * std::log(std::abs(d));
          return -lc * adj.grad[0][j] * G - a * std::log(std::abs(d));
        };
        int l = il + j0, r = il + j0;
        while (l >= 0 && excluded[l]) --l;
        while (r < m && excluded[r]) ++r;
        if (l >= 0 && r < m) {
          for (int off = -2; off <= 3; ++off) {
            int j = il + off;
            if (j <= l || j >= r || !excluded[j]) continue;
            double u = static_cast<double>(j - l) / (r - l);
            direct += h * ((1 - u) * reg(l, true) + u * reg(r, true));
            ibp += h * ((1 - u) * reg(l, false) + u * reg(r, false));
          }
        }
        // cot has period 1, so pi cot(pi th) - 1/s0 is smooth in s0
        direct += -A * (cot_minus_pole(s0) - rest_pole) + h * lb * lfix;
        ibp += h * a * lfix;
      }
      ++out.zeros;
    }
  }
  out.direct = direct;
  out.ibp = ibp;
  out.value = ibp;
  out.discrepancy = std::abs(direct - ibp);
  return out;
}

double pairing_y_grad(const SampledFunction& phi, const MultiIndex& beta, const KernelTable& table) {
  const Grid& g = table.grid;
  if (!phi.grid.same_as(g)) throw Error(ErrorKind::GridMismatch, "pairing grid");
  double s = eigen_scale(beta), acc = 0;
  double y[2];
  for (int a = 0; a < g.N; ++a) {
    MultiIndex b = beta.unit(a);
    if (!table.has(b)) throw Error(ErrorKind::OrderExceeded, "table lacks D^" + b.label() + " F");
    const auto& d = table.at(b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.node(i, y);
      acc += g.weight(i) * phi.v[i] * y[a] * d[i];
    }
  }
  return s * acc;
}

Gamma01 gamma01(double eta, const KernelTable& table, double denom_tol) {
  const Grid& g = table.grid;
  const int N = g.N;
  MultiIndex zero(std::vector<int>(N, 0));
  SampledFunction one(g, std::vector<double>(g.size(), 1.0));
  Gamma01 r;
  r.transport = N / 16.0 * pairing_y_grad(one, zero, table);
  LogField psi0 = field_from_eigenfunction(zero, table);
  LogField unit = field_from_polynomial(SparsePolynomial::constant(N, 1), g);
  r.log_term = log_weighted_integral(unit, psi0, psi0);
  r.denominator = r.transport + r.log_term.value;
  if (std::abs(r.denominator) < denom_tol)
    throw Error(ErrorKind::VanishingDenominator, "denominator " + std::to_string(r.denominator));
  r.gamma = eta / r.denominator;
  return r;
}

double mass_pairing(const KernelTable& table) {
  const Grid& g = table.grid;
  const int N = g.N;
  MultiIndex zero(std::vector<int>(N, 0));
  SampledFunction one(g, std::vector<double>(g.size(), 1.0));
  double t = pairing_y_grad(one, zero, table);
  double m = integrate(g, table.at(zero));
  return -N / 16.0 * t - N * N / 16.0 * m;
}

SimpleSolvability assemble_simple_solvability(int k, Kind kind, double eta, const KernelTable& table,
                                              const LogIntegralOptions& opt) {
  const Grid& g = table.grid;
  const int N = g.N;
  if (N != 1 && k != 0) throw Error(ErrorKind::UnsupportedDimension, "simple eigenvalues need N=1 (or k=0)");
  MultiIndex beta(std::vector<int>(N, 0));
  beta.c[0] = k;
  SimpleSolvability r;
  r.k = k;
  r.kind = kind;
  SparsePolynomial adj = adjoint_polynomial(beta);
  SampledFunction psi = eigenfunction(beta, table);
  SampledFunction adj_s = sample_polynomial(g, adj);
  r.pairing = inner_product(psi, adj);
  LogField adj_f = field_from_polynomial(adj, g);
  if (kind == Kind::Global) {
    double s = (N + k) / 16.0;
    r.transport = pairing_y_grad(adj_s, beta, table);
    LogField psi_f = field_from_eigenfunction(beta, table);
    r.log_term = log_weighted_integral(adj_f, psi_f, psi_f, opt);
    double den = s * r.transport + r.log_term.value;
    if (std::abs(den) < 1e-8) throw Error(ErrorKind::VanishingDenominator, "solvability denominator " + std::to_string(den));
    r.coefficient = eta * r.pairing / den;
    r.residual = r.coefficient * (s * r.transport + r.log_term.direct) - eta * r.pairing;
  } else {
    double alpha = -k / 4.0;
    r.transport = inner_product(psi, adj.euler());
    LogField psi_f = field_from_kernel({{beta, eigen_scale(beta)}}, table);
    r.log_term = log_weighted_integral(psi_f, adj_f, adj_f, opt);
    if (std::abs(r.pairing) < 1e-8) throw Error(ErrorKind::VanishingDenominator, "<psi*, psi> vanishes");
    double num = alpha / 4.0 * r.transport - r.log_term.value;
    r.coefficient = num / r.pairing;
    r.residual = -r.coefficient * r.pairing + alpha / 4.0 * r.transport - r.log_term.direct;
  }
  return r;
}

double mu10(const KernelTable& table) {
  if (table.grid.N == 1) return assemble_simple_solvability(0, Kind::Blowup, 0, table).coefficient;
  // psi*_0 = 1: the log term and the transport term vanish identically
  const Grid& g = table.grid;
  MultiIndex zero(std::vector<int>(g.N, 0));
  LogField psi0 = field_from_eigenfunction(zero, table);
  LogField one = field_from_polynomial(SparsePolynomial::constant(g.N, 1), g);
  double den = integrate(g, table.at(zero));
  return -log_weighted_integral(psi0, one, one).value / den;
}

double mu1k(int k, const KernelTable& table) {
  return assemble_simple_solvability(k, Kind::Blowup, 0, table).coefficient;
}

double Conic::scale() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d), std::abs(e), std::abs(f)});
}

namespace {

// (u0 + u1 x + u2 y)(v0 + v1 x + v2 y)
Conic affine_product(const double* u, const double* v) {
  Conic q;
  q.a = u[1] * v[1];
  q.b = u[1] * v[2] + u[2] * v[1];
  q.c = u[2] * v[2];
  q.d = u[0] * v[1] + u[1] * v[0];
  q.e = u[0] * v[2] + u[2] * v[0];
  q.f = u[0] * v[0];
  return q;
}

Conic conic_sub(const Conic& p, const Conic& q) {
  return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d, p.e - q.e, p.f - q.f};
}

}  // namespace

ConicSystem assemble_semisimple_system(int k, Kind kind, const KernelTable& table, double eta, int lattice_n,
                                       const LogIntegralOptions& opt) {
  const Grid& g = table.grid;
  if (g.N != 2 || g.radial) throw Error(ErrorKind::UnsupportedDimension, "semisimple systems need a 2D Cartesian table");
  if (k != 1 && k != 2) throw Error(ErrorKind::OrderExceeded, "semisimple systems for k=1,2 only");
  ConicSystem sys;
  sys.k = k;
  sys.kind = kind;
  sys.eta = eta;
  sys.basis = multi_indices(2, k);
  std::sort(sys.basis.begin(), sys.basis.end());
  const int M = static_cast<int>(sys.basis.size());
  for (int m = 1; m < M; ++m) sys.labels.push_back("c" + std::to_string(m + 1));
  sys.labels.push_back(kind == Kind::Global ? "gamma" : "mu");

  std::vector<SampledFunction> psi;
  std::vector<SparsePolynomial> adj;
  std::vector<LogField> psi_f, adj_f;
  for (const auto& b : sys.basis) {
    psi.push_back(eigenfunction(b, table));
    adj.push_back(adjoint_polynomial(b));
    adj_f.push_back(field_from_polynomial(adj.back(), g));
    if (kind == Kind::Global)
      psi_f.push_back(field_from_eigenfunction(b, table));
    else
      psi_f.push_back(field_from_kernel({{b, eigen_scale(b)}}, table));
  }
  sys.transport.resize(M, M);
  sys.gram.resize(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      if (kind == Kind::Global) {
        sys.transport(i, j) = pairing_y_grad(sample_polynomial(g, adj[i]), sys.basis[j], table);
        sys.gram(i, j) = inner_product(psi[j], adj[i]);
      } else {
        sys.transport(i, j) = inner_product(psi[i], adj[j].euler());
        sys.gram(i, j) = inner_product(psi[i], adj[j]);
      }
    }
  if (kind == Kind::Global) {
    sys.alpha = (2 + k) / 4.0;
    sys.U = (2 + k) / 16.0 * sys.transport;
    sys.V = -eta * sys.gram;
  } else {
    sys.alpha = -k / 4.0;
    sys.U = -sys.gram;
    sys.V = sys.alpha / 4.0 * sys.transport;
  }
  const double tol = 1e-3;  // 2D quadrature tolerance
  sys.coef_floor = tol * sys.U.cwiseAbs().maxCoeff() * sys.V.cwiseAbs().maxCoeff();

  // affine coefficients in the free unknowns, c_1 = 1 - sum of the others
  auto affine = [&](const Eigen::MatrixXd& W, int i, double* out) {
    out[0] = W(i, 0);
    out[1] = M > 1 ? W(i, 1) - W(i, 0) : 0;
    out[2] = M > 2 ? W(i, 2) - W(i, 0) : 0;
  };
  std::vector<std::pair<int, int>> pairs = k == 1 ? std::vector<std::pair<int, int>>{{1, 0}}
                                                  : std::vector<std::pair<int, int>>{{1, 0}, {2, 1}};
  for (auto [p, q] : pairs) {
    double up[3], uq[3], vp[3], vq[3];
    affine(sys.U, p, up);
    affine(sys.U, q, uq);
    affine(sys.V, p, vp);
    affine(sys.V, q, vq);
    sys.forms.push_back(conic_sub(affine_product(up, vq), affine_product(uq, vp)));
  }
  if (k == 1) {
    double a[2], b[2], p[2], q[2];
    for (int i = 0; i < 2; ++i) {
      a[i] = sys.U(i, 1) - sys.U(i, 0);
      p[i] = sys.U(i, 0);
      b[i] = sys.V(i, 1) - sys.V(i, 0);
      q[i] = sys.V(i, 0);
    }
    sys.scalar.A = p[1] * a[0] - p[0] * a[1];
    sys.scalar.B = p[1] * b[0] + q[1] * a[0] - p[0] * b[1] - q[0] * a[1];
    sys.scalar.C = q[1] * b[0] - q[0] * b[1];
  }

  int L = lattice_n > 0 ? lattice_n : (k == 1 ? 101 : 10);
  if (k == 1) {
    for (int i = 0; i < L; ++i) sys.lattice.push_back({static_cast<double>(i) / (L - 1), 0.0});
  } else {
    for (int i = 0; i <= L; ++i)
      for (int j = 0; i + j <= L; ++j) sys.lattice.push_back({static_cast<double>(i) / L, static_cast<double>(j) / L});
  }
  const std::size_t P = sys.lattice.size();
  sys.omega.assign(pairs.size(), std::vector<double>(P, 0.0));
  std::vector<char> bad(P, 0);
  parallel_for(P, [&](std::size_t s) {
    std::vector<double> c(M);
    c[0] = 1.0;
    for (int m = 1; m < M; ++m) {
      c[m] = sys.lattice[s][m - 1];
      c[0] -= c[m];
    }
    std::vector<double> ox(M, 0.0), o0(M, 0.0);
    try {
      if (kind == Kind::Global) {
        LogField Psi = combine(c, psi_f);
        for (int i = 0; i < M; ++i) ox[i] = log_weighted_integral(adj_f[i], Psi, Psi, opt).value;
      } else {
        LogField Psi = combine(c, adj_f);
        for (int i = 0; i < M; ++i) o0[i] = -log_weighted_integral(psi_f[i], Psi, Psi, opt).value;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ThickNodalSet) throw;
      bad[s] = 1;
      return;
    }
    Eigen::Map<const Eigen::VectorXd> cv(c.data(), M);
    Eigen::VectorXd uc = sys.U * cv, vc = sys.V * cv;
    for (std::size_t f = 0; f < pairs.size(); ++f) {
      auto [p, q] = pairs[f];
      double lin = uc(p) * vc(q) - uc(q) * vc(p);
      double full = (uc(p) + ox[p]) * (vc(q) + o0[q]) - (uc(q) + ox[q]) * (vc(p) + o0[p]);
      sys.omega[f][s] = full - lin;
    }
  });
  sys.omega_norm.assign(pairs.size(), 0.0);
  for (std::size_t s = 0; s < P; ++s) {
    if (bad[s]) {
      ++sys.degenerate_samples;
      for (auto& om : sys.omega) om[s] = std::nan("");
      continue;
    }
    for (std::size_t f = 0; f < pairs.size(); ++f)
      sys.omega_norm[f] = std::max(sys.omega_norm[f], std::abs(sys.omega[f][s]));
  }
  return sys;
}

const char* quad_status_name(QuadStatus s) {
  switch (s) {
    case QuadStatus::Regular: return "regular";
    case QuadStatus::Linear: return "linear";
    case QuadStatus::Continuum: return "continuum";
    case QuadStatus::NoSolution: return "none";
  }
  return "?";
}

namespace {

using Interval = boost::numeric::interval<
    double, boost::numeric::interval_lib::policies<boost::numeric::interval_lib::save_state<
                                                       boost::numeric::interval_lib::rounded_transc_std<double>>,
                                                   boost::numeric::interval_lib::checking_base<double>>>;

Interval eval_interval(const Quadratic& q, const Interval& x) {
  return (Interval(q.A) * x + Interval(q.B)) * x + Interval(q.C);
}

// real roots of A x^2 + B x + C, A != 0
std::vector<double> quad_roots(double A, double B, double C) {
  double disc = B * B - 4 * A * C;
  if (disc < 0) return {};
  double sq = std::sqrt(disc);
  double qq = -0.5 * (B + (B >= 0 ? sq : -sq));
  std::vector<double> r;
  if (qq != 0) {
    r.push_back(qq / A);
    r.push_back(C / qq);
  } else {
    r.push_back(-B / (2 * A));
    r.push_back(-B / (2 * A));
  }
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

QuadraticReport solve_quadratic_branch(const Quadratic& q, double omega_norm, double floor, bool strict) {
  QuadraticReport rep;
  rep.omega_norm = omega_norm;
  const double A = q.A, B = q.B, C = q.C;
  if (std::abs(A) <= floor && std::abs(B) <= floor && std::abs(C) <= floor) {
    if (strict) throw Error(ErrorKind::ContinuumDetected, "quadratic vanishes identically");
    rep.status = QuadStatus::Continuum;
    return rep;
  }
  if (std::abs(A) <= floor) {
    if (strict) throw Error(ErrorKind::DegenerateQuadratic, "|A| below tolerance");
    rep.status = QuadStatus::Linear;
    if (std::abs(B) > floor) rep.real_roots.push_back(-C / B);
  } else {
    rep.real_roots = quad_roots(A, B, C);
    rep.critical_point = -B / (2 * A);
    rep.critical_value = C - B * B / (4 * A);
  }
  for (double r : rep.real_roots) {
    if (r < -1e-12 || r > 1 + 1e-12) continue;
    RootCertificate cert;
    cert.root = std::clamp(r, 0.0, 1.0);
    if (rep.status == QuadStatus::Regular) {
      cert.cond_a = C * (A + B + C) > 0;
      cert.cond_b = C * rep.critical_value < 0;
      cert.cond_b_literal = C * (-B / (4 * A) + C) < 0;
      cert.cond_c = rep.critical_point > 0 && rep.critical_point < 1;
      cert.control_holds = omega_norm <= std::abs(rep.critical_value);
    } else {
      cert.control_holds = omega_norm < std::abs(B);
    }
    // enclosure: every root of F + w with |w| <= omega_norm near r
    double slope = rep.status == QuadStatus::Regular ? std::abs(2 * A * r + B) : std::abs(B);
    double half = slope > 0 ? 2 * omega_norm / slope + 1e-14 * (1 + std::abs(r)) : 1.0;
    cert.lo = r - half;
    cert.hi = r + half;
    if (cert.control_holds && slope > 0) {
      // F must exceed omega in magnitude, with opposite signs, at the two ends, and be monotone inside
      Interval lo_v = eval_interval(q, Interval(cert.lo)), hi_v = eval_interval(q, Interval(cert.hi));
      Interval dv = Interval(2 * A) * Interval(cert.lo, cert.hi) + Interval(B);
      bool ends = (lo_v.lower() > omega_norm && hi_v.upper() < -omega_norm) ||
                  (lo_v.upper() < -omega_norm && hi_v.lower() > omega_norm);
      bool mono = dv.lower() > 0 || dv.upper() < 0;
      cert.enclosure_certified = ends && mono;
    }
    rep.roots.push_back(cert);
  }
  if (rep.real_roots.empty()) rep.status = rep.status == QuadStatus::Linear ? QuadStatus::Linear : QuadStatus::NoSolution;
  return rep;
}

namespace {

double omega_k1(const ConicSystem& sys, int f, double t) {
  const auto& om = sys.omega[f];
  const int L = static_cast<int>(om.size());
  double x = t * (L - 1);
  int i = std::clamp(static_cast<int>(std::floor(x)), 0, L - 2);
  double u = x - i;
  double a = om[i], b = om[i + 1];
  if (std::isnan(a)) a = 0;
  if (std::isnan(b)) b = 0;
  return (1 - u) * a + u * b;
}

int simplex_side(const ConicSystem& sys) {
  // lattice size (L+1)(L+2)/2
  int L = 0;
  while ((L + 1) * (L + 2) / 2 < static_cast<int>(sys.lattice.size())) ++L;
  return L;
}

double omega_k2(const ConicSystem& sys, int f, double x, double y) {
  const int L = simplex_side(sys);
  auto idx = [&](int i, int j) {
    // rows i = 0..L, each with L - i + 1 entries
    return i * (L + 1) - i * (i - 1) / 2 + j;
  };
  auto val = [&](int i, int j) {
    double v = sys.omega[f][idx(i, j)];
    return std::isnan(v) ? 0.0 : v;
  };
  double X = std::clamp(x, 0.0, 1.0) * L, Y = std::clamp(y, 0.0, 1.0) * L;
  int i = std::min(static_cast<int>(std::floor(X)), L - 1), j = std::min(static_cast<int>(std::floor(Y)), L - 1);
  if (i + j > L - 1) {
    // clamp onto the hypotenuse cell
    int over = i + j - (L - 1);
    if (i >= over) i -= over; else j -= over;
  }
  double u = X - i, v = Y - j;
  if (u + v <= 1) return val(i, j) + u * (val(i + 1, j) - val(i, j)) + v * (val(i, j + 1) - val(i, j));
  if (i + j + 2 > L) {
    double s = u + v;
    u /= s;
    v /= s;
    return val(i, j) + u * (val(i + 1, j) - val(i, j)) + v * (val(i, j + 1) - val(i, j));
  }
  double uu = 1 - u, vv = 1 - v;
  return val(i + 1, j + 1) + uu * (val(i, j + 1) - val(i + 1, j + 1)) + vv * (val(i + 1, j) - val(i + 1, j + 1));
}

}  // namespace

ScanResult dense_scan_quadratic(const ConicSystem& sys, int points) {
  ScanResult r;
  const Conic& F = sys.forms.at(0);
  double prev = 0;
  for (int i = 0; i < points; ++i) {
    double t = static_cast<double>(i) / (points - 1);
    double v = F.eval(t, 0) + omega_k1(sys, 0, t);
    r.max_abs = std::max(r.max_abs, std::abs(v));
    if (i > 0 && ((v < 0) != (prev < 0) || v == 0)) ++r.count;
    prev = v;
  }
  r.continuum = r.max_abs <= sys.coef_floor;
  if (r.continuum) r.count = 0;
  return r;
}

const char* conic_type_name(ConicType t) {
  switch (t) {
    case ConicType::Ellipse: return "ellipse";
    case ConicType::Parabola: return "parabola";
    case ConicType::Hyperbola: return "hyperbola";
    case ConicType::Degenerate: return "degenerate";
  }
  return "?";
}

ConicClass conic_classify(const Conic& P, double tol) {
  ConicClass c;
  double qs = std::max({std::abs(P.a), std::abs(P.b), std::abs(P.c)});
  double s = std::max(qs, P.scale());
  c.discriminant = P.b * P.b - 4 * P.a * P.c;
  Eigen::Matrix3d m;
  m << P.a, P.b / 2, P.d / 2, P.b / 2, P.c, P.e / 2, P.d / 2, P.e / 2, P.f;
  c.determinant = m.determinant();
  c.degenerate = std::abs(c.determinant) <= tol * s * s * s;
  if (qs <= tol * std::max(s, 1e-300) || qs == 0) {
    c.line = true;
    c.type = ConicType::Degenerate;
    return c;
  }
  double dt = tol * qs * qs;
  if (c.discriminant < -dt) {
    c.type = ConicType::Ellipse;
    c.circle = std::abs(P.a - P.c) <= tol * qs && std::abs(P.b) <= tol * qs;
  } else if (c.discriminant > dt) {
    c.type = ConicType::Hyperbola;
    c.rectangular = std::abs(P.a + P.c) <= tol * qs;
  } else {
    c.type = ConicType::Parabola;
  }
  return c;
}

namespace {

using Poly = std::vector<double>;  // low to high

Poly pmul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly padd(const Poly& a, const Poly& b, double sb = 1.0) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += sb * b[i];
  return r;
}

double peval(const Poly& p, double x) {
  double v = 0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

Conic rotate(const Conic& P, double th) {
  // (x, y) = R (X, Y)
  double cs = std::cos(th), sn = std::sin(th);
  Eigen::Matrix2d R;
  R << cs, -sn, sn, cs;
  Eigen::Matrix2d Q;
  Q << P.a, P.b / 2, P.b / 2, P.c;
  Eigen::Matrix2d Qr = R.transpose() * Q * R;
  Eigen::Vector2d l = R.transpose() * Eigen::Vector2d(P.d, P.e);
  return {Qr(0, 0), 2 * Qr(0, 1), Qr(1, 1), l(0), l(1), P.f};
}

}  // namespace

IntersectionReport intersect_conics(const Conic& P0, const Conic& Q0, double floor) {
  IntersectionReport rep;
  const double th = 0.5;
  Conic P = rotate(P0, th), Q = rotate(Q0, th);
  // as quadratics in Y with coefficients polynomial in X
  Poly p2{P.c}, p1{P.e, P.b}, p0{P.f, P.d, P.a};
  Poly q2{Q.c}, q1{Q.e, Q.b}, q0{Q.f, Q.d, Q.a};
  Poly r1 = padd(pmul(p2, q0), pmul(q2, p0), -1);  // p2 q0 - q2 p0
  Poly r2 = padd(pmul(p2, q1), pmul(q2, p1), -1);  // p2 q1 - q2 p1
  Poly r3 = padd(pmul(p1, q0), pmul(q1, p0), -1);  // p1 q0 - q1 p0
  Poly res = padd(pmul(r1, r1), pmul(r2, r3), -1);
  res.resize(5, 0.0);
  for (int i = 0; i < 5; ++i) rep.resultant[i] = res[i];
  double s = std::max(P.scale(), 1e-300) * std::max(Q.scale(), 1e-300);
  double rmax = 0;
  for (double v : res) rmax = std::max(rmax, std::abs(v));
  if (rmax <= std::max(floor, 1e-13) * s * s)
    throw Error(ErrorKind::ContinuumDetected, "resultant vanishes identically: conics share a component");
  int deg = 4;
  while (deg > 0 && std::abs(res[deg]) <= 1e-13 * rmax) --deg;
  std::vector<double> xs;
  if (deg >= 1) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -res[i] / res[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < deg; ++i) {
      auto z = es.eigenvalues()(i);
      if (std::abs(z.imag()) <= 1e-7 * (1 + std::abs(z.real()))) xs.push_back(z.real());
    }
  }
  auto Pv = [&](double X, double Y) { return P.eval(X, Y); };
  auto Qv = [&](double X, double Y) { return Q.eval(X, Y); };
  std::vector<std::array<double, 3>> found;
  for (double X : xs) {
    // polish the resultant root
    for (int it = 0; it < 3; ++it) {
      double d = 0;
      for (int i = deg; i >= 1; --i) d = d * X + i * res[i];
      if (d == 0) break;
      X -= peval(res, X) / d;
    }
    std::vector<double> Ys;
    double den = peval(r2, X);
    if (std::abs(den) > 1e-9 * (std::abs(peval(r1, X)) + 1e-300) && std::abs(den) > 1e-12 * s) {
      Ys.push_back(-peval(r1, X) / den);
    } else {
      double a = P.c, b = peval(p1, X), c = peval(p0, X);
      std::vector<double> cand;
      if (std::abs(a) > 1e-14 * s) {
        double disc = std::max(0.0, b * b - 4 * a * c);
        cand = {(-b + std::sqrt(disc)) / (2 * a), (-b - std::sqrt(disc)) / (2 * a)};
      } else if (b != 0) {
        cand = {-c / b};
      }
      for (double Y : cand)
        if (std::abs(Qv(X, Y)) <= 1e-6 * s) Ys.push_back(Y);
    }
    for (double Y : Ys) {
      double cond = 0;
      for (int it = 0; it < 8; ++it) {
        double f1 = Pv(X, Y), f2 = Qv(X, Y);
        Eigen::Matrix2d J;
        J << 2 * P.a * X + P.b * Y + P.d, P.b * X + 2 * P.c * Y + P.e, 2 * Q.a * X + Q.b * Y + Q.d,
            Q.b * X + 2 * Q.c * Y + Q.e;
        double det = J.determinant();
        if (std::abs(det) < 1e-300) break;
        Eigen::Vector2d step = J.inverse() * Eigen::Vector2d(f1, f2);
        X -= step(0);
        Y -= step(1);
      }
      Eigen::Matrix2d J;
      J << 2 * P.a * X + P.b * Y + P.d, P.b * X + 2 * P.c * Y + P.e, 2 * Q.a * X + Q.b * Y + Q.d,
          Q.b * X + 2 * Q.c * Y + Q.e;
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
      double smin = svd.singularValues()(1);
      cond = smin > 0 ? svd.singularValues()(0) / smin : 1e300;
      bool dup = false;
      for (auto& f : found) dup = dup || std::hypot(f[0] - X, f[1] - Y) < 1e-8 * (1 + std::hypot(X, Y));
      if (!dup) found.push_back({X, Y, cond});
    }
  }
  double cs = std::cos(th), sn = std::sin(th);
  for (auto& f : found) {
    Intersection it;
    it.x = cs * f[0] - sn * f[1];
    it.y = sn * f[0] + cs * f[1];
    it.condition = f[2];
    it.in_simplex = it.x >= -1e-12 && it.y >= -1e-12 && it.x + it.y <= 1 + 1e-12;
    if (it.condition > 1e8) rep.ill_conditioned = true;
    if (it.in_simplex) ++rep.in_simplex;
    rep.points.push_back(it);
  }
  std::sort(rep.points.begin(), rep.points.end(),
            [](const Intersection& a, const Intersection& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  return rep;
}

ScanResult dense_scan_conics(const ConicSystem& sys, int n) {
  ScanResult r;
  const Conic& F1 = sys.forms.at(0);
  const Conic& F2 = sys.forms.at(1);
  std::vector<double> g1((n + 1) * (n + 1), 0.0), g2 = g1;
  double m1 = 0, m2 = 0;
  auto id = [&](int i, int j) { return static_cast<std::size_t>(i) * (n + 1) + j; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      double x = static_cast<double>(i) / n, y = static_cast<double>(j) / n;
      g1[id(i, j)] = F1.eval(x, y) + omega_k2(sys, 0, x, y);
      g2[id(i, j)] = F2.eval(x, y) + omega_k2(sys, 1, x, y);
      m1 = std::max(m1, std::abs(g1[id(i, j)]));
      m2 = std::max(m2, std::abs(g2[id(i, j)]));
    }
  r.max_abs = std::max(m1, m2);
  // triangular cells; a cell is marked when both forms change sign on it
  std::vector<char> mark(static_cast<std::size_t>(n) * n * 2, 0);
  auto cid = [&](int i, int j, int up) { return (static_cast<std::size_t>(i) * n + j) * 2 + up; };
  bool line1 = false, line2 = false;
  auto changes = [](double a, double b, double c) {
    double lo = std::min({a, b, c}), hi = std::max({a, b, c});
    return lo <= 0 && hi >= 0;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; i + j < n; ++j)
      for (int up = 0; up < 2; ++up) {
        if (up && i + j + 2 > n) continue;
        int ai = up ? i + 1 : i, aj = up ? j + 1 : j;
        std::size_t v0 = id(ai, aj), v1 = id(i + 1, j), v2 = id(i, j + 1);
        bool c1 = changes(g1[v0], g1[v1], g1[v2]);
        bool c2 = changes(g2[v0], g2[v1], g2[v2]);
        line1 = line1 || c1;
        line2 = line2 || c2;
        if (c1 && c2) mark[cid(i, j, up)] = 1;
      }
  bool zero1 = m1 <= sys.coef_floor, zero2 = m2 <= sys.coef_floor;
  r.continuum = (zero1 && (zero2 || line2)) || (zero2 && line1);
  if (r.continuum) return r;
  // clusters of marked cells, 8-neighbourhood on the square index
  std::vector<char> seen(mark.size(), 0);
  for (std::size_t s0 = 0; s0 < mark.size(); ++s0) {
    if (!mark[s0] || seen[s0]) continue;
    ++r.count;
    std::vector<std::size_t> st{s0};
    seen[s0] = 1;
    while (!st.empty()) {
      std::size_t s = st.back();
      st.pop_back();
      int i = static_cast<int>(s / 2 / n), j = static_cast<int>(s / 2 % n);
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          for (int up = 0; up < 2; ++up) {
            int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
            std::size_t t = cid(ii, jj, up);
            if (mark[t] && !seen[t]) {
              seen[t] = 1;
              st.push_back(t);
            }
          }
    }
  }
  return r;
}

Rational alpha_exact(int k, const Rational& n, Kind kind, int N) {
  if (kind == Kind::Global) return Rational(N) / (Rational(4) + Rational(N) * n) + Rational(k, 4);
  if (k == 0) return 0;
  if (n != 0) throw Error(ErrorKind::WrongKind, "blow-up alpha_k(n) is exact only at n = 0");
  return Rational(-k, 4);
}

double alpha_expansion(int k, double n, Kind kind, int N, double mu1) {
  if (kind == Kind::Global) return N / (4.0 + N * n) + k / 4.0;
  return -k / 4.0 + mu1 * n;
}

double spectrum_shift(double alpha, double n, int k, int N) {
  return (1 - alpha * n) * (-(k + N) / 4.0) + alpha;
}

double spectrum_shift_as_printed(double alpha, double n, int k) { return (1 - alpha * n) * (-k / 4.0) + alpha; }

double spectrum_shift_residual(double alpha, double n, int k, const KernelTable& table) {
  const Grid& g = table.grid;
  if (g.N != 1) throw Error(ErrorKind::UnsupportedDimension, "spectrum shift check is 1D");
  const double c = 1 - alpha * n;
  if (c <= 0) throw Error(ErrorKind::ConfigError, "1 - alpha n must be positive");
  const double s = std::pow(c, 0.25);
  // phi(y) = psi_k(s y); L phi = -phi'''' + (c/4) y phi' + alpha phi
  KernelEvaluator ev(1, s * g.R + 1.0);
  MultiIndex b0{k}, b1{k + 1}, b4{k + 4};
  const double lam = spectrum_shift(alpha, n, k, 1);
  const double sc = eigen_scale(b0);
  double res = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.inner(i, 0.5)) continue;
    double y = g.coord(static_cast<int>(i));
    double z = s * y;
    double f0 = sc * ev.eval(b0, &z), f1 = sc * s * ev.eval(b1, &z), f4 = sc * c * ev.eval(b4, &z);
    double L = -f4 + c / 4.0 * y * f1 + alpha * f0;
    res = std::max(res, std::abs(L - lam * f0));
  }
  return res;
}

}  // namespace tfe
