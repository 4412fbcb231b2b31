#include "tfe/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

namespace tfe {

namespace {

constexpr double kPi = std::numbers::pi;

template <int P>
void gl_rule(std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, P>;
  const auto& ax = G::abscissa();
  const auto& aw = G::weights();
  // boost stores the non-negative half
  for (std::size_t i = 0; i < ax.size(); ++i) {
    if (ax[i] == 0.0) {
      x.push_back(0.0);
      w.push_back(aw[i]);
    } else {
      x.push_back(ax[i]);
      w.push_back(aw[i]);
      x.push_back(-ax[i]);
      w.push_back(aw[i]);
    }
  }
}

void reference_rule(int p, std::vector<double>& x, std::vector<double>& w) {
  switch (p) {
    case 10: gl_rule<10>(x, w); break;
    case 15: gl_rule<15>(x, w); break;
    case 20: gl_rule<20>(x, w); break;
    case 30: gl_rule<30>(x, w); break;
    default: gl_rule<20>(x, w); break;
  }
}

// sign/trig factor of the folded 1D symbol: (-1)^{m/2} cos or (-1)^{(m+1)/2} sin
inline double trig(int m, double c, double s) {
  if (m % 2 == 0) return (m / 2) % 2 == 0 ? c : -c;
  return ((m + 1) / 2) % 2 == 0 ? s : -s;
}

inline double ipow(double x, int m) {
  double r = 1;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

}  // namespace

double asymptotic_decay_constant() { return 3.0 * std::pow(2.0, -8.0 / 3.0); }

KernelEvaluator::KernelEvaluator(int N, double rmax, const QuadConfig& q) : N_(N) {
  if (N != 1 && N != 2) throw Error(ErrorKind::UnsupportedDimension, "N=" + std::to_string(N));
  std::vector<double> rx, rw;
  reference_rule(q.gl_points, rx, rw);
  int panels = std::max(8, static_cast<int>(std::ceil(rmax * q.xi_max / q.panel_phase)));
  double len = q.xi_max / panels;
  for (int p = 0; p < panels; ++p) {
    double a = p * len;
    for (std::size_t i = 0; i < rx.size(); ++i) {
      xi_.push_back(a + 0.5 * len * (rx[i] + 1.0));
      w_.push_back(0.5 * len * rw[i]);
    }
  }
}

double KernelEvaluator::eval(const MultiIndex& beta, const double* y) const {
  const std::size_t n = xi_.size();
  if (N_ == 1) {
    int m = beta[0];
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double x = xi_[i];
      double x2 = x * x;
      s += w_[i] * ipow(x, m) * std::exp(-x2 * x2) * trig(m, std::cos(y[0] * x), std::sin(y[0] * x));
    }
    return s / kPi;
  }
  int m1 = beta[0], m2 = beta[1];
  std::vector<double> t2(n);
  for (std::size_t j = 0; j < n; ++j)
    t2[j] = w_[j] * ipow(xi_[j], m2) * trig(m2, std::cos(y[1] * xi_[j]), std::sin(y[1] * xi_[j]));
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double a = xi_[i] * xi_[i];
    double inner = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double r2 = a + xi_[j] * xi_[j];
      inner += t2[j] * std::exp(-r2 * r2);
    }
    s += w_[i] * ipow(xi_[i], m1) * trig(m1, std::cos(y[0] * xi_[i]), std::sin(y[0] * xi_[i])) * inner;
  }
  return s / (kPi * kPi);
}

double KernelEvaluator::imag_residue(const MultiIndex& beta, const double* y) const {
  using C = std::complex<double>;
  const std::size_t n = xi_.size();
  const C I(0, 1);
  auto sym = [&](int m, double yy, double x) { return std::pow(I * x, m) * std::exp(I * yy * x); };
  C s = 0;
  if (N_ == 1) {
    for (std::size_t i = 0; i < n; ++i)
      for (double sg : {1.0, -1.0}) {
        double x = sg * xi_[i];
        s += w_[i] * sym(beta[0], y[0], x) * std::exp(-std::pow(x, 4));
      }
    return std::abs(s.imag()) / (2 * kPi);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (double s1 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0}) {
          double x1 = s1 * xi_[i], x2 = s2 * xi_[j];
          double r2 = x1 * x1 + x2 * x2;
          s += w_[i] * w_[j] * sym(beta[0], y[0], x1) * sym(beta[1], y[1], x2) * std::exp(-r2 * r2);
        }
  return std::abs(s.imag()) / (4 * kPi * kPi);
}

const std::vector<double>& KernelTable::at(const MultiIndex& b) const {
  auto it = values.find(b);
  if (it == values.end())
    throw Error(ErrorKind::OrderExceeded, "no slice for beta=" + b.label() + " (K=" + std::to_string(K) + ")");
  return it->second;
}

SampledFunction KernelTable::slice(const MultiIndex& b) const { return SampledFunction(grid, at(b)); }

Grid default_grid(int N) {
  if (N == 1) return Grid::make(1, 0.05, 40.0);
  if (N == 2) return Grid::make(2, 0.1, 24.0);
  throw Error(ErrorKind::UnsupportedDimension, "N=" + std::to_string(N));
}

namespace {

// max |F| over the last oscillation period before R along the first axis
double tail_probe(int N, double R, const QuadConfig& q) {
  KernelEvaluator ev(N, R, q);
  MultiIndex zero(std::vector<int>(N, 0));
  double period = 2 * kPi / (0.4091 * std::cbrt(R));
  double m = 0;
  for (int i = 0; i <= 40; ++i) {
    double y[2] = {R - period * i / 40.0, 0.0};
    m = std::max(m, std::abs(ev.eval(zero, y)));
  }
  return m;
}

void fill_1d(KernelTable& t, const QuadConfig& q) {
  const Grid& g = t.grid;
  KernelEvaluator ev(1, g.R, q);
  const auto& xi = ev.nodes();
  const auto& w = ev.weights();
  const std::size_t nx = xi.size();
  std::vector<std::vector<double>> base(t.K + 1, std::vector<double>(nx));
  for (int m = 0; m <= t.K; ++m)
    for (std::size_t i = 0; i < nx; ++i) {
      double x2 = xi[i] * xi[i];
      base[m][i] = w[i] * ipow(xi[i], m) * std::exp(-x2 * x2) / kPi;
    }
  const int n = g.per_axis();
  const int mid = n / 2;
  std::vector<std::vector<double>> out(t.K + 1, std::vector<double>(n));
  parallel_for(static_cast<std::size_t>(n - mid), [&](std::size_t k) {
    int idx = mid + static_cast<int>(k);
    double y = g.coord(idx);
    std::vector<double> c(nx), s(nx);
    for (std::size_t i = 0; i < nx; ++i) {
      c[i] = std::cos(y * xi[i]);
      s[i] = std::sin(y * xi[i]);
    }
    for (int m = 0; m <= t.K; ++m) {
      double acc = 0;
      for (std::size_t i = 0; i < nx; ++i) acc += base[m][i] * trig(m, c[i], s[i]);
      out[m][idx] = acc;
      out[m][n - 1 - idx] = (m % 2 == 0) ? acc : -acc;
    }
  });
  for (int m = 0; m <= t.K; ++m) t.values[MultiIndex{m}] = std::move(out[m]);
}

void fill_2d(KernelTable& t, const QuadConfig& q) {
  const Grid& g = t.grid;
  KernelEvaluator ev(2, g.R, q);
  const auto& xi = ev.nodes();
  const auto& w = ev.weights();
  const std::size_t nx = xi.size();
  const int n = g.per_axis();
  const int mid = n / 2;
  const int nh = n - mid;  // non-negative coordinates
  std::vector<double> c(nh * nx), s(nh * nx);
  for (int a = 0; a < nh; ++a)
    for (std::size_t i = 0; i < nx; ++i) {
      double y = g.coord(mid + a);
      c[a * nx + i] = std::cos(y * xi[i]);
      s[a * nx + i] = std::sin(y * xi[i]);
    }
  // stage 1: A_{m2}(xi1, y2) = sum_j w_j xi2^m2 e^{-|xi|^4} T_{m2}(y2 xi2)
  std::vector<std::vector<double>> A(t.K + 1, std::vector<double>(nx * nh));
  parallel_for(static_cast<std::size_t>((t.K + 1) * nx), [&](std::size_t job) {
    int m2 = static_cast<int>(job / nx);
    std::size_t i = job % nx;
    std::vector<double> wk(nx);
    for (std::size_t j = 0; j < nx; ++j) {
      double r2 = xi[i] * xi[i] + xi[j] * xi[j];
      wk[j] = w[j] * ipow(xi[j], m2) * std::exp(-r2 * r2);
    }
    for (int b = 0; b < nh; ++b) {
      double acc = 0;
      for (std::size_t j = 0; j < nx; ++j) acc += wk[j] * trig(m2, c[b * nx + j], s[b * nx + j]);
      A[m2][i * nh + b] = acc;
    }
  });
  auto betas = multi_indices_upto(2, t.K);
  std::vector<std::vector<double>> out(betas.size(), std::vector<double>(g.size()));
  parallel_for(betas.size(), [&](std::size_t bi) {
    int m1 = betas[bi][0], m2 = betas[bi][1];
    auto& v = out[bi];
    std::vector<double> wk(nx);
    for (std::size_t i = 0; i < nx; ++i) wk[i] = w[i] * ipow(xi[i], m1) / (kPi * kPi);
    for (int a = 0; a < nh; ++a) {
      for (int b = 0; b < nh; ++b) {
        double acc = 0;
        for (std::size_t i = 0; i < nx; ++i)
          acc += wk[i] * trig(m1, c[a * nx + i], s[a * nx + i]) * A[m2][i * nh + b];
        double s1 = (m1 % 2 == 0) ? 1.0 : -1.0;
        double s2 = (m2 % 2 == 0) ? 1.0 : -1.0;
        int ip = mid + a, im = mid - a, jp = mid + b, jm = mid - b;
        v[static_cast<std::size_t>(ip) * n + jp] = acc;
        v[static_cast<std::size_t>(im) * n + jp] = s1 * acc;
        v[static_cast<std::size_t>(ip) * n + jm] = s2 * acc;
        v[static_cast<std::size_t>(im) * n + jm] = s1 * s2 * acc;
      }
    }
  });
  for (std::size_t bi = 0; bi < betas.size(); ++bi) t.values[betas[bi]] = std::move(out[bi]);
}

}  // namespace

double integrate(const Grid& g, const std::vector<double>& v) {
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += g.weight(i) * v[i];
  return s;
}

KernelTable eval_kernel(int N, const Grid& grid, int K, const QuadConfig& quad) {
  if (N != 1 && N != 2) throw Error(ErrorKind::UnsupportedDimension, "N=" + std::to_string(N));
  if (grid.N != N || grid.radial) throw Error(ErrorKind::GridMismatch, "kernel tables need a full Cartesian grid of matching dimension");
  if (K < 0 || K > 12) throw Error(ErrorKind::OrderExceeded, "K must lie in [0,12]");
  double tail = tail_probe(N, grid.R, quad);
  if (tail > quad.tail_tol)
    throw Error(ErrorKind::QuadratureDivergence,
                "kernel tail at R=" + std::to_string(grid.R) + " is " + std::to_string(tail) +
                    " > tail_tol=" + std::to_string(quad.tail_tol) + "; increase R");
  KernelTable t;
  t.grid = grid;
  t.K = K;
  t.tail_estimate = tail;
  if (N == 1)
    fill_1d(t, quad);
  else
    fill_2d(t, quad);

  // residue of the unfolded complex sum at a few probe points
  KernelEvaluator ev(N, grid.R, quad);
  double res = 0;
  for (double r : {0.7, 3.1, 0.4 * grid.R}) {
    double y[2] = {r, N == 2 ? -0.6 * r : 0.0};
    MultiIndex b(std::vector<int>(N, 0));
    res = std::max(res, ev.imag_residue(b, y));
    b.c[0] = std::min(K, 3);
    res = std::max(res, ev.imag_residue(b, y));
  }
  t.imag_residue = res;
  if (res > quad.quad_tol) throw Error(ErrorKind::QuadratureDivergence, "imaginary residue above quad_tol");

  auto fit = check_decay(t);
  t.D_fit = fit.D;
  t.d_fit = fit.d;
  return t;
}

double kernel_mass(const KernelTable& table, const MultiIndex& beta) {
  MultiIndex b = beta.dim() == 0 ? MultiIndex(std::vector<int>(table.grid.N, 0)) : beta;
  return integrate(table.grid, table.at(b));
}

namespace {

struct Line {
  double a, b, res;
};

// least squares log env = a - b * y^p
Line ls_fit(const std::vector<double>& y, const std::vector<double>& le, double p) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double x = -std::pow(y[i], p);
    sx += x;
    sy += le[i];
    sxx += x * x;
    sxy += x * le[i];
  }
  double den = n * sxx - sx * sx;
  double b = (n * sxy - sx * sy) / den;
  double a = (sy - b * sx) / n;
  double r = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double e = le[i] - (a - b * std::pow(y[i], p));
    r += e * e;
  }
  return {a, b, r};
}

}  // namespace

DecayFit fit_decay(const Grid& grid, const std::vector<double>& values) {
  // ray along the positive first axis
  std::vector<double> ys, fs;
  const int n = grid.per_axis();
  const int start = grid.radial ? 0 : n / 2;
  for (int i = start; i < n; ++i) {
    std::size_t idx = i;
    if (grid.N == 2 && !grid.radial) idx = static_cast<std::size_t>(i) * n + n / 2;
    ys.push_back(grid.coord(i));
    fs.push_back(std::abs(values[idx]));
  }
  double fmax = *std::max_element(fs.begin(), fs.end());
  double floor = 1e-13 * fmax;
  double y_lo = std::max(3.0, 0.1 * grid.R);
  bool oscillating = false;
  for (std::size_t i = 1; i < ys.size(); ++i) {
    std::size_t idx0 = grid.N == 2 && !grid.radial ? static_cast<std::size_t>(start + i - 1) * n + n / 2 : start + i - 1;
    std::size_t idx1 = grid.N == 2 && !grid.radial ? static_cast<std::size_t>(start + i) * n + n / 2 : start + i;
    if (ys[i] > y_lo && values[idx0] * values[idx1] < 0) oscillating = true;
  }
  std::vector<double> ey, el;
  for (std::size_t i = 1; i + 1 < ys.size(); ++i) {
    if (ys[i] < y_lo || fs[i] < floor) continue;
    bool keep = oscillating ? (fs[i] >= fs[i - 1] && fs[i] > fs[i + 1]) : (i % 10 == 0);
    if (keep) {
      ey.push_back(ys[i]);
      el.push_back(std::log(fs[i]));
    }
  }
  if (ey.size() < 4)
    throw Error(ErrorKind::FitFailure, "envelope has " + std::to_string(ey.size()) + " maxima in the fit window");
  DecayFit out;
  auto L = ls_fit(ey, el, 4.0 / 3.0);
  out.d = L.b;
  out.D_ls = std::exp(L.a);
  out.points = static_cast<int>(ey.size());
  out.y_lo = ey.front();
  out.y_hi = ey.back();
  double best = 1e300;
  for (double p = 0.5; p <= 3.0 + 1e-12; p += 0.005) {
    auto Lp = ls_fit(ey, el, p);
    if (Lp.res < best) {
      best = Lp.res;
      out.p_free = p;
    }
  }
  if (!(out.d > 0)) throw Error(ErrorKind::FitFailure, "fitted decay constant is not positive");
  // make the bound hold at every resolved sample
  double sup = out.D_ls;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i]) < floor) continue;
    double r = grid.abs_y(i);
    sup = std::max(sup, std::abs(values[i]) * std::exp(out.d * std::pow(r, 4.0 / 3.0)));
  }
  out.D = 1.05 * sup;
  if (std::abs(out.p_free - 4.0 / 3.0) > 0.25)
    throw Error(ErrorKind::ExponentMismatch,
                "envelope decays like exp(-c|y|^" + std::to_string(out.p_free) + "), not |y|^{4/3}");
  return out;
}

DecayFit check_decay(const KernelTable& table) {
  MultiIndex z(std::vector<int>(table.grid.N, 0));
  return fit_decay(table.grid, table.at(z));
}

std::map<MultiIndex, double> decay_prefactors(const KernelTable& table) {
  std::map<MultiIndex, double> out;
  for (const auto& [b, v] : table.values) {
    double fmax = sup_norm(v);
    double sup = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) < 1e-13 * fmax) continue;
      sup = std::max(sup, std::abs(v[i]) * std::exp(table.d_fit * std::pow(table.grid.abs_y(i), 4.0 / 3.0)));
    }
    out[b] = 1.05 * sup;
  }
  return out;
}

}  // namespace tfe
