#include "tfe/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tfe/rosenbrock.hpp"

namespace tfe {

namespace {

using V4 = Eigen::Matrix<double, 4, 1>;
using M4 = Eigen::Matrix<double, 4, 4>;

double sgn(double x) { return (x > 0) - (x < 0); }

// |f|^-n with a floor on |f| so the Jacobian stays finite at zeros
double inv_pow(double f, double n) { return std::pow(std::max(std::abs(f), 1e-150), -n); }

// global NEP after one integration: f''' = beta y |f|^-n f (N=1); radial N=2 uses (f, f', Lap f).
// Last component integrates the mass.
struct GlobalSys {
  double n, beta;
  int N;
  void rhs(double y, const V4& x, V4& d) const {
    double p = sgn(x[0]) * std::pow(std::abs(x[0]), 1 - n);
    if (N == 1) {
      d << x[1], x[2], beta * y * p, x[0];
    } else {
      d << x[1], x[2] - x[1] / y, beta * y * p, 2 * std::numbers::pi * y * x[0];
    }
  }
  void jac(double y, const V4& x, M4& J, V4& dfdt) const {
    J.setZero();
    dfdt.setZero();
    double p = sgn(x[0]) * std::pow(std::abs(x[0]), 1 - n);
    double dp = (1 - n) * inv_pow(x[0], n);
    J(0, 1) = 1;
    if (N == 1) {
      J(1, 2) = 1;
      J(2, 0) = beta * y * dp;
      J(3, 0) = 1;
      dfdt[2] = beta * p;
    } else {
      J(1, 1) = -1 / y;
      J(1, 2) = 1;
      J(2, 0) = beta * y * dp;
      J(3, 0) = 2 * std::numbers::pi * y;
      dfdt[1] = x[1] / (y * y);
      dfdt[2] = beta * p;
      dfdt[3] = 2 * std::numbers::pi * x[0];
    }
  }
};

// blow-up NEP in flux form: f''' = J |f|^-n, J' = -beta y f' - alpha f
struct BlowupSys {
  double n, alpha, beta;
  void rhs(double y, const V4& x, V4& d) const {
    double t = x[3] == 0 ? 0.0 : x[3] * inv_pow(x[0], n);
    d << x[1], x[2], t, -beta * y * x[1] - alpha * x[0];
  }
  void jac(double y, const V4& x, M4& J, V4& dfdt) const {
    J.setZero();
    dfdt.setZero();
    J(0, 1) = 1;
    J(1, 2) = 1;
    double ip = inv_pow(x[0], n);
    J(2, 0) = x[3] == 0 ? 0.0 : -n * x[3] * sgn(x[0]) * ip / std::max(std::abs(x[0]), 1e-150);
    J(2, 3) = ip;
    J(3, 0) = -alpha;
    J(3, 1) = -beta * y;
    dfdt[3] = -beta * x[1];
  }
};

struct Run {
  std::vector<V4> states;  // states[i] at node i0 + i
  int sign = 0;            // sign of f at divergence, 0 if the end was reached
  int last = 0;            // last node index reached
  bool stiff = false;
};

template <class Sys>
Run integrate_nodes(const Sys& sys, const ProfileConfig& cfg, V4 x, double y, int i0, int i_end, double h,
                    double threshold, bool store, double scale = 1.0) {
  Rosenbrock4<4> rb;
  rb.rtol = cfg.rtol;
  rb.atol = cfg.atol * scale;
  rb.h_min = cfg.h_min;
  rb.h_max = h;
  Run r;
  if (store) r.states.push_back(x);
  r.last = i0;
  double dt = h * 0.1;
  for (int i = i0 + 1; i <= i_end; ++i) {
    try {
      rb.advance(sys, x, y, i * h, dt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::StiffnessFailure) throw;
      r.stiff = true;
      r.sign = sgn(x[0]);
      return r;
    }
    y = i * h;
    r.last = i;
    if (store) r.states.push_back(x);
    if (std::abs(x[0]) > threshold) {
      r.sign = sgn(x[0]);
      return r;
    }
  }
  return r;
}

struct SegmentResult {
  std::vector<V4> states;  // nodes 0..M
  int segments = 0, iterations = 0;
  double b = 0;
  bool stiff = false;
};

// segmented bisection: each segment fixes the amplitude of the growing mode to the bisection floor,
// then restarts where the two bracketing shots still agree
SegmentResult segmented_global(const GlobalSys& sys, double f0, double b_guess, double b_spread,
                               const ProfileConfig& cfg, int M) {
  const double h = cfg.h_out;
  SegmentResult out;
  out.states.assign(M + 1, V4::Zero());
  // start state; N=2 starts slightly off the axis with the series
  auto start = [&](double b) {
    V4 x;
    if (sys.N == 1) {
      x << f0, 0, b, 0;
    } else {
      x << f0, 0, b, 0;  // Lap f(0) = b, f''(0) = b/2
    }
    return x;
  };
  int j0 = 0;
  V4 xj = start(b_guess);
  double env = std::abs(f0);
  const int W = std::max(1, static_cast<int>(std::lround(3.0 / h)));
  for (int seg = 0; seg < cfg.max_segments; ++seg) {
    ++out.segments;
    double y0 = j0 * h;
    auto shoot = [&](double p, bool store) {
      V4 x = xj;
      double y = y0;
      if (seg == 0) {
        x = start(p);
        if (sys.N == 2) {
          // one short series step off the axis
          double r0 = 1e-6;
          double b = p;
          x << f0 + b * r0 * r0 / 4, b * r0 / 2, b, 0;
          y = r0;
        }
      } else {
        x[2] += p;
      }
      if (seg == 0 && sys.N == 2) {
        // integrate from r0 to the first node
        Run r = integrate_nodes(sys, cfg, x, y, 0, M, h, 2 * env, store, env);
        if (store && !r.states.empty()) r.states[0] = start(p);
        return r;
      }
      return integrate_nodes(sys, cfg, x, y, j0, M, h, 2 * env, store, env);
    };
    double lo, hi;
    if (seg == 0) {
      lo = b_guess - b_spread;
      hi = b_guess + b_spread;
    } else {
      double D = 1e-6 * std::max(std::abs(xj[2]), env);
      lo = -D;
      hi = D;
    }
    Run rlo = shoot(lo, false), rhi = shoot(hi, false);
    for (int e = 0; e < 40 && rlo.sign == rhi.sign && rlo.sign != 0; ++e) {
      double w = hi - lo, c = 0.5 * (lo + hi);
      lo = c - w;
      hi = c + w;
      rlo = shoot(lo, false);
      rhi = shoot(hi, false);
      ++out.iterations;
    }
    if (rlo.sign == rhi.sign && rlo.sign != 0)
      throw Error(ErrorKind::ShootingNoConvergence, "no sign bracket in segment " + std::to_string(seg));
    bool reached = rlo.sign == 0 || rhi.sign == 0;
    double best = rlo.sign == 0 ? lo : hi;
    for (int it = 0; it < cfg.max_iter && !reached; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      Run rm = shoot(mid, false);
      ++out.iterations;
      if (rm.sign == 0) {
        reached = true;
        best = mid;
        break;
      }
      if (rm.sign == rlo.sign) {
        lo = mid;
        rlo = rm;
      } else {
        hi = mid;
        rhi = rm;
      }
    }
    if (seg == 0) out.b = reached ? best : 0.5 * (lo + hi);
    Run a = shoot(reached ? best : lo, true);
    out.stiff = out.stiff || a.stiff;
    if (reached) {
      for (std::size_t i = 0; i < a.states.size(); ++i) out.states[j0 + i] = a.states[i];
      for (int i = a.last + 1; i <= M; ++i) out.states[i] = a.states.back();
      return out;
    }
    Run b = shoot(hi, true);
    int end = std::min(a.last, b.last);
    // restart where the bracketing shots still agree to 1e-7 of the local envelope
    int jn = j0;
    double env_run = 0;
    for (int i = j0; i <= end; ++i) {
      double fa = a.states[i - j0][0], fb = b.states[i - j0][0];
      env_run = 0;
      for (int q = std::max(j0, i - W); q <= i; ++q) env_run = std::max(env_run, std::abs(a.states[q - j0][0]));
      if (std::abs(fa - fb) > 1e-7 * env_run) break;
      jn = i;
    }
    for (int i = j0; i <= jn; ++i) out.states[i] = a.states[i - j0];
    double env_new = 0;
    for (int q = std::max(0, jn - W); q <= jn; ++q) env_new = std::max(env_new, std::abs(out.states[q][0]));
    if (env_new < 1e-3 * cfg.tail_tol || jn >= M || (jn <= j0 + 5 && env_new < cfg.tail_tol)) {
      // amplitude below the interface tolerance: beyond the last node the profile is zero
      V4 z = out.states[jn];
      for (int i = jn + 1; i <= M; ++i) {
        out.states[i] = V4::Zero();
        out.states[i][3] = z[3];
      }
      return out;
    }
    if (jn <= j0 + 5) {
      if (a.stiff || b.stiff) {
        out.stiff = true;
        V4 z = out.states[jn];
        for (int i = jn + 1; i <= M; ++i) {
          out.states[i] = V4::Zero();
          out.states[i][3] = z[3];
        }
        return out;
      }
      throw Error(ErrorKind::ShootingNoConvergence,
                  "segment " + std::to_string(seg) + " made no progress at y = " + std::to_string(jn * h));
    }
    j0 = jn;
    xj = out.states[j0];
    env = env_new;
  }
  throw Error(ErrorKind::ShootingNoConvergence, "segment budget exhausted");
}

void finish_profile(SimilarityProfile& p, const ProfileConfig& cfg) {
  const std::size_t M = p.f.size();
  // interface: first node followed by tail_nodes nodes below tail_tol
  int run = 0;
  for (std::size_t i = 0; i < M; ++i) {
    if (std::abs(p.f[i]) < cfg.tail_tol) {
      if (++run >= cfg.tail_nodes) {
        p.interface_radius = p.grid.coord(static_cast<int>(i + 1 - cfg.tail_nodes));
        break;
      }
    } else {
      run = 0;
    }
  }
  double lim = p.interface_radius ? *p.interface_radius : p.grid.R;
  p.zero_count = 0;
  p.tail_zero_count = 0;
  double prev = 0;
  for (std::size_t i = 0; i < M; ++i) {
    double y = p.grid.coord(static_cast<int>(i));
    if (y > lim) break;
    double v = p.f[i];
    if (v == 0) continue;
    if (prev != 0 && (v < 0) != (prev < 0)) {
      ++p.zero_count;
      if (y >= 0.9 * lim) ++p.tail_zero_count;
    }
    prev = v;
  }
}

}  // namespace

SimilarityProfile make_profile(Kind kind, double n, double alpha, const Grid& g, std::vector<double> f, int parity,
                               int k) {
  SimilarityProfile p;
  p.kind = kind;
  p.n = n;
  p.alpha = alpha;
  p.beta_exp = (1 - alpha * n) / 4;
  p.N = g.N;
  p.k = k;
  p.parity = parity;
  p.grid = g;
  p.f = std::move(f);
  if (p.f.size() != g.size()) throw Error(ErrorKind::GridMismatch, "profile samples do not match the grid");
  return p;
}

std::vector<double> residual_nep(const SimilarityProfile& p) {
  const Grid& g = p.grid;
  const int M = static_cast<int>(g.size());
  const double h = g.h, n = p.n, a = p.alpha, b = p.beta_exp;
  const int G = 6;
  std::vector<double> e(M + G, 0.0);
  const double s = p.parity ? -1.0 : 1.0;
  for (int i = 0; i < M; ++i) e[G + i] = p.f[i];
  for (int i = 1; i <= G; ++i) e[G - i] = s * (i < M ? p.f[i] : 0.0);
  auto F = [&](int i) { return e[G + i]; };
  auto d1 = [&](auto&& u, int i) { return (u(i - 2) - 8 * u(i - 1) + 8 * u(i + 1) - u(i + 2)) / (12 * h); };
  auto d2 = [&](auto&& u, int i) {
    return (-u(i - 2) + 16 * u(i - 1) - 30 * u(i) + 16 * u(i + 1) - u(i + 2)) / (12 * h * h);
  };
  auto d3 = [&](auto&& u, int i) {
    return (-u(i + 3) + 8 * u(i + 2) - 13 * u(i + 1) + 13 * u(i - 1) - 8 * u(i - 2) + u(i - 3)) / (8 * h * h * h);
  };
  std::vector<double> r(M, std::nan(""));
  if (p.N == 1) {
    // flux q = |f|^n f''' on nodes -2..M-4
    std::vector<double> q(M + G, std::nan(""));
    for (int i = -2; i + 3 < M; ++i) q[G + i] = std::pow(std::abs(F(i)), n) * d3(F, i);
    auto Q = [&](int i) { return q[G + i]; };
    for (int i = 0; i + 5 < M; ++i) {
      double y = g.coord(i);
      double div = d1(Q, i);
      double lin = b * y * d1(F, i) + a * F(i);
      r[i] = p.kind == Kind::Global ? -div + lin : -div - lin;
    }
    return r;
  }
  // radial N=2: -(1/r)(r |f|^n (Lap f)')' + beta r f' + alpha f (global sign)
  std::vector<double> L(M + G, std::nan(""));
  for (int i = -4; i + 2 < M; ++i) {
    double y = i * h;
    L[G + i] = std::abs(i) == 0 ? 2 * d2(F, 0) : d2(F, i) + d1(F, i) / y;
  }
  auto Lf = [&](int i) { return L[G + i]; };
  std::vector<double> q(M + G, std::nan(""));
  for (int i = -2; i + 4 < M; ++i) q[G + i] = i * h * std::pow(std::abs(F(i)), n) * d1(Lf, i);
  auto Q = [&](int i) { return q[G + i]; };
  for (int i = 1; i + 6 < M; ++i) {
    double y = g.coord(i);
    double div = d1(Q, i) / y;
    double lin = b * y * d1(F, i) + a * F(i);
    r[i] = p.kind == Kind::Global ? -div + lin : -div - lin;
  }
  return r;
}

double residual_sup(const SimilarityProfile& p, double radius) {
  auto r = residual_nep(p);
  double m = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (std::isnan(r[i])) continue;
    if (radius >= 0 && p.grid.coord(static_cast<int>(i)) > radius) continue;
    m = std::max(m, std::abs(r[i]));
  }
  return m;
}

SimilarityProfile shoot_global_profile(double n, int k, int N, const ProfileConfig& cfg) {
  if (k != 0) throw Error(ErrorKind::OrderExceeded, "global profiles are shot for k = 0 only");
  if (N != 1 && N != 2) throw Error(ErrorKind::UnsupportedDimension, "N must be 1 or 2");
  if (!(n > 0 && n <= 0.5)) throw Error(ErrorKind::ConfigError, "global shooting needs 0 < n <= 0.5");
  // correctly rounded from the exact values at the binary n
  const Rational rn(n);
  const double alpha = alpha_exact(0, rn, Kind::Global, N).convert_to<double>();
  const double beta = (1 / (4 + N * rn)).convert_to<double>();
  GlobalSys sys{n, beta, N};
  const int M = static_cast<int>(std::lround(cfg.y_max / cfg.h_out));
  // first pass at f(0) = 1, then rescale with g = A f(y/B), A^n = B^4, to unit mass
  SegmentResult s1 = segmented_global(sys, 1.0, N == 1 ? -0.3 : -0.6, 0.3, cfg, M);
  double m1 = (N == 1 ? 2.0 : 1.0) * s1.states[M][3];
  if (!(m1 > 0)) throw Error(ErrorKind::ShootingNoConvergence, "non-positive mass in the first pass");
  double A = std::pow(m1, -4.0 / (4.0 + N * n));
  double B = std::pow(A, n / 4.0);
  double bg = A * s1.b / (B * B);
  SegmentResult s2 = segmented_global(sys, A, bg, 1e-9 * std::abs(bg) + 1e-15, cfg, M);
  Grid g = Grid::make(N, cfg.h_out, M * cfg.h_out, true);
  std::vector<double> f(M + 1);
  for (int i = 0; i <= M; ++i) f[i] = s2.states[i][0];
  SimilarityProfile p = make_profile(Kind::Global, n, alpha, g, std::move(f), 0, 0);
  p.beta_exp = beta;
  p.mass = (N == 1 ? 2.0 : 1.0) * s2.states[M][3];
  p.mass_trapezoid = integrate(g, p.f);
  p.segments = s1.segments + s2.segments;
  p.iterations = s1.iterations + s2.iterations;
  p.shoot_parameter = s2.b;
  p.last_good_only = s2.stiff;
  finish_profile(p, cfg);
  return p;
}

SimilarityProfile shoot_blowup_profile(double n, int k, int N, double alpha_guess, const ProfileConfig& cfg) {
  if (N != 1) throw Error(ErrorKind::UnsupportedDimension, "blow-up shooting is 1D");
  if (n < 0 || n > 0.3) throw Error(ErrorKind::ConfigError, "blow-up shooting needs 0 <= n <= 0.3");
  const int M = static_cast<int>(std::lround(cfg.blowup_L / cfg.h_out));
  Grid g = Grid::make(1, cfg.h_out, M * cfg.h_out, true);
  if (k == 0) {
    SimilarityProfile p = make_profile(Kind::Blowup, n, 0.0, g, std::vector<double>(M + 1, 1.0), 0, 0);
    p.growth_exponent = 0.0;
    return p;
  }
  if (k > 2) throw Error(ErrorKind::OrderExceeded, "blow-up shooting implemented for k <= 2");
  const int parity = k % 2;
  const double L = M * cfg.h_out;

  auto initial = [&](double s, double alpha, double& y0) {
    V4 x;
    double beta = (1 - alpha * n) / 4;
    if (parity) {
      // f = y + ..., J(0) = s
      y0 = 1e-4;
      double q1 = 1 - n, q2 = 2 - n, q3 = 3 - n;
      x << y0 + s * std::pow(y0, q3) / (q1 * q2 * q3), 1 + s * std::pow(y0, q2) / (q1 * q2),
          s * std::pow(y0, q1) / q1, s - (alpha + beta) * y0 * y0 / 2;
    } else {
      // f(0) = s, f''(0) = 2
      y0 = 0;
      x << s, 0, 2, 0;
    }
    return x;
  };
  auto gamma_of = [&](double alpha) { return -4 * alpha / (1 - alpha * n); };
  auto shoot = [&](double s, double alpha, bool store) {
    BlowupSys sys{n, alpha, (1 - alpha * n) / 4};
    double y0;
    V4 x = initial(s, alpha, y0);
    return integrate_nodes(sys, cfg, x, y0, 0, M, cfg.h_out, 1e12, store);
  };
  auto mismatch = [&](double s, double alpha) {
    Run r = shoot(s, alpha, false);
    Eigen::Vector2d m;
    if (r.last < M || r.sign != 0) {
      m << 1e6, 1e6;
      return m;
    }
    // state at L: re-run storing only the end is cheaper than storing everything
    Run rs = shoot(s, alpha, true);
    const V4& x = rs.states.back();
    double gm = gamma_of(alpha);
    m << L * x[1] / x[0] - gm, L * L * x[2] / x[0] - gm * (gm - 1);
    return m;
  };
  double s = 0, alpha = alpha_guess;
  if (!parity) s = 1e-6;
  int it = 0;
  Eigen::Vector2d m = mismatch(s, alpha);
  for (; it < cfg.secant_max; ++it) {
    const double es = 1e-7, ea = 1e-7;
    Eigen::Matrix2d Jm;
    Jm.col(0) = (mismatch(s + es, alpha) - m) / es;
    Jm.col(1) = (mismatch(s, alpha + ea) - m) / ea;
    Eigen::Vector2d d = Jm.fullPivLu().solve(-m);
    if (!d.allFinite()) throw Error(ErrorKind::SecantStall, "singular mismatch Jacobian");
    double lam = 1.0;
    Eigen::Vector2d mn;
    for (int ls = 0; ls < 30; ++ls) {
      mn = mismatch(s + lam * d[0], alpha + lam * d[1]);
      if (mn.norm() < m.norm() || mn.norm() < 1e-12) break;
      lam *= 0.5;
    }
    s += lam * d[0];
    alpha += lam * d[1];
    m = mn;
    if (std::abs(lam * d[1]) < cfg.alpha_tol && m.norm() < 1e-6) break;
  }
  if (it >= cfg.secant_max) throw Error(ErrorKind::SecantStall, "alpha did not settle in " + std::to_string(it) + " iterations");
  Run r = shoot(s, alpha, true);
  std::vector<double> f(M + 1);
  for (int i = 0; i <= M; ++i) f[i] = r.states[i][0];
  if (parity) f[0] = 0;
  SimilarityProfile p = make_profile(Kind::Blowup, n, alpha, g, std::move(f), parity, k);
  p.iterations = it + 1;
  p.shoot_parameter = s;
  // growth exponent from a log-log fit on [L/2, L]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int i = M / 2; i <= M; ++i) {
    double ly = std::log(g.coord(i)), lf = std::log(std::abs(p.f[i]));
    sx += ly;
    sy += lf;
    sxx += ly * ly;
    sxy += ly * lf;
    ++cnt;
  }
  double gfit = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  p.growth_exponent = gfit;
  if (n > 0 && gfit > 4.0 / n - cfg.growth_margin)
    throw Error(ErrorKind::WrongBundle, "growth exponent " + std::to_string(gfit) + " is on the 4/n bundle");
  for (int i = 1; i <= M; ++i)
    if ((p.f[i] < 0) != (p.f[i - 1] < 0) && p.f[i - 1] != 0) ++p.zero_count;
  return p;
}

MassCheck mass_conservation_check(const SimilarityProfile& p) {
  if (p.kind != Kind::Global) throw Error(ErrorKind::WrongKind, "mass check applies to global profiles");
  MassCheck c;
  c.mass_error = std::abs(p.mass - 1.0);
  c.trapezoid_error = std::abs(integrate(p.grid, p.f) - 1.0);
  Rational n(p.n);
  Rational alpha = alpha_exact(p.k, n, Kind::Global, p.N);
  Rational beta = (Rational(1) - alpha * n) / 4;
  c.exponent_identity = (-alpha + beta * p.N).convert_to<double>();
  if (p.alpha != alpha.convert_to<double>()) c.exponent_identity = std::abs(p.alpha - alpha.convert_to<double>());
  return c;
}

std::vector<ExpansionRow> expansion_diagnostic(const Grid& g, const std::vector<double>& f,
                                               const std::vector<double>& n_list, int k) {
  if (f.size() != g.size()) throw Error(ErrorKind::GridMismatch, "samples do not match the grid");
  std::vector<ExpansionRow> rows;
  if (n_list.empty()) return rows;
  double fmax = 0;
  for (double v : f) fmax = std::max(fmax, std::abs(v));
  double window = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(f[i]) >= 1e-3 * fmax) window = std::max(window, g.abs_y(i));
  double nmax = *std::max_element(n_list.begin(), n_list.end());
  double cut_common = std::exp(-1.0 / nmax);
  for (double n : n_list) {
    ExpansionRow r;
    r.n = n;
    double cut = std::exp(-1.0 / n);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double a = std::abs(f[i]), w = g.weight(i);
      if (a <= cut) {
        if (g.abs_y(i) <= window) r.excluded_measure += w;
        continue;
      }
      double lf = std::log(a);
      double e = std::abs(std::expm1(n * lf) / n - lf);
      r.l1_error += w * e;
      r.second_order += w * 0.5 * n * lf * lf;
      if (a > cut_common) r.l1_error_common += w * e;
    }
    r.ratio = r.second_order > 0 ? r.l1_error / r.second_order : 0.0;
    r.l8_bound = std::exp(-1.0 / (n * k)) / n;
    rows.push_back(r);
  }
  return rows;
}

double profile_value(const SimilarityProfile& p, double y) {
  const Grid& g = p.grid;
  double s = 1;
  if (y < 0) {
    y = -y;
    if (p.parity) s = -1;
  }
  const int M = static_cast<int>(g.size()) - 1;
  double x = y / g.h;
  int i = static_cast<int>(std::floor(x));
  if (i >= M) return s * p.f[M];
  int b = std::clamp(i - 1, -2, M - 3);
  auto at = [&](int j) { return j < 0 ? (p.parity ? -p.f[-j] : p.f[-j]) : p.f[j]; };
  double v = 0;
  for (int a = 0; a < 4; ++a) {
    double l = 1;
    for (int c = 0; c < 4; ++c)
      if (c != a) l *= (x - (b + c)) / static_cast<double>(a - c);
    v += l * at(b + a);
  }
  return s * v;
}

double sup_distance(const SimilarityProfile& p, const std::function<double(double)>& ref, double radius) {
  double m = 0;
  for (std::size_t i = 0; i < p.f.size(); ++i) {
    double y = p.grid.coord(static_cast<int>(i));
    if (y > radius) break;
    m = std::max(m, std::abs(p.f[i] - ref(y)));
  }
  return m;
}

double scaling_check(const SimilarityProfile& p, double lambda, double t) {
  if (p.kind != Kind::Global) throw Error(ErrorKind::WrongKind, "scaling check applies to global profiles");
  if (p.n <= 0) throw Error(ErrorKind::ConfigError, "scaling needs n > 0");
  const double a = p.alpha, b = p.beta_exp;
  const double mu = std::pow(lambda, b), nu = std::pow(lambda, (4 * b - 1) / p.n);
  auto u = [&](double x, double tt) { return std::pow(tt, -a) * profile_value(p, x * std::pow(tt, -b)); };
  double m = 0;
  const double lim = 0.8 * p.grid.R * std::pow(std::min(t, t / lambda), b);
  for (double x = 0; x <= lim; x += p.grid.h * 0.37) m = std::max(m, std::abs(nu * u(x / mu, t / lambda) - u(x, t)));
  return m;
}

}  // namespace tfe
