#include "tfe/common.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace tfe {

const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::QuadratureDivergence: return "QuadratureDivergence";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::FitFailure: return "FitFailure";
    case ErrorKind::ExponentMismatch: return "ExponentMismatch";
    case ErrorKind::OrderExceeded: return "OrderExceeded";
    case ErrorKind::BoundaryContamination: return "BoundaryContamination";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::TailTooFat: return "TailTooFat";
    case ErrorKind::InterpolationOutOfRange: return "InterpolationOutOfRange";
    case ErrorKind::InsufficientDecay: return "InsufficientDecay";
    case ErrorKind::ThickNodalSet: return "ThickNodalSet";
    case ErrorKind::VanishingDenominator: return "VanishingDenominator";
    case ErrorKind::DegenerateQuadratic: return "DegenerateQuadratic";
    case ErrorKind::AllZeroQuadraticPart: return "AllZeroQuadraticPart";
    case ErrorKind::IllConditionedResultant: return "IllConditionedResultant";
    case ErrorKind::ContinuumDetected: return "ContinuumDetected";
    case ErrorKind::ShootingNoConvergence: return "ShootingNoConvergence";
    case ErrorKind::StiffnessFailure: return "StiffnessFailure";
    case ErrorKind::WrongBundle: return "WrongBundle";
    case ErrorKind::SecantStall: return "SecantStall";
    case ErrorKind::WrongKind: return "WrongKind";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

int MultiIndex::order() const {
  int s = 0;
  for (int x : c) s += x;
  return s;
}

std::uint64_t MultiIndex::factorial() const {
  std::uint64_t f = 1;
  for (int x : c)
    for (int j = 2; j <= x; ++j) f *= static_cast<std::uint64_t>(j);
  return f;
}

std::string MultiIndex::label() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) os << '.';
    os << c[i];
  }
  return os.str();
}

MultiIndex MultiIndex::plus(const MultiIndex& o) const {
  MultiIndex r = *this;
  for (std::size_t i = 0; i < c.size(); ++i) r.c[i] += o.c[i];
  return r;
}

MultiIndex MultiIndex::unit(int i) const {
  MultiIndex r = *this;
  r.c[i] += 1;
  return r;
}

bool operator<(const MultiIndex& a, const MultiIndex& b) {
  int oa = a.order(), ob = b.order();
  if (oa != ob) return oa < ob;
  return a.c > b.c;
}

bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.c == b.c; }

static void fill(int N, int pos, int left, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (pos == N - 1) {
    cur[pos] = left;
    out.emplace_back(cur);
    return;
  }
  for (int v = left; v >= 0; --v) {
    cur[pos] = v;
    fill(N, pos + 1, left - v, cur, out);
  }
}

std::vector<MultiIndex> multi_indices(int N, int k) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(N, 0);
  fill(N, 0, k, cur, out);
  return out;
}

std::vector<MultiIndex> multi_indices_upto(int N, int kmax) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= kmax; ++k) {
    auto m = multi_indices(N, k);
    out.insert(out.end(), m.begin(), m.end());
  }
  return out;
}

Grid Grid::make(int N, double h, double R, bool radial) {
  if (N != 1 && N != 2) throw Error(ErrorKind::UnsupportedDimension, "N=" + std::to_string(N));
  if (!(h > 0) || !(R > 0)) throw Error(ErrorKind::ConfigError, "grid needs h > 0 and R > 0");
  Grid g;
  g.N = N;
  g.h = h;
  g.R = R;
  g.radial = radial;
  if (g.per_axis() < 64) throw Error(ErrorKind::ConfigError, "grid has fewer than 64 nodes per axis");
  return g;
}

int Grid::per_axis() const {
  int m = static_cast<int>(std::lround(R / h));
  return radial ? m + 1 : 2 * m + 1;
}

std::size_t Grid::size() const {
  std::size_t n = per_axis();
  return (N == 2 && !radial) ? n * n : n;
}

double Grid::coord(int i) const {
  if (radial) return i * h;
  int m = static_cast<int>(std::lround(R / h));
  return (i - m) * h;
}

void Grid::node(std::size_t idx, double* y) const {
  if (N == 1 || radial) {
    y[0] = coord(static_cast<int>(idx));
    if (N == 2) y[1] = 0.0;
    return;
  }
  std::size_t n = per_axis();
  y[0] = coord(static_cast<int>(idx / n));
  y[1] = coord(static_cast<int>(idx % n));
}

double Grid::abs_y(std::size_t idx) const {
  double y[2];
  node(idx, y);
  return (N == 1 || radial) ? std::abs(y[0]) : std::hypot(y[0], y[1]);
}

double Grid::weight(std::size_t idx) const {
  int n = per_axis();
  auto w1 = [&](int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
  if (radial) {
    double r = coord(static_cast<int>(idx));
    double w = w1(static_cast<int>(idx));
    return N == 1 ? 2.0 * w : 2.0 * std::numbers::pi * r * w;
  }
  if (N == 1) return w1(static_cast<int>(idx));
  return w1(static_cast<int>(idx / n)) * w1(static_cast<int>(idx % n));
}

bool Grid::same_as(const Grid& o) const {
  return N == o.N && radial == o.radial && per_axis() == o.per_axis() && std::abs(h - o.h) < 1e-14 * h;
}

bool Grid::inner(std::size_t idx, double frac) const {
  double y[2];
  node(idx, y);
  double lim = frac * R + 1e-12;
  if (N == 1 || radial) return std::abs(y[0]) <= lim;
  return std::abs(y[0]) <= lim && std::abs(y[1]) <= lim;
}

SampledFunction sample(const Grid& g, const std::function<double(const double*)>& fn) {
  SampledFunction s(g);
  double y[2];
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.node(i, y);
    s.v[i] = fn(y);
  }
  return s;
}

double sup_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_diff(const SampledFunction& a, const SampledFunction& b, double inner_frac) {
  if (!a.grid.same_as(b.grid)) throw Error(ErrorKind::GridMismatch, "sup_diff on different grids");
  double m = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i)
    if (a.grid.inner(i, inner_frac)) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

static std::atomic<int> g_threads{1};

void set_threads(int n) { g_threads = std::max(1, n); }
int threads() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int t = std::min<std::size_t>(threads(), n == 0 ? 1 : n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int k = 0; k < t; ++k)
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
        next = n;
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace tfe
