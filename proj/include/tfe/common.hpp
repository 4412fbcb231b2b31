#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfe {

enum class ErrorKind {
  QuadratureDivergence,
  UnsupportedDimension,
  FitFailure,
  ExponentMismatch,
  OrderExceeded,
  BoundaryContamination,
  GridMismatch,
  TailTooFat,
  InterpolationOutOfRange,
  InsufficientDecay,
  ThickNodalSet,
  VanishingDenominator,
  DegenerateQuadratic,
  AllZeroQuadraticPart,
  IllConditionedResultant,
  ContinuumDetected,
  ShootingNoConvergence,
  StiffnessFailure,
  WrongBundle,
  SecantStall,
  WrongKind,
  ConfigError,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& msg)
      : std::runtime_error(std::string(error_name(k)) + ": " + msg), kind_(k) {}
  ErrorKind kind() const { return kind_; }
  // config errors map to exit code 3, everything else is numerical
  bool is_config() const { return kind_ == ErrorKind::ConfigError; }

 private:
  ErrorKind kind_;
};

struct MultiIndex {
  std::vector<int> c;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> v) : c(std::move(v)) {}
  MultiIndex(std::initializer_list<int> v) : c(v) {}

  int dim() const { return static_cast<int>(c.size()); }
  int order() const;
  // beta! as an exact integer (fits for |beta| <= 20)
  std::uint64_t factorial() const;
  std::string label() const;  // "b1.b2"
  MultiIndex plus(const MultiIndex& o) const;
  MultiIndex unit(int i) const;  // this + e_i
  int operator[](int i) const { return c[i]; }
};

// graded lexicographic: lower |beta| first, then lexicographically larger first
bool operator<(const MultiIndex& a, const MultiIndex& b);
bool operator==(const MultiIndex& a, const MultiIndex& b);

std::vector<MultiIndex> multi_indices(int N, int k);           // |beta| = k
std::vector<MultiIndex> multi_indices_upto(int N, int kmax);   // |beta| <= kmax

struct Grid {
  int N = 1;
  bool radial = false;
  double h = 0.05;
  double R = 40.0;

  static Grid make(int N, double h, double R, bool radial = false);
  int per_axis() const;   // node count per axis
  std::size_t size() const;
  double coord(int i) const;  // axis coordinate of index i
  // node coordinates for flat index
  void node(std::size_t idx, double* y) const;
  double abs_y(std::size_t idx) const;
  // trapezoid weight of flat index
  double weight(std::size_t idx) const;
  bool same_as(const Grid& o) const;
  // flat index is interior (inner fraction of the box)
  bool inner(std::size_t idx, double frac) const;
};

struct SampledFunction {
  Grid grid;
  std::vector<double> v;
  // optional exact representation as a combination of kernel derivatives
  std::map<MultiIndex, double> spectral;

  SampledFunction() = default;
  SampledFunction(const Grid& g) : grid(g), v(g.size(), 0.0) {}
  SampledFunction(const Grid& g, std::vector<double> vals) : grid(g), v(std::move(vals)) {}
  bool has_spectral() const { return !spectral.empty(); }
};

SampledFunction sample(const Grid& g, const std::function<double(const double*)>& fn);
double sup_norm(const std::vector<double>& v);
double sup_diff(const SampledFunction& a, const SampledFunction& b, double inner_frac = 1.0);

// thread count used by parallel loops; results never depend on it
void set_threads(int n);
int threads();
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tfe
