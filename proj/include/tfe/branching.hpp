#pragma once

#include <array>
#include <string>
#include <vector>

#include "tfe/spectral.hpp"

namespace tfe {

enum class Kind { Global, Blowup };
const char* kind_name(Kind k);
Kind parse_kind(const std::string& s);

// value and the derivatives a log-weighted integrand needs, sampled on a grid
struct LogField {
  Grid grid;
  std::vector<double> v;
  std::vector<std::vector<double>> grad;     // N components
  std::vector<std::vector<double>> gradlap;  // grad Lap, N components
  std::vector<double> bilap;
  bool zero_gradlap = false;  // exact: grad Lap vanishes identically
};

// combo maps beta -> coefficient of the raw derivative D^beta F
LogField field_from_kernel(const std::map<MultiIndex, double>& combo, const KernelTable& table);
LogField field_from_eigenfunction(const MultiIndex& beta, const KernelTable& table);
LogField field_from_polynomial(const SparsePolynomial& p, const Grid& grid);
LogField combine(const std::vector<double>& c, const std::vector<LogField>& fields);

struct LogIntegralOptions {
  double n_floor = 0.05;         // nodes with |combo| < exp(-1/n_floor) are excluded
  double thick_fraction = 1e-3;  // near-zero node fraction that signals a thick nodal set
  bool singular_corrections = true;
};

struct LogIntegral {
  double direct = 0;  // <adj, div(ln|combo| grad Lap target)>
  double ibp = 0;     // -<grad adj, ln|combo| grad Lap target>
  double discrepancy = 0;
  double value = 0;   // the integrated-by-parts value
  double excluded_measure = 0;
  double l8_scale = 0;  // (1/n) exp(-1/n) at n = n_floor
  double near_zero_fraction = 0;
  int zeros = 0;        // corrected sign changes (1D)
};

LogIntegral log_weighted_integral(const LogField& adj, const LogField& combo, const LogField& target,
                                  const LogIntegralOptions& opt = {});

struct Gamma01 {
  double gamma = 0;
  double denominator = 0;
  double transport = 0;  // (N/16) <1, y.grad psi_0>
  LogIntegral log_term;
};

Gamma01 gamma01(double eta, const KernelTable& table, double denom_tol = 1e-8);
double mu10(const KernelTable& table);
// <1, -(N/16) y.grad psi_0 - (N^2/16) psi_0>
double mass_pairing(const KernelTable& table);
// <phi, y.grad psi_beta> through kernel slices
double pairing_y_grad(const SampledFunction& phi, const MultiIndex& beta, const KernelTable& table);

struct SimpleSolvability {
  int k = 0;
  Kind kind = Kind::Global;
  double coefficient = 0;  // gamma_{k,1} (global) or mu_{1,k} (blow-up)
  double residual = 0;     // solvability pairing re-evaluated with the other log-integral form
  double pairing = 0;      // <psi*_k, psi_k>
  double transport = 0;    // y.grad pairing
  LogIntegral log_term;
};

SimpleSolvability assemble_simple_solvability(int k, Kind kind, double eta, const KernelTable& table,
                                              const LogIntegralOptions& opt = {});

// a x^2 + b xy + c y^2 + d x + e y + f
struct Conic {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
  double eval(double x, double y) const { return a * x * x + b * x * y + c * y * y + d * x + e * y + f; }
  double scale() const;
};

struct Quadratic {
  double A = 0, B = 0, C = 0;
  double eval(double x) const { return (A * x + B) * x + C; }
};

struct ConicSystem {
  int k = 1;
  Kind kind = Kind::Blowup;
  double eta = 1;
  double alpha = 0;
  std::vector<MultiIndex> basis;
  std::vector<std::string> labels;  // unknowns
  // E_i = x (U_i.c + Ox_i(c)) + (V_i.c + O0_i(c)), x = gamma or mu
  Eigen::MatrixXd U, V;
  Eigen::MatrixXd transport;  // y.grad pairing matrix
  Eigen::MatrixXd gram;       // eigenspace pairing matrix
  std::vector<Conic> forms;   // eliminated forms in the free coefficients (k=1: a,d,f used)
  Quadratic scalar;           // k=1: quadratic in x after eliminating c2
  std::vector<std::array<double, 2>> lattice;
  std::vector<std::vector<double>> omega;  // per form, per lattice point
  std::vector<double> omega_norm;
  int degenerate_samples = 0;
  double coef_floor = 0;
};

ConicSystem assemble_semisimple_system(int k, Kind kind, const KernelTable& table, double eta = 1.0,
                                       int lattice_n = 0, const LogIntegralOptions& opt = {});

enum class QuadStatus { Regular, Linear, Continuum, NoSolution };
const char* quad_status_name(QuadStatus s);

struct RootCertificate {
  double root = 0;
  bool cond_a = false, cond_b = false, cond_c = false;
  bool cond_b_literal = false;  // (b) with -B/(4A) as printed
  bool control_holds = false;
  double lo = 0, hi = 0;  // enclosure robust to the omega perturbation
  bool enclosure_certified = false;
};

struct QuadraticReport {
  QuadStatus status = QuadStatus::Regular;
  std::vector<double> real_roots;
  std::vector<RootCertificate> roots;  // those in [0,1]
  double critical_point = 0, critical_value = 0;
  double omega_norm = 0;
};

QuadraticReport solve_quadratic_branch(const Quadratic& q, double omega_norm = 0, double floor = 0,
                                       bool strict = false);

struct ScanResult {
  int count = 0;
  bool continuum = false;
  double max_abs = 0;
};
// dense scan of F + omega over c2 in [0,1]
ScanResult dense_scan_quadratic(const ConicSystem& sys, int points = 10000);

enum class ConicType { Ellipse, Parabola, Hyperbola, Degenerate };
struct ConicClass {
  ConicType type = ConicType::Degenerate;
  bool circle = false;
  bool rectangular = false;
  bool degenerate = false;  // vanishing 3x3 determinant
  bool line = false;        // quadratic part identically zero
  double discriminant = 0;
  double determinant = 0;
};
const char* conic_type_name(ConicType t);
ConicClass conic_classify(const Conic& P, double tol = 1e-12);

struct Intersection {
  double x = 0, y = 0;
  bool in_simplex = false;
  double condition = 0;
};
struct IntersectionReport {
  std::vector<Intersection> points;
  int in_simplex = 0;
  bool ill_conditioned = false;
  std::array<double, 5> resultant{};  // quartic coefficients after rotation, low to high
};

IntersectionReport intersect_conics(const Conic& P, const Conic& Q, double floor = 1e-12);
// sign-change scan of two forms (plus omega) over the simplex
ScanResult dense_scan_conics(const ConicSystem& sys, int n = 400);

// exact values for rational n (global) or n = 0 (blow-up)
Rational alpha_exact(int k, const Rational& n, Kind kind, int N);
double alpha_expansion(int k, double n, Kind kind, int N, double mu1 = 0);
// mu_{1,k} of the 1D blow-up problem, from the simple solvability condition
double mu1k(int k, const KernelTable& table);

// eigenvalues of L(alpha,n) = -Lap^2 + (1-alpha n)/4 y.grad + alpha
double spectrum_shift(double alpha, double n, int k, int N);
double spectrum_shift_as_printed(double alpha, double n, int k);
// sup residual of L(alpha,n) applied to the rescaled psi_k against spectrum_shift
double spectrum_shift_residual(double alpha, double n, int k, const KernelTable& table);

}  // namespace tfe
