#pragma once

#include <map>
#include <vector>

#include "tfe/common.hpp"

namespace tfe {

struct QuadConfig {
  double quad_tol = 1e-6;
  double tail_tol = 1e-6;
  double xi_max = 3.2;     // Fourier cutoff, xi^4 ~ 105
  int gl_points = 20;      // per panel
  double panel_phase = 5.0;  // max phase advance of exp(i y xi) per panel
};

// Fourier evaluation of D^beta F at arbitrary points
class KernelEvaluator {
 public:
  // rmax bounds |y_i| of every requested point
  KernelEvaluator(int N, double rmax, const QuadConfig& q = {});
  double eval(const MultiIndex& beta, const double* y) const;
  // full complex sum over the symmetric node set, imaginary part only
  double imag_residue(const MultiIndex& beta, const double* y) const;
  const std::vector<double>& nodes() const { return xi_; }
  const std::vector<double>& weights() const { return w_; }

 private:
  int N_;
  std::vector<double> xi_, w_;
};

struct DecayFit {
  double D = 0;
  double d = 0;
  double D_ls = 0;         // before inflation
  double p_free = 0;       // best exponent when the power is left free
  int points = 0;
  double y_lo = 0, y_hi = 0;
};

struct KernelTable {
  Grid grid;
  int K = 0;
  std::map<MultiIndex, std::vector<double>> values;
  double D_fit = 0, d_fit = 0;
  double imag_residue = 0;
  double tail_estimate = 0;

  const std::vector<double>& at(const MultiIndex& b) const;
  SampledFunction slice(const MultiIndex& b) const;
  bool has(const MultiIndex& b) const { return values.count(b) > 0; }
};

// steepest-descent decay constant 3 * 2^{-8/3} of the 1D kernel
double asymptotic_decay_constant();

KernelTable eval_kernel(int N, const Grid& grid, int K, const QuadConfig& quad = {});
DecayFit check_decay(const KernelTable& table);
// decay fit of a profile along the positive first axis; used on test doubles too
DecayFit fit_decay(const Grid& grid, const std::vector<double>& values);
// per-beta D with d fixed to the table's d_fit
std::map<MultiIndex, double> decay_prefactors(const KernelTable& table);
double kernel_mass(const KernelTable& table, const MultiIndex& beta = {});
double integrate(const Grid& g, const std::vector<double>& v);

Grid default_grid(int N);

}  // namespace tfe
