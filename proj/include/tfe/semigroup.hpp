#pragma once

#include <string>
#include <vector>

#include "tfe/spectral.hpp"

namespace tfe {

struct EvolutionState {
  Grid grid;
  double tau = 0;
  std::vector<double> values;
  std::string provenance;  // "spectral" | "convolution"
  double truncation_estimate = 0;

  SampledFunction as_function() const { return SampledFunction(grid, values); }
};

double moments(const SampledFunction& u0, const MultiIndex& beta, double tail_tol = 1e-6);

EvolutionState spectral_solution(const SampledFunction& u0, double tau, int kmax, const KernelTable& table,
                                 double tail_tol = 1e-6);

// output on the centered sub-grid of radius r_out (default R/2 of the table)
EvolutionState convolution_solution(const SampledFunction& u0, double tau, const KernelTable& table,
                                    double r_out = 0);

// cubic (tensor Lagrange) interpolation of a table slice
double interpolate(const KernelTable& table, const MultiIndex& beta, const double* y);

// u0 minus its projections onto psi_beta, |beta| < k
SampledFunction moment_cancelled(const SampledFunction& seed, int k, const KernelTable& table);
// narrow seed H_k(z1/sigma) exp(-|z|^2/sigma^2); its moments below order k vanish,
// the projection only removes roundoff
SampledFunction decay_test_data(int k, const KernelTable& table, double sigma = 0.5);

struct DecayFitResult {
  double lambda = 0;
  std::vector<double> taus, norms;
};

DecayFitResult decay_rate_fit(const SampledFunction& u0, const std::vector<double>& taus, const KernelTable& table);

// restriction of a function to a nested grid with the same spacing
SampledFunction restrict_to(const SampledFunction& f, const Grid& inner);

}  // namespace tfe
