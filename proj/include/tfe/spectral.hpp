#pragma once

#include <Eigen/Dense>

#include "tfe/kernel.hpp"
#include "tfe/polynomial.hpp"

namespace tfe {

struct EigenPair {
  MultiIndex beta;
  Rational lambda;  // -|beta|/4
  SampledFunction direct;
  SparsePolynomial adjoint;
};

SampledFunction eigenfunction(const MultiIndex& beta, const KernelTable& table);
SparsePolynomial adjoint_polynomial(const MultiIndex& beta);
EigenPair eigen_pair(const MultiIndex& beta, const KernelTable& table);

// B f = -Lap^2 f + 1/4 y.grad f + N/4 f.
// Uses kernel slices when f carries a spectral representation the table covers,
// otherwise 4th-order finite differences (3 ghost layers at the boundary).
SampledFunction apply_B(const SampledFunction& f, const KernelTable* table, double tail_tol = 1e-6);
SampledFunction apply_B_fd(const SampledFunction& f, double tail_tol = 1e-6);
SparsePolynomial apply_B_star(const SparsePolynomial& p);

SampledFunction sample_polynomial(const Grid& g, const SparsePolynomial& p);

enum class Weight { None, Rho, RhoStar };
double inner_product(const SampledFunction& f, const SampledFunction& g, Weight w = Weight::None, double a = 0);
double inner_product(const SampledFunction& f, const SparsePolynomial& p, Weight w = Weight::None, double a = 0);

struct GramReport {
  std::vector<MultiIndex> betas;
  Eigen::MatrixXd G;
  double max_offdiag = 0;
  double max_diag_dev = 0;
};

GramReport orthogonality_matrix(int kmax, const KernelTable& table);

// sup of B psi_beta + |beta|/4 psi_beta on the inner fraction of the grid
double eigen_residual(const MultiIndex& beta, const KernelTable& table, double inner = 0.8, bool fd = false);

}  // namespace tfe
