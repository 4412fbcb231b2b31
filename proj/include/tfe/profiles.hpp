#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tfe/branching.hpp"

namespace tfe {

struct ProfileConfig {
  double h_out = 0.01;      // spacing of the output grid
  double y_max = 40.0;      // global shooting range
  double rtol = 1e-11, atol = 1e-12;  // atol is scaled by the local amplitude
  double h_min = 1e-13;
  double tail_tol = 1e-10;  // interface: |f| below this ...
  int tail_nodes = 50;      // ... for this many consecutive nodes
  int max_iter = 200;
  int max_segments = 80;
  double blowup_L = 12.0;   // matching point for the growth condition
  double growth_margin = 0.5;
  double alpha_tol = 1e-8;
  int secant_max = 60;
};

struct SimilarityProfile {
  double n = 0, alpha = 0, beta_exp = 0;
  Kind kind = Kind::Global;
  int N = 1, k = 0;
  int parity = 0;  // 0 even, 1 odd
  Grid grid;       // radial
  std::vector<double> f;
  std::optional<double> interface_radius;
  int zero_count = 0;
  int tail_zero_count = 0;  // sign changes in the last 10% of the support
  std::optional<double> growth_exponent;
  double mass = 0;          // from the integrated mass equation
  double mass_trapezoid = 0;
  int segments = 0, iterations = 0;
  double shoot_parameter = 0;
  bool last_good_only = false;  // stiffness stopped the shot; data up to the last good interface estimate
};

// wraps given samples; beta_exp = (1 - alpha n)/4
SimilarityProfile make_profile(Kind kind, double n, double alpha, const Grid& radial_grid, std::vector<double> f,
                               int parity = 0, int k = 0);

// pointwise residual of the NEP, 4th-order differences, NaN where the stencil leaves the grid
std::vector<double> residual_nep(const SimilarityProfile& p);
double residual_sup(const SimilarityProfile& p, double radius = -1);

SimilarityProfile shoot_global_profile(double n, int k = 0, int N = 1, const ProfileConfig& cfg = {});
SimilarityProfile shoot_blowup_profile(double n, int k, int N, double alpha_guess, const ProfileConfig& cfg = {});

struct MassCheck {
  double mass_error = 0;         // |int f - 1| from the mass equation
  double trapezoid_error = 0;    // same from the samples
  double exponent_identity = 0;  // -alpha + beta N, exact arithmetic
};
MassCheck mass_conservation_check(const SimilarityProfile& p);

struct ExpansionRow {
  double n = 0;
  double l1_error = 0;         // over |f| > exp(-1/n)
  double l1_error_common = 0;  // over the set of the largest n
  double second_order = 0;     // (n/2) || ln^2 |f| || on the same set
  double ratio = 0;            // l1_error / second_order
  double excluded_measure = 0; // bad set inside the bulk window
  double l8_bound = 0;         // (1/n) exp(-1/(n k))
};
std::vector<ExpansionRow> expansion_diagnostic(const Grid& g, const std::vector<double>& f,
                                               const std::vector<double>& n_list, int k = 1);

// max |f(y) - ref(y)| for |y| <= radius
double sup_distance(const SimilarityProfile& p, const std::function<double(double)>& ref, double radius);
// cubic interpolation of the profile (parity-extended)
double profile_value(const SimilarityProfile& p, double y);
// invariance scaling with factor lambda applied to u = t^-alpha f(x t^-beta), compared at time t
double scaling_check(const SimilarityProfile& p, double lambda, double t = 2.0);

}  // namespace tfe
