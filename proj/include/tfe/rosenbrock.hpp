#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "tfe/common.hpp"

namespace tfe {

// Rosenbrock 4(3) stepper, Shampine's coefficients, with step control.
// Sys must provide
//   void rhs(double t, const Vec& x, Vec& dxdt) const
//   void jac(double t, const Vec& x, Mat& J, Vec& dfdt) const
template <int D>
class Rosenbrock4 {
 public:
  using Vec = Eigen::Matrix<double, D, 1>;
  using Mat = Eigen::Matrix<double, D, D>;

  double rtol = 1e-10, atol = 1e-14, h_min = 1e-12, h_max = 0.1;
  long steps = 0, rejects = 0;

  template <class Sys>
  void step(const Sys& sys, const Vec& x, double t, double dt, Vec& xout, Vec& xerr) const {
    constexpr double gamma = 0.25, d1 = 0.25, d2 = -0.1043, d3 = 0.1035, d4 = -0.3620000000000023e-01;
    constexpr double c2 = 0.386, c3 = 0.21, c4 = 0.63;
    constexpr double c21 = -0.5668800000000000e+01, a21 = 0.1544000000000000e+01;
    constexpr double c31 = -0.2430093356833875e+01, c32 = -0.2063599157091915e+00;
    constexpr double a31 = 0.9466785280815826e+00, a32 = 0.2557011698983284e+00;
    constexpr double c41 = -0.1073529058151375e+00, c42 = -0.9594562251023355e+01, c43 = -0.2047028614809616e+02;
    constexpr double a41 = 0.3314825187068521e+01, a42 = 0.2896124015972201e+01, a43 = 0.9986419139977817e+00;
    constexpr double c51 = 0.7496443313967647e+01, c52 = -0.1024680431464352e+02, c53 = -0.3399990352819905e+02,
                     c54 = 0.1170890893206160e+02;
    constexpr double a51 = 0.1221224509226641e+01, a52 = 0.6019134481288629e+01, a53 = 0.1253708332932087e+02,
                     a54 = -0.6878860361058950e+00;
    constexpr double c61 = 0.8083246795921522e+01, c62 = -0.7981132988064893e+01, c63 = -0.3152159432874371e+02,
                     c64 = 0.1631930543123136e+02, c65 = -0.6058818238834054e+01;
    Vec f, dfdt, fn, xt;
    Mat J;
    sys.rhs(t, x, f);
    sys.jac(t, x, J, dfdt);
    Mat A = Mat::Identity() / (gamma * dt) - J;
    Eigen::PartialPivLU<Mat> lu(A);
    Vec g1 = lu.solve(f + dt * d1 * dfdt);
    xt = x + a21 * g1;
    sys.rhs(t + c2 * dt, xt, fn);
    Vec g2 = lu.solve(fn + dt * d2 * dfdt + c21 * g1 / dt);
    xt = x + a31 * g1 + a32 * g2;
    sys.rhs(t + c3 * dt, xt, fn);
    Vec g3 = lu.solve(fn + dt * d3 * dfdt + (c31 * g1 + c32 * g2) / dt);
    xt = x + a41 * g1 + a42 * g2 + a43 * g3;
    sys.rhs(t + c4 * dt, xt, fn);
    Vec g4 = lu.solve(fn + dt * d4 * dfdt + (c41 * g1 + c42 * g2 + c43 * g3) / dt);
    xt = x + a51 * g1 + a52 * g2 + a53 * g3 + a54 * g4;
    sys.rhs(t + dt, xt, fn);
    Vec g5 = lu.solve(fn + (c51 * g1 + c52 * g2 + c53 * g3 + c54 * g4) / dt);
    xt += g5;
    sys.rhs(t + dt, xt, fn);
    xerr = lu.solve(fn + (c61 * g1 + c62 * g2 + c63 * g3 + c64 * g4 + c65 * g5) / dt);
    xout = xt + xerr;
  }

  // advance x from t to t_end; dt carries the step size between calls.
  // Throws StiffnessFailure when the step collapses below h_min.
  template <class Sys>
  void advance(const Sys& sys, Vec& x, double& t, double t_end, double& dt) {
    Vec xo, xe;
    while (t < t_end) {
      double h = std::min({dt, h_max, t_end - t});
      bool last = h >= t_end - t;
      step(sys, x, t, h, xo, xe);
      double err = 0;
      bool finite = true;
      for (int i = 0; i < D; ++i) {
        if (!std::isfinite(xo[i])) finite = false;
        double sc = atol + rtol * std::max(std::abs(x[i]), std::abs(xo[i]));
        err = std::max(err, std::abs(xe[i]) / sc);
      }
      if (!finite) err = 1e10;
      if (err <= 1.0) {
        x = xo;
        t = last ? t_end : t + h;
        ++steps;
        double fac = err > 0 ? 0.9 * std::pow(err, -0.25) : 5.0;
        if (!last || fac < 1) dt = h * std::clamp(fac, 0.2, 5.0);
      } else {
        ++rejects;
        dt = h * std::clamp(0.9 * std::pow(err, -1.0 / 3.0), 0.1, 0.5);
        if (dt < h_min)
          throw Error(ErrorKind::StiffnessFailure, "step size below h_min at t = " + std::to_string(t));
      }
    }
  }
};

}  // namespace tfe
