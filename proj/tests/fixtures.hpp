#pragma once

#include "tfe/kernel.hpp"

namespace fixture {

// tables shared by the test cases of one process
inline const tfe::KernelTable& table1d() {
  static const tfe::KernelTable t = tfe::eval_kernel(1, tfe::default_grid(1), 12);
  return t;
}

inline tfe::QuadConfig quad2d() {
  tfe::QuadConfig q;
  q.quad_tol = 1e-3;
  q.tail_tol = 1e-4;
  return q;
}

inline const tfe::KernelTable& table2d() {
  static const tfe::KernelTable t = tfe::eval_kernel(2, tfe::default_grid(2), 7, quad2d());
  return t;
}

}  // namespace fixture
