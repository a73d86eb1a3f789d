#pragma once

#include <Eigen/Dense>

#include <vector>

namespace pswfrec::detail {

// Eigenpairs of the (2M+1)x(2M+1) sinc kernel, ordered by descending
// eigenvalue. The kernel commutes with index reversal, so the problem is
// split into even and odd blocks. Both are solved in MPFR arithmetic whose
// precision is doubled until the smallest eigenvalue is resolved, then
// rounded to binary64. Each vector has its largest entry on the n >= 0 half
// made positive.
struct SincEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<bool> odd;
  int precision_bits = 0;
  bool resolved = true; // false when the precision cap was reached
};

SincEigen solve_sinc_eigen(int half_length, double c);

} // namespace pswfrec::detail
