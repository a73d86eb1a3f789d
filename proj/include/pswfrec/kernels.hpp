#pragma once

#include <cstddef>

// Inner loops shared by basis evaluation and the solvers. Each routine has a
// scalar reference implementation and, on x86-64, an AVX2/FMA variant picked
// at runtime. The variants agree to within a few ulps (FMA contraction and
// summation order differ).
namespace pswfrec::kernels {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa);
bool isa_supported(Isa isa);
Isa best_isa();
Isa active_isa();
// Throws std::invalid_argument when the CPU lacks the requested ISA.
void set_active_isa(Isa isa);

// out[i] = sum_{n=0}^{terms-1} a[n] cos(n theta[i])
void cosine_series(const double* a, std::size_t terms, const double* theta, double* out,
                   std::size_t count);
// out[i] = sum_{n=1}^{terms} a[n-1] sin(n theta[i])
void sine_series(const double* a, std::size_t terms, const double* theta, double* out,
                 std::size_t count);

double dot(const double* x, const double* y, std::size_t n);

// rows: m x n row-major. gram: n x n row-major, overwritten with sum_i w_i d_i d_i^T.
void weighted_gram(const double* rows, std::size_t m, std::size_t n, const double* w,
                   double* gram);
// out[j] = sum_i w_i y_i rows(i, j)
void weighted_moment(const double* rows, std::size_t m, std::size_t n, const double* w,
                     const double* y, double* out);
// out[i] = y[i] - rows(i, :) . c
void residual(const double* rows, std::size_t m, std::size_t n, const double* c,
              const double* y, double* out);

#define PSWFREC_KERNEL_DECLS                                                                  \
  void cosine_series(const double*, std::size_t, const double*, double*, std::size_t);      \
  void sine_series(const double*, std::size_t, const double*, double*, std::size_t);        \
  double dot(const double*, const double*, std::size_t);                                    \
  void weighted_gram(const double*, std::size_t, std::size_t, const double*, double*);      \
  void weighted_moment(const double*, std::size_t, std::size_t, const double*,              \
                       const double*, double*);                                             \
  void residual(const double*, std::size_t, std::size_t, const double*, const double*,      \
                double*);

namespace scalar {
PSWFREC_KERNEL_DECLS
}
namespace avx2 {
PSWFREC_KERNEL_DECLS
}

#undef PSWFREC_KERNEL_DECLS

} // namespace pswfrec::kernels
