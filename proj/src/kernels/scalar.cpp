#include "pswfrec/kernels.hpp"

#include <cmath>

namespace pswfrec::kernels::scalar {

void cosine_series(const double* a, std::size_t terms, const double* theta, double* out,
                   std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    const double x = std::cos(theta[i]);
    const double x2 = 2.0 * x;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = terms; k-- > 1;) {
      const double b0 = a[k] + x2 * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    out[i] = terms == 0 ? 0.0 : a[0] + x * b1 - b2;
  }
}

void sine_series(const double* a, std::size_t terms, const double* theta, double* out,
                 std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    const double x2 = 2.0 * std::cos(theta[i]);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = terms; k-- > 0;) {
      const double b0 = a[k] + x2 * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    out[i] = b1 * std::sin(theta[i]);
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void weighted_gram(const double* rows, std::size_t m, std::size_t n, const double* w,
                   double* gram) {
  for (std::size_t j = 0; j < n * n; ++j) gram[j] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* d = rows + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = w[i] * d[j];
      double* g = gram + j * n;
      for (std::size_t k = j; k < n; ++k) g[k] += a * d[k];
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) gram[k * n + j] = gram[j * n + k];
}

void weighted_moment(const double* rows, std::size_t m, std::size_t n, const double* w,
                     const double* y, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = w[i] * y[i];
    const double* d = rows + i * n;
    for (std::size_t j = 0; j < n; ++j) out[j] += a * d[j];
  }
}

void residual(const double* rows, std::size_t m, std::size_t n, const double* c,
              const double* y, double* out) {
  for (std::size_t i = 0; i < m; ++i) out[i] = y[i] - dot(rows + i * n, c, n);
}

} // namespace pswfrec::kernels::scalar
