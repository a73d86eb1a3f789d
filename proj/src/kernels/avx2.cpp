#include "pswfrec/kernels.hpp"

#include <immintrin.h>

#include <cmath>

#define PSWFREC_AVX2 __attribute__((target("avx2,fma")))

namespace pswfrec::kernels::avx2 {

namespace {

PSWFREC_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Clenshaw recurrence on four angles at once; returns b1 and b2.
PSWFREC_AVX2 inline void clenshaw4(const double* a, std::size_t first, std::size_t terms,
                                   __m256d x2, __m256d& b1, __m256d& b2) {
  b1 = _mm256_setzero_pd();
  b2 = _mm256_setzero_pd();
  for (std::size_t k = terms; k-- > first;) {
    const __m256d b0 = _mm256_fmadd_pd(x2, b1, _mm256_sub_pd(_mm256_set1_pd(a[k]), b2));
    b2 = b1;
    b1 = b0;
  }
}

} // namespace

PSWFREC_AVX2 void cosine_series(const double* a, std::size_t terms, const double* theta,
                                double* out, std::size_t count) {
  if (terms == 0) {
    for (std::size_t i = 0; i < count; ++i) out[i] = 0.0;
    return;
  }
  std::size_t i = 0;
  alignas(32) double x[4];
  for (; i + 4 <= count; i += 4) {
    for (int l = 0; l < 4; ++l) x[l] = std::cos(theta[i + l]);
    const __m256d xv = _mm256_load_pd(x);
    __m256d b1, b2;
    clenshaw4(a, 1, terms, _mm256_add_pd(xv, xv), b1, b2);
    const __m256d r = _mm256_fmadd_pd(xv, b1, _mm256_sub_pd(_mm256_set1_pd(a[0]), b2));
    _mm256_storeu_pd(out + i, r);
  }
  if (i < count) scalar::cosine_series(a, terms, theta + i, out + i, count - i);
}

PSWFREC_AVX2 void sine_series(const double* a, std::size_t terms, const double* theta,
                              double* out, std::size_t count) {
  std::size_t i = 0;
  alignas(32) double x[4];
  alignas(32) double s[4];
  for (; i + 4 <= count; i += 4) {
    for (int l = 0; l < 4; ++l) {
      x[l] = std::cos(theta[i + l]);
      s[l] = std::sin(theta[i + l]);
    }
    const __m256d xv = _mm256_load_pd(x);
    __m256d b1, b2;
    clenshaw4(a, 0, terms, _mm256_add_pd(xv, xv), b1, b2);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(b1, _mm256_load_pd(s)));
  }
  if (i < count) scalar::sine_series(a, terms, theta + i, out + i, count - i);
}

PSWFREC_AVX2 double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

PSWFREC_AVX2 void weighted_gram(const double* rows, std::size_t m, std::size_t n,
                                const double* w, double* gram) {
  for (std::size_t j = 0; j < n * n; ++j) gram[j] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* d = rows + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = w[i] * d[j];
      const __m256d av = _mm256_set1_pd(a);
      double* g = gram + j * n;
      std::size_t k = j;
      for (; k + 4 <= n; k += 4)
        _mm256_storeu_pd(g + k, _mm256_fmadd_pd(av, _mm256_loadu_pd(d + k), _mm256_loadu_pd(g + k)));
      for (; k < n; ++k) g[k] += a * d[k];
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) gram[k * n + j] = gram[j * n + k];
}

PSWFREC_AVX2 void weighted_moment(const double* rows, std::size_t m, std::size_t n,
                                  const double* w, const double* y, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = w[i] * y[i];
    const __m256d av = _mm256_set1_pd(a);
    const double* d = rows + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4)
      _mm256_storeu_pd(out + j, _mm256_fmadd_pd(av, _mm256_loadu_pd(d + j), _mm256_loadu_pd(out + j)));
    for (; j < n; ++j) out[j] += a * d[j];
  }
}

PSWFREC_AVX2 void residual(const double* rows, std::size_t m, std::size_t n, const double* c,
                           const double* y, double* out) {
  for (std::size_t i = 0; i < m; ++i) out[i] = y[i] - dot(rows + i * n, c, n);
}

} // namespace pswfrec::kernels::avx2
