#include "pswfrec/kernels.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace pswfrec::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(PSWFREC_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{best_isa()};
  return isa;
}

bool use_avx2() {
#if defined(PSWFREC_HAVE_AVX2)
  return active().load(std::memory_order_relaxed) == Isa::Avx2;
#else
  return false;
#endif
}

} // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "?";
}

bool isa_supported(Isa isa) {
  if (isa == Isa::Scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

Isa best_isa() { return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return active().load(); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument(std::string("instruction set not available: ") + to_string(isa));
  active().store(isa);
}

#if defined(PSWFREC_HAVE_AVX2)
#define PSWFREC_DISPATCH(fn, ...) return use_avx2() ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define PSWFREC_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void cosine_series(const double* a, std::size_t terms, const double* theta, double* out,
                   std::size_t count) {
  PSWFREC_DISPATCH(cosine_series, a, terms, theta, out, count);
}

void sine_series(const double* a, std::size_t terms, const double* theta, double* out,
                 std::size_t count) {
  PSWFREC_DISPATCH(sine_series, a, terms, theta, out, count);
}

double dot(const double* x, const double* y, std::size_t n) { PSWFREC_DISPATCH(dot, x, y, n); }

void weighted_gram(const double* rows, std::size_t m, std::size_t n, const double* w,
                   double* gram) {
  PSWFREC_DISPATCH(weighted_gram, rows, m, n, w, gram);
}

void weighted_moment(const double* rows, std::size_t m, std::size_t n, const double* w,
                     const double* y, double* out) {
  PSWFREC_DISPATCH(weighted_moment, rows, m, n, w, y, out);
}

void residual(const double* rows, std::size_t m, std::size_t n, const double* c,
              const double* y, double* out) {
  PSWFREC_DISPATCH(residual, rows, m, n, c, y, out);
}

} // namespace pswfrec::kernels
