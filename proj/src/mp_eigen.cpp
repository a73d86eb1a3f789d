#include "mp_eigen.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

using Real = boost::multiprecision::mpfr_float;

// Boost's own Eigen adapter predates Eigen 3.4's NumTraits requirements.
namespace Eigen {
template <>
struct NumTraits<Real> : GenericNumTraits<Real> {
  using Nested = Real;
  using NonInteger = Real;
  using Literal = Real;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8
  };
  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static Real dummy_precision() { return epsilon() * 1024; }
  static Real highest() { return (std::numeric_limits<Real>::max)(); }
  static Real lowest() { return std::numeric_limits<Real>::lowest(); }
  static Real infinity() { return std::numeric_limits<Real>::infinity(); }
  static Real quiet_NaN() { return std::numeric_limits<Real>::quiet_NaN(); }
  static int digits10() { return static_cast<int>(Real::default_precision()); }
  static int digits() { return static_cast<int>(std::ceil(Real::default_precision() * 3.3219280948873623)); }
};
} // namespace Eigen

namespace pswfrec::detail {

namespace {

using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

constexpr int kStartBits = 128;
// 64 bits above the binary64 underflow threshold; anything smaller rounds to 0.
constexpr int kMaxBits = 1140;

// MPFR's default precision is process-wide.
std::mutex& precision_mutex() {
  static std::mutex m;
  return m;
}

// Symmetric tridiagonal matrix: diagonal d, off-diagonal e.
struct Tridiagonal {
  std::vector<double> d, e;
  int size() const { return static_cast<int>(d.size()); }
};

// The sinc kernel commutes with the tridiagonal matrix
//   T(j, j) = j^2 cos c,  T(j, j+1) = (j + M + 1)(M - j) / 2,  j = -M..M,
// whose eigenvalues are simple and well separated. Its eigenvectors are the
// kernel's eigenvectors, in the same order, so they can be computed to any
// precision even where the kernel's own eigenvalues cluster at 0 or 1.
// Both blocks are exact in binary64 apart from cos c and sqrt 2.
struct Blocks {
  Tridiagonal even, odd;
};

Blocks commuting_blocks(int m, double c) {
  auto t = [&](int j) { return 0.5 * (j + m + 1) * (m - j); };
  Blocks b;
  for (int j = 0; j <= m; ++j) b.even.d.push_back(double(j) * j * std::cos(c));
  for (int j = 0; j < m; ++j) b.even.e.push_back(j == 0 ? std::sqrt(2.0) * t(0) : t(j));
  for (int j = 1; j <= m; ++j) b.odd.d.push_back(double(j) * j * std::cos(c));
  for (int j = 1; j < m; ++j) b.odd.e.push_back(t(j));
  return b;
}

// Entries in MPFR; cos c and sqrt 2 are recomputed at working precision.
struct MpTridiagonal {
  Vector d, e;
};

MpTridiagonal to_mp(int m, double c, bool odd) {
  const Real cosc = cos(Real(c));
  auto t = [&](int j) { return Real(j + m + 1) * Real(m - j) / 2; };
  MpTridiagonal r;
  const int first = odd ? 1 : 0;
  const int n = m + 1 - first;
  r.d.resize(n);
  r.e.resize(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) r.d(i) = Real(i + first) * (i + first) * cosc;
  for (int i = 0; i + 1 < n; ++i) r.e(i) = (!odd && i == 0) ? sqrt(Real(2)) * t(0) : t(i + first);
  return r;
}

Real rayleigh(const MpTridiagonal& t, const Vector& x) {
  const Eigen::Index n = x.size();
  Real r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    r += t.d(i) * x(i) * x(i);
    if (i + 1 < n) r += 2 * t.e(i) * x(i) * x(i + 1);
  }
  return r;
}

// Solves (T - shift I) x = b in place by Gaussian elimination with partial
// pivoting. Exactly zero pivots are nudged, which is harmless for inverse
// iteration.
void shifted_solve(const MpTridiagonal& t, const Real& shift, Vector& b) {
  const int n = static_cast<int>(b.size());
  Vector d = t.d.array() - shift;
  Vector dl = t.e, du = t.e, du2 = Vector::Zero(std::max(n - 2, 0));
  std::vector<bool> swapped(std::max(n - 1, 0), false);
  const Real tiny = ldexp(Real(1), -static_cast<int>(Real::default_precision() * 3.3219280948873623));
  for (int i = 0; i + 1 < n; ++i) {
    if (abs(d(i)) >= abs(dl(i))) {
      if (d(i) == 0) d(i) = tiny;
      const Real f = dl(i) / d(i);
      dl(i) = f;
      d(i + 1) -= f * du(i);
    } else {
      const Real f = d(i) / dl(i);
      d(i) = dl(i);
      dl(i) = f;
      const Real u = du(i);
      du(i) = d(i + 1);
      d(i + 1) = u - f * d(i + 1);
      if (i + 2 < n) {
        du2(i) = du(i + 1);
        du(i + 1) = -f * du(i + 1);
      }
      swapped[i] = true;
    }
  }
  if (n > 0 && d(n - 1) == 0) d(n - 1) = tiny;
  for (int i = 0; i + 1 < n; ++i) {
    if (swapped[i]) {
      const Real u = b(i);
      b(i) = b(i + 1);
      b(i + 1) = u - dl(i) * b(i);
    } else {
      b(i + 1) -= dl(i) * b(i);
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    Real v = b(i);
    if (i + 1 < n) v -= du(i) * b(i + 1);
    if (i + 2 < n) v -= du2(i) * b(i + 2);
    b(i) = v / d(i);
  }
}

// Rayleigh quotient iteration from a binary64 eigenpair.
Vector refine_vector(const MpTridiagonal& t, const Eigen::VectorXd& start, double theta0, int bits) {
  Vector x = start.cast<Real>();
  x /= sqrt(x.squaredNorm());
  if (x.size() == 1) return x;
  const Real tol = ldexp(Real(1), -(bits - 8));
  const double scale = 1.0 + std::abs(t.d(t.d.size() - 1).convert_to<double>()) +
                       t.e.cwiseAbs().maxCoeff().convert_to<double>();
  for (int it = 0; it < 12; ++it) {
    Vector y = x;
    shifted_solve(t, rayleigh(t, x), y);
    y /= sqrt(y.squaredNorm());
    if (y.dot(x) < 0) y = -y;
    const Real change = sqrt((y - x).squaredNorm());
    x = std::move(y);
    if (change < tol) {
      if (std::abs(rayleigh(t, x).convert_to<double>() - theta0) > 1e-6 * scale)
        throw std::runtime_error("eigenvector refinement drifted to a different eigenpair");
      return x;
    }
  }
  throw std::runtime_error("eigenvector refinement did not converge");
}

struct Pair {
  double order; // eigenvalue of the commuting tridiagonal matrix
  bool odd;
  int column;
  Vector vector; // block coordinates
  Real value;    // concentration
  bool resolved = false;
};

} // namespace

SincEigen solve_sinc_eigen(int half_length, double c) {
  const int m = half_length;
  const int n = 2 * m + 1;

  const Blocks blocks = commuting_blocks(m, c);
  std::vector<Pair> pairs;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri[2];
  for (int odd = 0; odd < 2; ++odd) {
    const Tridiagonal& t = odd ? blocks.odd : blocks.even;
    if (t.size() == 0) continue;
    tri[odd].computeFromTridiagonal(Eigen::Map<const Eigen::VectorXd>(t.d.data(), t.size()),
                                    Eigen::Map<const Eigen::VectorXd>(t.e.data(), t.size() - 1),
                                    Eigen::ComputeEigenvectors);
    if (tri[odd].info() != Eigen::Success)
      throw std::runtime_error("tridiagonal eigensolver did not converge");
    for (int k = 0; k < t.size(); ++k) pairs.push_back({tri[odd].eigenvalues()(k), odd == 1, k, {}, 0, false});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.order > y.order; });

  std::lock_guard<std::mutex> lock(precision_mutex());
  const auto saved = Real::default_precision();
  SincEigen out;
  int bits = kStartBits;
  try {
    for (;; bits = std::min(2 * bits, kMaxBits)) {
      Real::default_precision(static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1);
      const MpTridiagonal t[2] = {to_mp(m, c, false), to_mp(m, c, true)};

      // Kernel blocks in the same coordinates, for the Rayleigh quotients.
      // s(d) = sin(c d) / (pi d), s(0) = c / pi
      const Real pi = boost::multiprecision::acos(Real(-1));
      const Real cr(c);
      const Real root2 = sqrt(Real(2));
      std::vector<Real> s(2 * m + 1);
      s[0] = cr / pi;
      for (int d = 1; d <= 2 * m; ++d) s[d] = sin(cr * d) / (pi * d);
      Matrix kernel[2] = {Matrix(m + 1, m + 1), Matrix(m, m)};
      kernel[0](0, 0) = s[0];
      for (int j = 1; j <= m; ++j) {
        kernel[0](0, j) = kernel[0](j, 0) = root2 * s[j];
        for (int l = 1; l <= m; ++l) {
          kernel[0](j, l) = s[std::abs(j - l)] + s[j + l];
          kernel[1](j - 1, l - 1) = s[std::abs(j - l)] - s[j + l];
        }
      }

      // Each concentration must carry at least ~64 significant bits.
      const Real delta = ldexp(Real(1), -(bits - 64));
      bool all = true;
      for (auto& p : pairs) {
        if (p.resolved) continue;
        const int b = p.odd ? 1 : 0;
        p.vector = refine_vector(t[b], tri[b].eigenvectors().col(p.column), p.order, bits);
        p.value = p.vector.dot(kernel[b] * p.vector);
        p.resolved = p.value > delta || bits >= kMaxBits;
        all = all && p.resolved;
      }
      if (all) break;
    }
  } catch (...) {
    Real::default_precision(saved);
    throw;
  }
  out.precision_bits = bits;
  out.resolved = true;

  out.values.resize(n);
  out.vectors.resize(n, n);
  out.odd.resize(n);
  const Real root2 = sqrt(Real(2));
  const Real floor = ldexp(Real(1), -(kMaxBits - 64));
  std::vector<Real> full(n);
  for (int k = 0; k < n; ++k) {
    const Pair& p = pairs[k];
    const Vector& v = p.vector;
    // full[n + m] = phi_n
    if (!p.odd) {
      full[m] = v(0);
      for (int j = 1; j <= m; ++j) full[m + j] = full[m - j] = v(j) / root2;
    } else {
      full[m] = 0;
      for (int j = 1; j <= m; ++j) {
        full[m + j] = v(j - 1) / root2;
        full[m - j] = -full[m + j];
      }
    }
    int pivot = m;
    for (int j = m; j < n; ++j)
      if (abs(full[j]) > abs(full[pivot])) pivot = j;
    const bool flip = full[pivot] < 0;
    for (int j = 0; j < n; ++j) {
      const double x = full[j].convert_to<double>();
      out.vectors(j, k) = flip ? -x : x;
    }
    // Below the floor the value is round-off and underflows binary64 anyway.
    out.values(k) = p.value < floor ? 0.0 : p.value.convert_to<double>();
    out.odd[k] = p.odd;
  }
  Real::default_precision(saved);
  return out;
}

} // namespace pswfrec::detail
