#include "pswfrec/pswf_core.hpp"

#include "pswfrec/json_io.hpp"
#include "pswfrec/kernels.hpp"
#include "mp_eigen.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pswfrec {

using std::numbers::pi;

double BandlimitParams::shannon_number() const { return size() * time_bandwidth / pi; }

void BandlimitParams::validate() const {
  std::ostringstream msg;
  if (half_length < 1)
    msg << "half_length must be >= 1 (got " << half_length << ")";
  else if (!(time_bandwidth > 0.0 && time_bandwidth < pi))
    msg << "time_bandwidth must lie in (0, pi) (got " << time_bandwidth << ")";
  else if (!(omega0 > 0.0 && std::isfinite(omega0)))
    msg << "omega0 must be positive and finite (got " << omega0 << ")";
  else
    return;
  throw std::invalid_argument(msg.str());
}

BandlimitParams params_for_window(double window_length, double bandwidth, double period_factor) {
  if (!(window_length > 0.0) || !(bandwidth > 0.0) || !(period_factor > 1.0))
    throw std::invalid_argument("params_for_window: need window_length > 0, bandwidth > 0, period_factor > 1");
  BandlimitParams p;
  p.omega0 = 2.0 * pi / (period_factor * window_length);
  p.time_bandwidth = pi / period_factor;
  p.half_length = static_cast<int>(std::ceil(bandwidth / p.omega0));
  return p;
}

int default_n_terms(const BandlimitParams& params) {
  const int n = static_cast<int>(std::ceil(params.shannon_number())) + 2;
  return std::min(n, params.size());
}

Eigen::MatrixXd build_sinc_kernel(const BandlimitParams& params) {
  params.validate();
  const int n = params.size();
  const double c = params.time_bandwidth;
  Eigen::VectorXd s(n);
  s(0) = c / pi;
  for (int d = 1; d < n; ++d) s(d) = std::sin(c * d) / (pi * d);
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = s(std::abs(i - j));
  return k;
}

DiscretePswfBasis compute_basis(const BandlimitParams& params) {
  params.validate();
  auto eig = detail::solve_sinc_eigen(params.half_length, params.time_bandwidth);

  DiscretePswfBasis basis;
  basis.params = params;
  basis.eigenvalues = std::move(eig.values);
  basis.eigenvectors = std::move(eig.vectors);
  for (bool odd : eig.odd) basis.symmetry.push_back(odd ? Symmetry::Odd : Symmetry::Even);

  if (!eig.resolved) {
    std::ostringstream msg;
    msg << "smallest eigenvalues are not fully resolved at "
        << eig.precision_bits << "-bit working precision";
    basis.warnings.push_back(msg.str());
  }

  // Gaps are measured relative to the larger eigenvalue, so the tail of tiny
  // but well-ordered eigenvalues does not count as a tie.
  int ties = 0;
  Eigen::Index first = -1;
  for (Eigen::Index k = 0; k + 1 < basis.eigenvalues.size(); ++k) {
    if (basis.eigenvalues(k) - basis.eigenvalues(k + 1) < 1e-12 * basis.eigenvalues(k)) {
      if (first < 0) first = k;
      ++ties;
    }
  }
  if (ties > 0) {
    std::ostringstream msg;
    msg << ties << " adjacent eigenvalue gap(s) below 1e-12 relative, first between indices " << first
        << " and " << first + 1 << " (lambda = " << format_double(basis.eigenvalues(first)) << ")";
    basis.warnings.push_back(msg.str());
  }
  return basis;
}

Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
evaluate_basis_functions(const DiscretePswfBasis& basis, std::size_t n_terms,
                         const std::vector<double>& times, double origin) {
  if (n_terms < 1 || n_terms > basis.size())
    throw std::out_of_range("n_terms must lie in [1, " + std::to_string(basis.size()) + "], got " +
                            std::to_string(n_terms));
  const int m = basis.params.half_length;
  const std::size_t count = times.size();
  std::vector<double> theta(count);
  for (std::size_t i = 0; i < count; ++i) theta[i] = basis.params.omega0 * (times[i] - origin);

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(count, n_terms);
  std::vector<double> coef(m + 1);
  std::vector<double> column(count);
  for (std::size_t k = 0; k < n_terms; ++k) {
    const auto phi = basis.eigenvectors.col(static_cast<Eigen::Index>(k));
    if (basis.symmetry[k] == Symmetry::Even) {
      coef[0] = phi(m);
      for (int n = 1; n <= m; ++n) coef[n] = 2.0 * phi(m + n);
      kernels::cosine_series(coef.data(), m + 1, theta.data(), column.data(), count);
    } else {
      for (int n = 1; n <= m; ++n) coef[n - 1] = 2.0 * phi(m + n);
      kernels::sine_series(coef.data(), m, theta.data(), column.data(), count);
    }
    for (std::size_t i = 0; i < count; ++i) out(i, k) = column[i];
  }
  return out;
}

double evaluate_basis_function(const DiscretePswfBasis& basis, std::size_t k, double t) {
  if (k >= basis.size())
    throw std::out_of_range("basis index " + std::to_string(k) + " out of range [0, " +
                            std::to_string(basis.size() - 1) + "]");
  const std::vector<double> times{t};
  return evaluate_basis_functions(basis, k + 1, times)(0, k);
}

const char* to_string(Symmetry s) { return s == Symmetry::Even ? "even" : "odd"; }

std::string basis_to_json(const DiscretePswfBasis& basis) {
  nlohmann::json j;
  j["params"] = {{"half_length", basis.params.half_length},
                 {"time_bandwidth", basis.params.time_bandwidth},
                 {"omega0", basis.params.omega0}};
  j["eigenvalues"] = std::vector<double>(basis.eigenvalues.data(),
                                         basis.eigenvalues.data() + basis.eigenvalues.size());
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < basis.eigenvectors.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < basis.eigenvectors.cols(); ++c) row.push_back(basis.eigenvectors(r, c));
    rows.push_back(std::move(row));
  }
  j["eigenvectors"] = std::move(rows);
  nlohmann::json sym = nlohmann::json::array();
  for (auto s : basis.symmetry) sym.push_back(to_string(s));
  j["symmetry"] = std::move(sym);
  j["warnings"] = basis.warnings;
  return dump_json(j);
}

DiscretePswfBasis basis_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DiscretePswfBasis b;
  const auto& p = j.at("params");
  b.params.half_length = p.at("half_length").get<int>();
  b.params.time_bandwidth = p.at("time_bandwidth").get<double>();
  b.params.omega0 = p.at("omega0").get<double>();
  b.params.validate();
  const int n = b.params.size();

  const auto vals = j.at("eigenvalues").get<std::vector<double>>();
  const auto& rows = j.at("eigenvectors");
  const auto& sym = j.at("symmetry");
  if (static_cast<int>(vals.size()) != n || static_cast<int>(rows.size()) != n ||
      static_cast<int>(sym.size()) != n)
    throw std::invalid_argument("basis JSON: array sizes do not match half_length");
  b.eigenvalues = Eigen::Map<const Eigen::VectorXd>(vals.data(), n);
  b.eigenvectors.resize(n, n);
  for (int r = 0; r < n; ++r) {
    const auto row = rows[r].get<std::vector<double>>();
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("basis JSON: ragged eigenvector row");
    for (int c = 0; c < n; ++c) b.eigenvectors(r, c) = row[c];
  }
  for (const auto& s : sym) {
    const auto name = s.get<std::string>();
    if (name == "even")
      b.symmetry.push_back(Symmetry::Even);
    else if (name == "odd")
      b.symmetry.push_back(Symmetry::Odd);
    else
      throw std::invalid_argument("basis JSON: unknown symmetry '" + name + "'");
  }
  if (j.contains("warnings")) b.warnings = j["warnings"].get<std::vector<std::string>>();
  return b;
}

} // namespace pswfrec
