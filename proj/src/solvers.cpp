#include "pswfrec/solvers.hpp"

#include "pswfrec/json_io.hpp"
#include "pswfrec/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pswfrec {

namespace {

constexpr double kInvSqrt2Pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;

void check_rows(const RowMatrix& d, const VectorXd& v, const char* what) {
  if (d.rows() != v.size()) {
    std::ostringstream msg;
    msg << what << ": dictionary has " << d.rows() << " rows but the vector has " << v.size()
        << " entries";
    throw std::invalid_argument(msg.str());
  }
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be finite and >= 0");
}

// Gram matrix D^T diag(w) D plus lambda on the diagonal, and D^T diag(w) y.
void normal_system(const RowMatrix& d, const VectorXd& y, const VectorXd& w, double lambda,
                   Eigen::MatrixXd& g, VectorXd& b) {
  const std::size_t m = d.rows(), n = d.cols();
  RowMatrix gram(n, n);
  kernels::weighted_gram(d.data(), m, n, w.data(), gram.data());
  g = gram;
  g.diagonal().array() += lambda;
  b.resize(n);
  kernels::weighted_moment(d.data(), m, n, w.data(), y.data(), b.data());
}

// Cholesky solve with one step of iterative refinement. Returns false when the
// factorization fails or the system is numerically singular.
bool cholesky_solve(const Eigen::MatrixXd& g, const VectorXd& b, VectorXd& x, double& rcond) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) {
    rcond = 0.0;
    return false;
  }
  rcond = llt.rcond();
  if (!(rcond > 1e-14)) return false;
  x = llt.solve(b);
  x += llt.solve(b - g * x);
  return x.allFinite();
}

// Minimizes sum w_i (y_i - d_i c)^2 + lambda |c|^2 as the stacked least-squares
// problem [sqrt(W) D; sqrt(lambda) I] c = [sqrt(W) y; 0], which avoids squaring
// the condition number. Needs lambda > 0.
VectorXd stacked_solve(const RowMatrix& d, const VectorXd& y, const VectorXd& w, double lambda) {
  const Eigen::Index m = d.rows(), n = d.cols();
  Eigen::MatrixXd a(m + n, n);
  const VectorXd sw = w.cwiseSqrt();
  a.topRows(m) = sw.asDiagonal() * d;
  a.bottomRows(n) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(n, n);
  VectorXd b = VectorXd::Zero(m + n);
  b.head(m) = sw.cwiseProduct(y);
  VectorXd c = a.colPivHouseholderQr().solve(b);
  if (!c.allFinite()) throw std::runtime_error("regularized least-squares system could not be solved");
  return c;
}

} // namespace

void RidgeConfig::validate() const { check_lambda(lambda); }

void MccConfig::validate() const {
  check_lambda(lambda);
  if (const auto* f = std::get_if<FixedSigma>(&kernel_policy)) {
    if (!(f->sigma > 0.0) || !std::isfinite(f->sigma))
      throw std::invalid_argument("fixed kernel sigma must be positive and finite");
  } else {
    const double s = std::get<AdaptiveSigma>(kernel_policy).sigma_min;
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("sigma_min must be positive and finite");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
}

const char* to_string(Termination t) {
  return t == Termination::Converged ? "converged" : "max_iterations";
}

nlohmann::json MccSolveReport::to_json() const {
  nlohmann::json j;
  j["coefficients"] = std::vector<double>(coefficients.data(), coefficients.data() + coefficients.size());
  j["objective_trace"] = objective_trace;
  j["loss_trace"] = loss_trace;
  j["weights"] = std::vector<double>(weights.data(), weights.data() + weights.size());
  j["sigma_trace"] = sigma_trace;
  j["iterations"] = iterations;
  j["termination"] = to_string(termination);
  j["warnings"] = warnings;
  return j;
}

double gaussian_kernel(double u, double kernel_sigma) {
  if (!(kernel_sigma > 0.0)) throw std::invalid_argument("kernel sigma must be positive");
  const double z = u / kernel_sigma;
  return kInvSqrt2Pi / kernel_sigma * std::exp(-0.5 * z * z);
}

double correntropy_estimate(const VectorXd& x, const VectorXd& y, double kernel_sigma) {
  if (x.size() != y.size() || x.size() == 0)
    throw std::invalid_argument("correntropy: vectors must have equal, non-zero length");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += gaussian_kernel(x(i) - y(i), kernel_sigma);
  return s / static_cast<double>(x.size());
}

double cim(const VectorXd& x, const VectorXd& y, double kernel_sigma) {
  if (x.size() != y.size() || x.size() == 0)
    throw std::invalid_argument("cim: vectors must have equal, non-zero length");
  const double k0 = gaussian_kernel(0.0, kernel_sigma);
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += k0 - gaussian_kernel(x(i) - y(i), kernel_sigma);
  return std::sqrt(std::max(0.0, s / static_cast<double>(x.size())));
}

VectorXd residuals(const RowMatrix& d, const VectorXd& c, const VectorXd& y) {
  check_rows(d, y, "residuals");
  if (d.cols() != c.size()) throw std::invalid_argument("residuals: coefficient length mismatch");
  VectorXd r(d.rows());
  kernels::residual(d.data(), d.rows(), d.cols(), c.data(), y.data(), r.data());
  return r;
}

LinearSolution solve_least_squares(const RowMatrix& d, const VectorXd& y) {
  check_rows(d, y, "least squares");
  const Eigen::MatrixXd a = d;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& s = svd.singularValues();
  LinearSolution out;
  const double s_max = s.size() ? s(0) : 0.0;
  const double s_min = s.size() ? s(s.size() - 1) : 0.0;
  out.condition_number = s_min > 0.0 ? s_max / s_min : std::numeric_limits<double>::infinity();
  const double cutoff = 1e-12 * s_max;
  VectorXd uty = svd.matrixU().transpose() * y;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff) {
      uty(k) /= s(k);
      ++rank;
    } else {
      uty(k) = 0.0;
    }
  }
  out.coefficients = svd.matrixV() * uty;
  if (out.condition_number > 1e12) {
    std::ostringstream msg;
    msg << "design matrix condition number " << format_double(out.condition_number)
        << " exceeds 1e12; numerical rank " << rank << " of " << s.size();
    out.warnings.push_back(msg.str());
  }
  return out;
}

LinearSolution solve_ridge(const RowMatrix& d, const VectorXd& y, const RidgeConfig& config) {
  config.validate();
  check_rows(d, y, "ridge");
  Eigen::MatrixXd g;
  VectorXd b;
  normal_system(d, y, VectorXd::Ones(d.rows()), config.lambda, g, b);
  LinearSolution out;
  double rcond = 0.0;
  if (cholesky_solve(g, b, out.coefficients, rcond)) {
    out.condition_number = 1.0 / rcond;
    return out;
  }
  if (config.lambda == 0.0) {
    out = solve_least_squares(d, y);
    out.warnings.insert(out.warnings.begin(),
                        "Gram matrix is singular with lambda = 0; used the minimum-norm least-squares solution");
    return out;
  }
  out.coefficients = stacked_solve(d, y, VectorXd::Ones(d.rows()), config.lambda);
  out.condition_number = 1.0 / rcond;
  out.warnings.push_back("regularized Gram matrix is poorly conditioned; solved the stacked least-squares form");
  return out;
}

VectorXd update_weights(const VectorXd& r, double kernel_sigma) {
  // The floor keeps weights positive where the Gaussian underflows.
  const double inv_s2 = 1.0 / (kernel_sigma * kernel_sigma);
  VectorXd w(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i)
    w(i) = std::max(gaussian_kernel(r(i), kernel_sigma) * inv_s2, std::numeric_limits<double>::min());
  return w;
}

VectorXd weighted_ridge_step(const RowMatrix& d, const VectorXd& y, const VectorXd& w,
                             double lambda) {
  check_lambda(lambda);
  check_rows(d, y, "weighted ridge");
  check_rows(d, w, "weighted ridge");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(w(i) > 0.0) || !std::isfinite(w(i)))
      throw std::invalid_argument("weights must be positive and finite");
  Eigen::MatrixXd g;
  VectorXd b;
  normal_system(d, y, w, lambda, g, b);
  VectorXd c;
  double rcond = 0.0;
  if (cholesky_solve(g, b, c, rcond)) return c;
  if (lambda == 0.0)
    throw std::runtime_error("weighted normal equations are singular with lambda = 0; use a positive lambda");
  return stacked_solve(d, y, w, lambda);
}

double adaptive_sigma(const VectorXd& r, double sigma_min) {
  if (r.size() == 0) throw std::invalid_argument("adaptive_sigma: empty residual vector");
  return std::max(sigma_min, std::sqrt(r.squaredNorm() / (2.0 * static_cast<double>(r.size()))));
}

double mcc_objective(const VectorXd& c, const RowMatrix& d, const VectorXd& y, double lambda,
                     double kernel_sigma) {
  const VectorXd r = residuals(d, c, y);
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += 1.0 - gaussian_kernel(r(i), kernel_sigma);
  return s + lambda * c.squaredNorm();
}

VectorXd mcc_objective_gradient(const VectorXd& c, const RowMatrix& d, const VectorXd& y,
                                double lambda, double kernel_sigma) {
  const VectorXd r = residuals(d, c, y);
  const double inv_s2 = 1.0 / (kernel_sigma * kernel_sigma);
  VectorXd g = 2.0 * lambda * c;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    g -= (gaussian_kernel(r(i), kernel_sigma) * r(i) * inv_s2) * d.row(i).transpose();
  return g;
}

double hq_objective(const VectorXd& c, const RowMatrix& d, const VectorXd& y, double lambda,
                    double kernel_sigma) {
  const VectorXd r = residuals(d, c, y);
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s -= gaussian_kernel(r(i), kernel_sigma);
  return s + lambda * c.squaredNorm();
}

MccSolveReport solve_mcc(const RowMatrix& d, const VectorXd& y, const MccConfig& config) {
  config.validate();
  check_rows(d, y, "MCC");
  const auto* fixed = std::get_if<FixedSigma>(&config.kernel_policy);
  const auto* adaptive = std::get_if<AdaptiveSigma>(&config.kernel_policy);

  MccSolveReport rep;
  LinearSolution init = solve_ridge(d, y, RidgeConfig{config.lambda});
  rep.warnings = std::move(init.warnings);
  VectorXd c = std::move(init.coefficients);
  VectorXd r = residuals(d, c, y);
  double sigma = fixed ? fixed->sigma : adaptive_sigma(r, adaptive->sigma_min);

  auto record = [&](const VectorXd& coef, double s, int iteration) {
    const double j = hq_objective(coef, d, y, config.lambda, s);
    const double loss = mcc_objective(coef, d, y, config.lambda, s);
    if (!std::isfinite(j) || !std::isfinite(loss))
      throw std::runtime_error("MCC objective is not finite at iteration " + std::to_string(iteration));
    rep.objective_trace.push_back(j);
    rep.loss_trace.push_back(loss);
  };
  record(c, sigma, 0);

  for (int t = 1; t <= config.max_iterations; ++t) {
    rep.sigma_trace.push_back(sigma);
    // -k(t) is concave in t^2 with slope -k'(t^2) = k(t) / (2 sigma^2), so half the
    // update_weights value makes each sweep minimize a majorizer of the loss.
    rep.weights = (0.5 * update_weights(r, sigma)).cwiseMax(std::numeric_limits<double>::min());
    VectorXd next = weighted_ridge_step(d, y, rep.weights, config.lambda);
    record(next, sigma, t);
    const double change = (next - c).norm() / std::max(c.norm(), 1e-12);
    c = std::move(next);
    r = residuals(d, c, y);
    if (adaptive) sigma = adaptive_sigma(r, adaptive->sigma_min);
    rep.iterations = t;
    if (change < config.tolerance) {
      rep.termination = Termination::Converged;
      break;
    }
  }
  rep.coefficients = std::move(c);
  return rep;
}

} // namespace pswfrec
