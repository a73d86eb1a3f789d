#pragma once

#include "pswfrec/dictionary.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace pswfrec {

using Eigen::VectorXd;

struct RidgeConfig {
  double lambda = 1e-3;
  void validate() const;
};

struct FixedSigma {
  double sigma = 1.0;
};
struct AdaptiveSigma {
  double sigma_min = 1e-3;
};
using KernelPolicy = std::variant<FixedSigma, AdaptiveSigma>;

struct MccConfig {
  double lambda = 1e-3;
  KernelPolicy kernel_policy = AdaptiveSigma{};
  int max_iterations = 100;
  double tolerance = 1e-8;
  void validate() const;
};

struct LinearSolution {
  VectorXd coefficients;
  double condition_number = 0.0; // of the design matrix (LS) or the regularized Gram (ridge)
  std::vector<std::string> warnings;
};

enum class Termination { Converged, MaxIterations };
const char* to_string(Termination t);

struct MccSolveReport {
  VectorXd coefficients;
  // sum(-k(r_i)) + lambda |c|^2, starting with the ridge initialization.
  // Non-increasing for a fixed kernel width.
  std::vector<double> objective_trace;
  // The correntropy loss sum(1 - k(r_i)) + lambda |c|^2 at the same points.
  std::vector<double> loss_trace;
  VectorXd weights;               // from the last sweep, k(r_i) / (2 sigma^2)
  std::vector<double> sigma_trace; // kernel width used by each sweep
  int iterations = 0;
  Termination termination = Termination::MaxIterations;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

double gaussian_kernel(double u, double kernel_sigma);
double correntropy_estimate(const VectorXd& x, const VectorXd& y, double kernel_sigma);
double cim(const VectorXd& x, const VectorXd& y, double kernel_sigma);

VectorXd residuals(const RowMatrix& d, const VectorXd& c, const VectorXd& y);

LinearSolution solve_least_squares(const RowMatrix& d, const VectorXd& y);
LinearSolution solve_ridge(const RowMatrix& d, const VectorXd& y, const RidgeConfig& config);
VectorXd update_weights(const VectorXd& r, double kernel_sigma);
VectorXd weighted_ridge_step(const RowMatrix& d, const VectorXd& y, const VectorXd& w,
                             double lambda);
double adaptive_sigma(const VectorXd& r, double sigma_min);

double mcc_objective(const VectorXd& c, const RowMatrix& d, const VectorXd& y, double lambda,
                     double kernel_sigma);
VectorXd mcc_objective_gradient(const VectorXd& c, const RowMatrix& d, const VectorXd& y,
                                double lambda, double kernel_sigma);
// The function the half-quadratic sweep decreases for a fixed kernel width.
double hq_objective(const VectorXd& c, const RowMatrix& d, const VectorXd& y, double lambda,
                    double kernel_sigma);

MccSolveReport solve_mcc(const RowMatrix& d, const VectorXd& y, const MccConfig& config);

inline LinearSolution solve_least_squares(const Dictionary& d, const VectorXd& y) {
  return solve_least_squares(d.matrix, y);
}
inline LinearSolution solve_ridge(const Dictionary& d, const VectorXd& y, const RidgeConfig& config) {
  return solve_ridge(d.matrix, y, config);
}
inline MccSolveReport solve_mcc(const Dictionary& d, const VectorXd& y, const MccConfig& config) {
  return solve_mcc(d.matrix, y, config);
}

} // namespace pswfrec
