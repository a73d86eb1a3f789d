#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace pswfrec {

struct BandlimitParams {
  int half_length = 1;         // M, indices n = -M..M
  double time_bandwidth = 1.0; // c = omega0 * tau
  double omega0 = 1.0;

  int size() const { return 2 * half_length + 1; }
  double shannon_number() const;
  void validate() const; // throws std::invalid_argument
};

// Geometry used by the experiments: a window of length L centered at the
// origin, a trigonometric polynomial of period period_factor * L and enough
// harmonics to cover `bandwidth` rad/unit.
BandlimitParams params_for_window(double window_length, double bandwidth,
                                  double period_factor = 2.0);

enum class Symmetry { Even, Odd };

struct DiscretePswfBasis {
  BandlimitParams params;
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::MatrixXd eigenvectors; // column k holds phi_n^k, row index n + M
  std::vector<Symmetry> symmetry;
  std::vector<std::string> warnings;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

Eigen::MatrixXd build_sinc_kernel(const BandlimitParams& params);

DiscretePswfBasis compute_basis(const BandlimitParams& params);

double evaluate_basis_function(const DiscretePswfBasis& basis, std::size_t k, double t);

// Row-major times.size() x n_terms block of basis function values at omega0 * (t - origin).
Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
evaluate_basis_functions(const DiscretePswfBasis& basis, std::size_t n_terms,
                         const std::vector<double>& times, double origin = 0.0);

int default_n_terms(const BandlimitParams& params);

std::string basis_to_json(const DiscretePswfBasis& basis);
DiscretePswfBasis basis_from_json(const std::string& text);

const char* to_string(Symmetry s);

} // namespace pswfrec
