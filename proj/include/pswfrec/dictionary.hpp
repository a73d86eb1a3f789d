#pragma once

#include "pswfrec/pswf_core.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace pswfrec {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SampleSet {
  std::vector<double> times; // strictly increasing
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
  void validate() const;
};

struct SincKind {
  double bandwidth = 0.0;
  std::vector<double> centers;
};

struct PswfKind {
  std::shared_ptr<const DiscretePswfBasis> basis;
  std::size_t n_terms = 0;
  double origin = 0.0; // basis functions are evaluated at t - origin
};

using DictionaryKind = std::variant<SincKind, PswfKind>;

std::size_t kind_terms(const DictionaryKind& kind);
std::string kind_label(const DictionaryKind& kind);

// Values of every expansion function of `kind` at `times`, one row per time.
RowMatrix design_matrix(const DictionaryKind& kind, const std::vector<double>& times);

struct Dictionary {
  RowMatrix matrix;
  DictionaryKind kind;
  std::vector<double> times;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
};

struct ReconstructionModel {
  Eigen::VectorXd coefficients;
  DictionaryKind kind;

  void validate() const;
};

Dictionary build_sinc_dictionary(const std::vector<double>& times, double bandwidth);

Dictionary build_pswf_dictionary(const std::vector<double>& times,
                                 std::shared_ptr<const DiscretePswfBasis> basis,
                                 std::size_t n_terms, double origin = 0.0);

std::vector<double> synthesize(const ReconstructionModel& model, const std::vector<double>& grid);

} // namespace pswfrec
