#include "pswfrec/dictionary.hpp"

#include "pswfrec/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pswfrec {

namespace {

void require_increasing(const std::vector<double>& times, const char* what) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) {
      std::ostringstream msg;
      msg << what << ": time " << i << " is not finite";
      throw std::invalid_argument(msg.str());
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      std::ostringstream msg;
      msg << what << ": times must be strictly increasing; t[" << i - 1 << "] = " << times[i - 1]
          << ", t[" << i << "] = " << times[i]
          << (times[i] == times[i - 1] ? " (duplicate)" : "");
      throw std::invalid_argument(msg.str());
    }
  }
}

// sin(s d) / (s d), written in |d| so that swapping the arguments is exact.
double sinc_entry(double bandwidth, double d) {
  if (d == 0.0) return 1.0;
  const double x = bandwidth * std::abs(d);
  return std::sin(x) / x;
}

} // namespace

void SampleSet::validate() const {
  if (times.empty()) throw std::invalid_argument("sample set is empty");
  if (times.size() != values.size())
    throw std::invalid_argument("sample set: " + std::to_string(times.size()) + " times but " +
                                std::to_string(values.size()) + " values");
  require_increasing(times, "sample set");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw std::invalid_argument("sample set: value " + std::to_string(i) + " is not finite");
}

std::size_t kind_terms(const DictionaryKind& kind) {
  if (const auto* s = std::get_if<SincKind>(&kind)) return s->centers.size();
  return std::get<PswfKind>(kind).n_terms;
}

std::string kind_label(const DictionaryKind& kind) {
  if (const auto* s = std::get_if<SincKind>(&kind)) {
    std::ostringstream out;
    out << "sinc(bandwidth=" << s->bandwidth << ", terms=" << s->centers.size() << ")";
    return out.str();
  }
  const auto& p = std::get<PswfKind>(kind);
  std::ostringstream out;
  out << "pswf(M=" << p.basis->params.half_length << ", c=" << p.basis->params.time_bandwidth
      << ", omega0=" << p.basis->params.omega0 << ", terms=" << p.n_terms << ")";
  return out.str();
}

RowMatrix design_matrix(const DictionaryKind& kind, const std::vector<double>& times) {
  if (const auto* s = std::get_if<SincKind>(&kind)) {
    RowMatrix a(times.size(), s->centers.size());
    for (std::size_t i = 0; i < times.size(); ++i)
      for (std::size_t j = 0; j < s->centers.size(); ++j)
        a(i, j) = sinc_entry(s->bandwidth, times[i] - s->centers[j]);
    return a;
  }
  const auto& p = std::get<PswfKind>(kind);
  if (!p.basis) throw std::invalid_argument("PSWF dictionary without a basis");
  return evaluate_basis_functions(*p.basis, p.n_terms, times, p.origin);
}

Dictionary build_sinc_dictionary(const std::vector<double>& times, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw std::invalid_argument("sinc bandwidth must be positive and finite");
  if (times.empty()) throw std::invalid_argument("sinc dictionary needs at least one time");
  require_increasing(times, "sinc dictionary");
  Dictionary d;
  d.kind = SincKind{bandwidth, times};
  d.matrix = design_matrix(d.kind, times);
  d.times = times;
  return d;
}

Dictionary build_pswf_dictionary(const std::vector<double>& times,
                                 std::shared_ptr<const DiscretePswfBasis> basis,
                                 std::size_t n_terms, double origin) {
  if (!basis) throw std::invalid_argument("PSWF dictionary without a basis");
  if (n_terms < 1 || n_terms > basis->size())
    throw std::out_of_range("n_terms must lie in [1, " + std::to_string(basis->size()) +
                            "], got " + std::to_string(n_terms));
  for (std::size_t i = 0; i < times.size(); ++i)
    if (!std::isfinite(times[i]))
      throw std::invalid_argument("PSWF dictionary: time " + std::to_string(i) + " is not finite");
  Dictionary d;
  d.kind = PswfKind{std::move(basis), n_terms, origin};
  d.matrix = design_matrix(d.kind, times);
  d.times = times;
  return d;
}

void ReconstructionModel::validate() const {
  if (static_cast<std::size_t>(coefficients.size()) != kind_terms(kind))
    throw std::invalid_argument("model has " + std::to_string(coefficients.size()) +
                                " coefficients but its basis has " +
                                std::to_string(kind_terms(kind)) + " terms");
  if (!coefficients.allFinite()) throw std::invalid_argument("model coefficients are not finite");
}

std::vector<double> synthesize(const ReconstructionModel& model, const std::vector<double>& grid) {
  model.validate();
  const RowMatrix a = design_matrix(model.kind, grid);
  std::vector<double> out(grid.size());
  const std::size_t n = static_cast<std::size_t>(a.cols());
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[i] = kernels::dot(a.data() + i * n, model.coefficients.data(), n);
  return out;
}

} // namespace pswfrec
