#include "pswfrec/experiments.hpp"

#include "pswfrec/json_io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pswfrec {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * (static_cast<double>(i) / (n - 1));
  v[n - 1] = b;
  return v;
}

void fail(const std::string& msg) { throw std::invalid_argument(msg); }

} // namespace

// ---- names ----

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::Sinc: return "Sinc";
    case Estimator::PSWF: return "PSWF";
    case Estimator::RSinc: return "RSinc";
    case Estimator::RPSWF: return "RPSWF";
    case Estimator::ESinc: return "ESinc";
    case Estimator::EPSWF: return "EPSWF";
  }
  return "?";
}

const std::vector<Estimator>& all_estimators() {
  static const std::vector<Estimator> all{Estimator::Sinc,  Estimator::PSWF,  Estimator::RSinc,
                                          Estimator::RPSWF, Estimator::ESinc, Estimator::EPSWF};
  return all;
}

Estimator parse_estimator(const std::string& name) {
  for (auto e : all_estimators())
    if (name == to_string(e)) return e;
  fail("unknown estimator '" + name + "' (expected Sinc, PSWF, RSinc, RPSWF, ESinc or EPSWF)");
  return Estimator::Sinc;
}

Aggregate parse_aggregate(const std::string& name) {
  if (name == "median") return Aggregate::Median;
  if (name == "mean") return Aggregate::Mean;
  fail("unknown aggregate '" + name + "' (expected median or mean)");
  return Aggregate::Median;
}

const char* to_string(Aggregate a) { return a == Aggregate::Median ? "median" : "mean"; }

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "burst_std") return SweepAxis::BurstStd;
  if (name == "lambda") return SweepAxis::Lambda;
  if (name == "n_terms") return SweepAxis::NTerms;
  fail("unknown sweep axis '" + name + "' (expected burst_std, lambda or n_terms)");
  return SweepAxis::BurstStd;
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::BurstStd: return "burst_std";
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::NTerms: return "n_terms";
  }
  return "?";
}

// ---- configuration ----

void ExperimentConfig::validate() const {
  if (!(window_end > window_start) || !std::isfinite(window_start) || !std::isfinite(window_end))
    fail("window must be a finite interval with t_end > t_start");
  if (const auto* u = std::get_if<UniformSampling>(&sampling)) {
    if (u->count < 2) fail("uniform sampling needs count >= 2");
  } else {
    const auto& s = std::get<NonUniformSampling>(sampling);
    if (s.dense_count < 2 || s.sparse_count < 0) fail("non-uniform sampling needs dense_count >= 2, sparse_count >= 0");
    if (!(s.dense_end > s.dense_start) || s.dense_start < window_start || s.dense_end > window_end)
      fail("dense interval must be a non-degenerate sub-interval of the window");
  }
  const auto& n = noise;
  for (double v : {n.base_std, n.burst_std, n.spike_amplitude})
    if (!(v >= 0.0) || !std::isfinite(v)) fail("noise levels must be finite and >= 0");
  if (!(n.burst_fraction >= 0.0 && n.burst_fraction <= 1.0)) fail("burst_fraction must lie in [0, 1]");
  if (!(n.burst_end >= n.burst_start) || n.burst_start < window_start || n.burst_end > window_end)
    fail("burst interval must lie within the window");
  if (estimators.empty()) fail("no estimators selected");
  for (std::size_t i = 0; i < estimators.size(); ++i)
    for (std::size_t j = i + 1; j < estimators.size(); ++j)
      if (estimators[i] == estimators[j]) fail(std::string("estimator listed twice: ") + to_string(estimators[i]));
  basis.validate();
  if (n_terms && (*n_terms < 1 || *n_terms > basis.size()))
    fail("n_terms must lie in [1, " + std::to_string(basis.size()) + "]");
  if (!(sinc_bandwidth > 0.0) || !std::isfinite(sinc_bandwidth)) fail("sinc_bandwidth must be positive");
  ridge.validate();
  mcc.validate();
  if (!(sigma_min_scale >= 0.0) || !std::isfinite(sigma_min_scale)) fail("sigma_min_scale must be >= 0");
  if (eval_grid_size < 64) fail("eval_grid_size must be >= 64");
}

int ExperimentConfig::effective_n_terms() const {
  return n_terms ? *n_terms : default_n_terms(basis);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"paper-uniform", "paper-nonuniform"};
  return names;
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.basis = params_for_window(c.window_end - c.window_start, c.sinc_bandwidth);
  c.n_terms = 28;
  c.noise.base_std = 0.01;
  c.noise.burst_fraction = 0.2;
  c.ridge.lambda = 0.1;
  c.mcc.lambda = 0.1;
  if (name == "paper-uniform") {
    c.sampling = UniformSampling{64};
    c.noise.burst_std = 5.0;
    c.estimators = {Estimator::Sinc, Estimator::PSWF, Estimator::RPSWF, Estimator::EPSWF};
  } else if (name == "paper-nonuniform") {
    c.sampling = NonUniformSampling{40, 0.0, 0.2, 24};
    c.noise.burst_std = 1.0;
    c.estimators = {Estimator::RSinc, Estimator::ESinc, Estimator::RPSWF, Estimator::EPSWF};
  } else {
    fail("unknown preset '" + name + "' (expected paper-uniform or paper-nonuniform)");
  }
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json j;
  j["window"] = {c.window_start, c.window_end};
  if (const auto* u = std::get_if<UniformSampling>(&c.sampling)) {
    j["sampling"] = {{"kind", "uniform"}, {"count", u->count}};
  } else {
    const auto& s = std::get<NonUniformSampling>(c.sampling);
    j["sampling"] = {{"kind", "nonuniform"},
                     {"dense_count", s.dense_count},
                     {"dense_interval", {s.dense_start, s.dense_end}},
                     {"sparse_count", s.sparse_count}};
  }
  j["noise"] = {{"base_std", c.noise.base_std},
                {"burst_interval", {c.noise.burst_start, c.noise.burst_end}},
                {"burst_std", c.noise.burst_std},
                {"burst_fraction", c.noise.burst_fraction},
                {"burst_kind", c.noise.burst_kind == BurstKind::Gaussian ? "gaussian" : "uniform_spikes"},
                {"spike_amplitude", c.noise.spike_amplitude}};
  json est = json::array();
  for (auto e : c.estimators) est.push_back(to_string(e));
  j["estimators"] = est;
  j["basis"] = {{"half_length", c.basis.half_length},
                {"time_bandwidth", c.basis.time_bandwidth},
                {"omega0", c.basis.omega0}};
  j["n_terms"] = c.n_terms ? json(*c.n_terms) : json(nullptr);
  j["sinc_bandwidth"] = c.sinc_bandwidth;
  j["ridge"] = {{"lambda", c.ridge.lambda}};
  json policy;
  if (const auto* f = std::get_if<FixedSigma>(&c.mcc.kernel_policy)) {
    policy = {{"kind", "fixed"}, {"sigma", f->sigma}};
  } else {
    policy = {{"kind", "adaptive"},
              {"sigma_min", std::get<AdaptiveSigma>(c.mcc.kernel_policy).sigma_min},
              {"sigma_min_scale", c.sigma_min_scale}};
  }
  j["mcc"] = {{"lambda", c.mcc.lambda},
              {"kernel_policy", policy},
              {"max_iterations", c.mcc.max_iterations},
              {"tolerance", c.mcc.tolerance}};
  j["seed"] = c.seed;
  j["eval_grid_size"] = c.eval_grid_size;
  return j;
}

namespace {

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) fail(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) fail("unknown field '" + it.key() + "' in " + where);
  }
}

std::pair<double, double> read_interval(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) fail(what + " must be a two-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  try {
    check_keys(j, {"window", "sampling", "noise", "estimators", "basis", "n_terms", "sinc_bandwidth",
                   "ridge", "mcc", "seed", "eval_grid_size"},
               "config");
    if (j.contains("window")) std::tie(c.window_start, c.window_end) = read_interval(j["window"], "window");
    if (j.contains("sampling")) {
      const auto& s = j["sampling"];
      const std::string kind = s.at("kind").get<std::string>();
      if (kind == "uniform") {
        check_keys(s, {"kind", "count"}, "sampling");
        UniformSampling u;
        if (auto* prev = std::get_if<UniformSampling>(&c.sampling)) u = *prev;
        read(s, "count", u.count);
        c.sampling = u;
      } else if (kind == "nonuniform") {
        check_keys(s, {"kind", "dense_count", "dense_interval", "sparse_count"}, "sampling");
        NonUniformSampling n;
        if (auto* prev = std::get_if<NonUniformSampling>(&c.sampling)) n = *prev;
        read(s, "dense_count", n.dense_count);
        read(s, "sparse_count", n.sparse_count);
        if (s.contains("dense_interval"))
          std::tie(n.dense_start, n.dense_end) = read_interval(s["dense_interval"], "dense_interval");
        c.sampling = n;
      } else {
        fail("sampling.kind must be 'uniform' or 'nonuniform'");
      }
    }
    if (j.contains("noise")) {
      const auto& n = j["noise"];
      check_keys(n, {"base_std", "burst_interval", "burst_std", "burst_fraction", "burst_kind", "spike_amplitude"},
                 "noise");
      read(n, "base_std", c.noise.base_std);
      read(n, "burst_std", c.noise.burst_std);
      read(n, "burst_fraction", c.noise.burst_fraction);
      read(n, "spike_amplitude", c.noise.spike_amplitude);
      if (n.contains("burst_interval"))
        std::tie(c.noise.burst_start, c.noise.burst_end) = read_interval(n["burst_interval"], "burst_interval");
      if (n.contains("burst_kind")) {
        const auto k = n["burst_kind"].get<std::string>();
        if (k == "gaussian")
          c.noise.burst_kind = BurstKind::Gaussian;
        else if (k == "uniform_spikes")
          c.noise.burst_kind = BurstKind::UniformSpikes;
        else
          fail("noise.burst_kind must be 'gaussian' or 'uniform_spikes'");
      }
    }
    if (j.contains("estimators")) {
      c.estimators.clear();
      for (const auto& e : j["estimators"]) c.estimators.push_back(parse_estimator(e.get<std::string>()));
    }
    if (j.contains("basis")) {
      check_keys(j["basis"], {"half_length", "time_bandwidth", "omega0"}, "basis");
      read(j["basis"], "half_length", c.basis.half_length);
      read(j["basis"], "time_bandwidth", c.basis.time_bandwidth);
      read(j["basis"], "omega0", c.basis.omega0);
    }
    if (j.contains("n_terms")) {
      if (j["n_terms"].is_null())
        c.n_terms.reset();
      else
        c.n_terms = j["n_terms"].get<int>();
    }
    read(j, "sinc_bandwidth", c.sinc_bandwidth);
    if (j.contains("ridge")) {
      check_keys(j["ridge"], {"lambda"}, "ridge");
      read(j["ridge"], "lambda", c.ridge.lambda);
    }
    if (j.contains("mcc")) {
      const auto& m = j["mcc"];
      check_keys(m, {"lambda", "kernel_policy", "max_iterations", "tolerance"}, "mcc");
      read(m, "lambda", c.mcc.lambda);
      read(m, "max_iterations", c.mcc.max_iterations);
      read(m, "tolerance", c.mcc.tolerance);
      if (m.contains("kernel_policy")) {
        const auto& p = m["kernel_policy"];
        const auto kind = p.at("kind").get<std::string>();
        if (kind == "fixed") {
          check_keys(p, {"kind", "sigma"}, "mcc.kernel_policy");
          c.mcc.kernel_policy = FixedSigma{p.at("sigma").get<double>()};
        } else if (kind == "adaptive") {
          check_keys(p, {"kind", "sigma_min", "sigma_min_scale"}, "mcc.kernel_policy");
          AdaptiveSigma a;
          if (auto* prev = std::get_if<AdaptiveSigma>(&c.mcc.kernel_policy)) a = *prev;
          read(p, "sigma_min", a.sigma_min);
          read(p, "sigma_min_scale", c.sigma_min_scale);
          c.mcc.kernel_policy = a;
        } else {
          fail("mcc.kernel_policy.kind must be 'fixed' or 'adaptive'");
        }
      }
    }
    read(j, "seed", c.seed);
    read(j, "eval_grid_size", c.eval_grid_size);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("invalid config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---- signal, noise, grids ----

double generate_test_signal(double t) {
  return std::sin(50.0 * t + 0.1) + std::sin(30.0 * t + 0.8) + std::sin(40.0 * t + 0.5);
}

std::vector<double> inject_noise(const std::vector<double>& clean, const std::vector<double>& times,
                                 const NoiseConfig& noise, std::mt19937_64& rng) {
  if (clean.size() != times.size()) fail("inject_noise: clean and times differ in length");
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  std::vector<double> y(clean.size());
  // Every draw happens for every sample so that changing a noise level rescales
  // the same realization.
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double z_base = normal(rng);
    const double hit = uniform(rng);
    const double z_burst = normal(rng);
    const double spike = 2.0 * uniform(rng) - 1.0;
    double n = noise.base_std * z_base;
    const bool in_burst = times[i] >= noise.burst_start && times[i] <= noise.burst_end;
    if (in_burst && hit < noise.burst_fraction)
      n += noise.burst_kind == BurstKind::Gaussian ? noise.burst_std * z_burst : noise.spike_amplitude * spike;
    y[i] = clean[i] + n;
  }
  return y;
}

std::vector<double> sample_grid(const ExperimentConfig& config) {
  const double a = config.window_start, b = config.window_end;
  std::vector<double> t;
  if (const auto* u = std::get_if<UniformSampling>(&config.sampling)) {
    if (u->count < 2) fail("uniform sampling needs count >= 2");
    t = linspace(a, b, u->count);
  } else {
    const auto& s = std::get<NonUniformSampling>(config.sampling);
    if (s.dense_count < 1) fail("dense_count must be >= 1");
    t = linspace(s.dense_start, s.dense_end, s.dense_count);
    // Sparse points fill the rest of the window: [a, dense_start) and (dense_end, b].
    const double left = s.dense_start - a, right = b - s.dense_end;
    if (s.sparse_count > 0 && left + right > 0.0) {
      const int n_left = static_cast<int>(std::lround(s.sparse_count * left / (left + right)));
      const int n_right = s.sparse_count - n_left;
      for (int k = 0; k < n_left; ++k) t.push_back(a + left * (static_cast<double>(k) / n_left));
      for (int k = 1; k <= n_right; ++k)
        t.push_back(k == n_right ? b : s.dense_end + right * (static_cast<double>(k) / n_right));
    }
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
  if (t.size() < 2) fail("sampling produced fewer than 2 points");
  return t;
}

std::vector<double> evaluation_grid(const ExperimentConfig& config) {
  return linspace(config.window_start, config.window_end, config.eval_grid_size);
}

double squared_error(const std::vector<double>& reference, const std::vector<double>& estimate) {
  if (reference.size() != estimate.size()) fail("squared_error: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - estimate[i];
    s += d * d;
  }
  return s;
}

double reconstruction_error(const ReconstructionModel& model, const std::vector<double>& grid,
                            const std::vector<double>& reference) {
  if (grid.size() != reference.size()) fail("reconstruction_error: grid and reference differ in length");
  return squared_error(reference, synthesize(model, grid));
}

// ---- running ----

bool ExperimentReport::all_ok() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.ok; });
}

const EstimatorResult& ExperimentReport::result(Estimator e) const {
  for (const auto& r : results)
    if (r.estimator == e) return r;
  throw std::out_of_range(std::string("estimator not in report: ") + to_string(e));
}

EstimatorRun run_estimators(const ExperimentConfig& config, const SampleSet& samples,
                            const std::vector<double>& grid, const std::vector<double>& reference) {
  samples.validate();
  if (!reference.empty() && reference.size() != grid.size())
    fail("run_estimators: reference and grid differ in length");
  EstimatorRun run;
  const auto& est = config.estimators;
  auto uses = [&](std::initializer_list<Estimator> es) {
    return std::any_of(es.begin(), es.end(),
                       [&](Estimator e) { return std::find(est.begin(), est.end(), e) != est.end(); });
  };

  std::optional<Dictionary> sinc, pswf;
  std::string sinc_error, pswf_error;
  if (uses({Estimator::Sinc, Estimator::RSinc, Estimator::ESinc})) {
    try {
      sinc = build_sinc_dictionary(samples.times, config.sinc_bandwidth);
    } catch (const std::exception& e) {
      sinc_error = e.what();
    }
  }
  if (uses({Estimator::PSWF, Estimator::RPSWF, Estimator::EPSWF})) {
    try {
      auto basis = std::make_shared<const DiscretePswfBasis>(compute_basis(config.basis));
      run.basis_warnings = basis->warnings;
      pswf = build_pswf_dictionary(samples.times, basis, config.effective_n_terms(), config.window_center());
    } catch (const std::exception& e) {
      pswf_error = e.what();
    }
  }

  const VectorXd y = Eigen::Map<const VectorXd>(samples.values.data(), samples.values.size());
  MccConfig mcc = config.mcc;
  if (auto* a = std::get_if<AdaptiveSigma>(&mcc.kernel_policy); a && config.sigma_min_scale > 0.0) {
    const double floor = config.sigma_min_scale * y.cwiseAbs().maxCoeff();
    if (floor > 0.0) a->sigma_min = floor;
  }

  for (Estimator e : est) {
    EstimatorResult r;
    r.estimator = e;
    const bool is_sinc = e == Estimator::Sinc || e == Estimator::RSinc || e == Estimator::ESinc;
    const auto& dict = is_sinc ? sinc : pswf;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (!dict) throw std::runtime_error(is_sinc ? sinc_error : pswf_error);
      if (e == Estimator::Sinc || e == Estimator::PSWF) {
        auto s = solve_least_squares(*dict, y);
        r.coefficients = std::move(s.coefficients);
        r.warnings = std::move(s.warnings);
      } else if (e == Estimator::RSinc || e == Estimator::RPSWF) {
        auto s = solve_ridge(*dict, y, config.ridge);
        r.coefficients = std::move(s.coefficients);
        r.warnings = std::move(s.warnings);
      } else {
        auto s = solve_mcc(*dict, y, mcc);
        r.coefficients = s.coefficients;
        r.warnings = s.warnings;
        r.iterations = s.iterations;
        r.termination = to_string(s.termination);
        r.mcc = std::move(s);
      }
      const ReconstructionModel model{r.coefficients, dict->kind};
      r.on_grid = synthesize(model, grid);
      r.on_samples = synthesize(model, samples.times);
      for (double v : r.on_grid)
        if (!std::isfinite(v)) throw std::runtime_error("reconstruction is not finite");
      if (!reference.empty()) {
        r.error = squared_error(reference, r.on_grid);
        r.rmse = std::sqrt(r.error / static_cast<double>(grid.size()));
      } else {
        r.error = r.rmse = std::numeric_limits<double>::quiet_NaN();
      }
      r.ok = true;
    } catch (const std::exception& ex) {
      r.ok = false;
      r.failure = ex.what();
      r.on_grid.clear();
      r.on_samples.clear();
    }
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.results.push_back(std::move(r));
  }
  return run;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport rep;
  rep.config = config;
  rep.n_terms = config.effective_n_terms();
  rep.samples.times = sample_grid(config);
  for (double t : rep.samples.times) rep.clean_samples.push_back(generate_test_signal(t));
  std::mt19937_64 rng(config.seed);
  rep.samples.values = inject_noise(rep.clean_samples, rep.samples.times, config.noise, rng);
  rep.grid = evaluation_grid(config);
  for (double t : rep.grid) rep.reference.push_back(generate_test_signal(t));
  auto run = run_estimators(config, rep.samples, rep.grid, rep.reference);
  rep.results = std::move(run.results);
  rep.basis_warnings = std::move(run.basis_warnings);
  return rep;
}

std::vector<ExperimentReport> run_seeds(const ExperimentConfig& config, std::uint64_t first_seed,
                                        int count, int jobs) {
  if (count < 1) fail("seed count must be >= 1");
  std::vector<ExperimentReport> out(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      ExperimentConfig c = config;
      c.seed = first_seed + static_cast<std::uint64_t>(i);
      out[i] = run_experiment(c);
    }
  };
  jobs = std::clamp(jobs, 1, count);
  std::vector<std::future<void>> pending;
  for (int k = 1; k < jobs; ++k) pending.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& f : pending) f.get();
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<AggregateRow> aggregate_errors(const std::vector<ExperimentReport>& runs, Aggregate how) {
  std::vector<AggregateRow> rows;
  if (runs.empty()) return rows;
  for (Estimator e : runs.front().config.estimators) {
    AggregateRow row;
    row.estimator = e;
    std::vector<double> errs;
    for (const auto& run : runs) {
      const auto& r = run.result(e);
      if (r.ok)
        errs.push_back(r.error);
      else
        ++row.failures;
    }
    row.seeds = static_cast<int>(runs.size());
    if (!errs.empty()) {
      row.median = median(errs);
      double s = 0.0;
      for (double v : errs) s += v;
      row.mean = s / static_cast<double>(errs.size());
      row.min = *std::min_element(errs.begin(), errs.end());
      row.max = *std::max_element(errs.begin(), errs.end());
    } else {
      row.median = row.mean = row.min = row.max = std::numeric_limits<double>::quiet_NaN();
    }
    row.value = how == Aggregate::Median ? row.median : row.mean;
    rows.push_back(row);
  }
  return rows;
}

ExperimentConfig with_axis_value(const ExperimentConfig& config, SweepAxis axis, double value) {
  ExperimentConfig c = config;
  switch (axis) {
    case SweepAxis::BurstStd:
      if (c.noise.burst_kind == BurstKind::Gaussian)
        c.noise.burst_std = value;
      else
        c.noise.spike_amplitude = value;
      break;
    case SweepAxis::Lambda:
      c.ridge.lambda = value;
      c.mcc.lambda = value;
      break;
    case SweepAxis::NTerms:
      if (value != std::floor(value)) fail("n_terms sweep values must be integers");
      c.n_terms = static_cast<int>(value);
      break;
  }
  c.validate();
  return c;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, SweepAxis axis,
                                const std::vector<double>& values, std::uint64_t first_seed, int seeds,
                                Aggregate how, int jobs) {
  if (values.empty()) fail("sweep needs at least one axis value");
  std::vector<ExperimentConfig> configs;
  for (double v : values) configs.push_back(with_axis_value(config, axis, v));
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto runs = run_seeds(configs[k], first_seed, seeds, jobs);
    for (const auto& row : aggregate_errors(runs, how)) rows.push_back({values[k], row});
  }
  return rows;
}

// ---- export ----

namespace {

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : ""; }

nlohmann::json to_array(const VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

} // namespace

nlohmann::json ExperimentReport::to_json(bool include_runtime) const {
  using nlohmann::json;
  json j;
  j["config"] = config_to_json(config);
  j["n_terms"] = n_terms;
  j["basis_warnings"] = basis_warnings;
  j["samples"] = {{"times", samples.times}, {"values", samples.values}, {"clean", clean_samples}};
  j["evaluation_grid"] = {{"size", grid.size()}, {"t_start", grid.front()}, {"t_end", grid.back()},
                          {"reference", reference}};
  json ests = json::array();
  for (const auto& r : results) {
    json e;
    e["name"] = to_string(r.estimator);
    e["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) e["failure"] = r.failure;
    if (r.ok) {
      e["error"] = r.error;
      e["rmse"] = r.rmse;
      e["coefficients"] = {{"count", r.coefficients.size()},
                           {"l2_norm", r.coefficients.norm()},
                           {"max_abs", r.coefficients.size() ? r.coefficients.cwiseAbs().maxCoeff() : 0.0},
                           {"values", to_array(r.coefficients)}};
    }
    e["iterations"] = r.iterations;
    if (!r.termination.empty()) e["termination"] = r.termination;
    e["warnings"] = r.warnings;
    if (r.mcc) e["mcc"] = r.mcc->to_json();
    if (include_runtime) e["runtime_seconds"] = r.runtime_seconds;
    ests.push_back(std::move(e));
  }
  j["estimators"] = std::move(ests);
  return j;
}

std::string ExperimentReport::reconstruction_csv() const {
  struct Row {
    double t;
    int grid = -1;
    int sample = -1;
  };
  std::vector<Row> rows;
  std::size_t g = 0, s = 0;
  while (g < grid.size() || s < samples.times.size()) {
    if (s == samples.times.size() || (g < grid.size() && grid[g] < samples.times[s])) {
      rows.push_back({grid[g], static_cast<int>(g), -1});
      ++g;
    } else if (g == grid.size() || samples.times[s] < grid[g]) {
      rows.push_back({samples.times[s], -1, static_cast<int>(s)});
      ++s;
    } else {
      rows.push_back({grid[g], static_cast<int>(g), static_cast<int>(s)});
      ++g;
      ++s;
    }
  }

  std::ostringstream out;
  out << "t,x_true,y";
  for (const auto& r : results) out << ',' << to_string(r.estimator);
  out << '\n';
  for (const auto& row : rows) {
    out << format_double(row.t) << ',';
    out << format_double(row.grid >= 0 ? reference[row.grid] : clean_samples[row.sample]) << ',';
    if (row.sample >= 0) out << format_double(samples.values[row.sample]);
    for (const auto& r : results) {
      out << ',';
      if (!r.ok) continue;
      out << csv_number(row.grid >= 0 ? r.on_grid[row.grid] : r.on_samples[row.sample]);
    }
    out << '\n';
  }
  return out.str();
}

std::string sweep_csv(SweepAxis axis, Aggregate how, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  // `error` holds the statistic named in `aggregate`.
  out << to_string(axis) << ",estimator,aggregate,error,median_error,mean_error,min_error,max_error,seeds,failures\n";
  for (const auto& r : rows) {
    out << format_double(r.axis_value) << ',' << to_string(r.row.estimator) << ',' << to_string(how) << ','
        << csv_number(r.row.value) << ',' << csv_number(r.row.median) << ',' << csv_number(r.row.mean)
        << ',' << csv_number(r.row.min) << ',' << csv_number(r.row.max) << ',' << r.row.seeds << ','
        << r.row.failures << '\n';
  }
  return out.str();
}

} // namespace pswfrec
