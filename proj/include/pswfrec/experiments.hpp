#pragma once

#include "pswfrec/dictionary.hpp"
#include "pswfrec/pswf_core.hpp"
#include "pswfrec/solvers.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace pswfrec {

enum class Estimator { Sinc, PSWF, RSinc, RPSWF, ESinc, EPSWF };

const char* to_string(Estimator e);
Estimator parse_estimator(const std::string& name);
const std::vector<Estimator>& all_estimators();

struct UniformSampling {
  int count = 64;
};

struct NonUniformSampling {
  int dense_count = 40;
  double dense_start = 0.0;
  double dense_end = 0.2;
  int sparse_count = 24;
};

using Sampling = std::variant<UniformSampling, NonUniformSampling>;

enum class BurstKind { Gaussian, UniformSpikes };

struct NoiseConfig {
  double base_std = 0.05;
  double burst_start = 0.0;
  double burst_end = 0.2;
  double burst_std = 2.0;       // Gaussian bursts
  double spike_amplitude = 0.0; // uniform spikes on [-a, a]
  // Probability that a sample inside the burst interval is contaminated.
  double burst_fraction = 1.0;
  BurstKind burst_kind = BurstKind::Gaussian;
};

struct ExperimentConfig {
  double window_start = 0.0;
  double window_end = 1.0;
  Sampling sampling = UniformSampling{};
  NoiseConfig noise;
  std::vector<Estimator> estimators = all_estimators();
  BandlimitParams basis = params_for_window(1.0, 60.0);
  std::optional<int> n_terms; // default_n_terms(basis) when empty
  double sinc_bandwidth = 60.0;
  RidgeConfig ridge;
  MccConfig mcc;
  // With an adaptive kernel, sigma_min = sigma_min_scale * max|y| when this
  // is positive, otherwise the absolute value in mcc.kernel_policy.
  double sigma_min_scale = 1e-3;
  std::uint64_t seed = 0;
  int eval_grid_size = 2048;

  void validate() const;
  int effective_n_terms() const;
  double window_center() const { return 0.5 * (window_start + window_end); }
};

ExperimentConfig preset_config(const std::string& name);
const std::vector<std::string>& preset_names();

nlohmann::json config_to_json(const ExperimentConfig& config);
// Missing fields keep the values already in `base`; unknown fields are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

double generate_test_signal(double t);

std::vector<double> inject_noise(const std::vector<double>& clean, const std::vector<double>& times,
                                 const NoiseConfig& noise, std::mt19937_64& rng);

std::vector<double> sample_grid(const ExperimentConfig& config);
std::vector<double> evaluation_grid(const ExperimentConfig& config);

double squared_error(const std::vector<double>& reference, const std::vector<double>& estimate);
double reconstruction_error(const ReconstructionModel& model, const std::vector<double>& grid,
                            const std::vector<double>& reference);

struct EstimatorResult {
  Estimator estimator = Estimator::Sinc;
  bool ok = false;
  std::string failure;
  double error = 0.0;
  double rmse = 0.0;
  double runtime_seconds = 0.0;
  int iterations = 0; // MCC sweeps; 0 for the direct solvers
  std::string termination;
  VectorXd coefficients;
  std::vector<std::string> warnings;
  std::vector<double> on_grid;    // reconstruction on the evaluation grid
  std::vector<double> on_samples; // reconstruction at the sample times
  std::optional<MccSolveReport> mcc;
};

struct ExperimentReport {
  ExperimentConfig config;
  int n_terms = 0;
  SampleSet samples;
  std::vector<double> clean_samples;
  std::vector<double> grid;
  std::vector<double> reference;
  std::vector<std::string> basis_warnings;
  std::vector<EstimatorResult> results;

  bool all_ok() const;
  const EstimatorResult& result(Estimator e) const;
  nlohmann::json to_json(bool include_runtime = false) const;
  std::string reconstruction_csv() const;
};

struct EstimatorRun {
  std::vector<EstimatorResult> results;
  std::vector<std::string> basis_warnings;
};

// Fits every estimator of `config` to `samples` and evaluates on `grid`.
// Errors are computed only when `reference` is non-empty. Failures are
// recorded per estimator rather than thrown.
EstimatorRun run_estimators(const ExperimentConfig& config, const SampleSet& samples,
                            const std::vector<double>& grid, const std::vector<double>& reference);

ExperimentReport run_experiment(const ExperimentConfig& config);

// Runs seeds first_seed .. first_seed + count - 1; results are in seed order
// regardless of `jobs`.
std::vector<ExperimentReport> run_seeds(const ExperimentConfig& config, std::uint64_t first_seed,
                                        int count, int jobs = 1);

enum class Aggregate { Median, Mean };
Aggregate parse_aggregate(const std::string& name);
const char* to_string(Aggregate a);

struct AggregateRow {
  Estimator estimator = Estimator::Sinc;
  double value = 0.0; // median or mean error over successful seeds
  double median = 0.0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int seeds = 0;
  int failures = 0;
};

std::vector<AggregateRow> aggregate_errors(const std::vector<ExperimentReport>& runs,
                                           Aggregate how);

double median(std::vector<double> values);

enum class SweepAxis { BurstStd, Lambda, NTerms };
SweepAxis parse_sweep_axis(const std::string& name);
const char* to_string(SweepAxis a);

// Copy of `config` with the axis set to `value`. Lambda sets both ridge and
// MCC weights; burst_std sets the spike amplitude for uniform spikes.
ExperimentConfig with_axis_value(const ExperimentConfig& config, SweepAxis axis, double value);

struct SweepRow {
  double axis_value = 0.0;
  AggregateRow row;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, SweepAxis axis,
                                const std::vector<double>& values, std::uint64_t first_seed,
                                int seeds, Aggregate how, int jobs = 1);
std::string sweep_csv(SweepAxis axis, Aggregate how, const std::vector<SweepRow>& rows);

} // namespace pswfrec
