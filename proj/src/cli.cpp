#include "pswfrec/cli.hpp"

#include "pswfrec/experiments.hpp"
#include "pswfrec/json_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace pswfrec {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing file: " + path.string());
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (!fs::is_directory(p)) throw UsageError("output directory is not usable: " + dir);
  return p;
}

// ---- basis ----

struct BasisArgs {
  int half_length = 10;
  double time_bandwidth = 1.0;
  double omega0 = M_PI;
  std::string output = "basis.json";
};

int cmd_basis(const BasisArgs& a, std::ostream& out) {
  BandlimitParams p{a.half_length, a.time_bandwidth, a.omega0};
  p.validate();
  const auto basis = compute_basis(p);
  write_file(a.output, basis_to_json(basis));
  out << "basis M=" << p.half_length << " c=" << format_double(p.time_bandwidth)
      << " omega0=" << format_double(p.omega0) << " (" << p.size() << " functions, Shannon number "
      << fmt("%.4f", p.shannon_number()) << ")\n";
  out << "   k  symmetry  eigenvalue                1 - eigenvalue\n";
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double l = basis.eigenvalues(k);
    out << fmt("%4.0f", static_cast<double>(k)) << "  " << (basis.symmetry[k] == Symmetry::Even ? "even    " : "odd     ")
        << fmt("%-24.17g", l) << "  " << fmt("%.6e", 1.0 - l) << "\n";
  }
  out << "sum of eigenvalues " << format_double(basis.eigenvalues.sum()) << "\n";
  for (const auto& w : basis.warnings) out << "warning: " << w << "\n";
  out << "wrote " << a.output << "\n";
  return 0;
}

// ---- shared experiment options ----

struct RunArgs {
  std::string preset;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int seeds = 1;
  std::string aggregate = "median";
  std::string output_dir = ".";
  int jobs = 1;
  std::optional<double> burst_std;
  std::optional<double> lambda;
  std::optional<int> n_terms;
  std::vector<std::string> estimators;
  bool timings = false;
};

void add_run_options(CLI::App* sub, RunArgs& a) {
  sub->add_option("--preset", a.preset, "Preset configuration (paper-uniform, paper-nonuniform)");
  sub->add_option("--config", a.config_path, "JSON configuration file; applied on top of the preset");
  sub->add_option("--seed", a.seed, "Seed (first seed when --seeds > 1)");
  sub->add_option("--seeds", a.seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber);
  sub->add_option("--aggregate", a.aggregate, "Aggregate over seeds: median or mean");
  sub->add_option("--output-dir,-o", a.output_dir, "Directory for output files");
  sub->add_option("--jobs,-j", a.jobs, "Worker threads for independent seeds")->check(CLI::PositiveNumber);
  sub->add_option("--burst-std", a.burst_std, "Override the burst noise level");
  sub->add_option("--lambda", a.lambda, "Override the ridge and MCC regularization weight");
  sub->add_option("--n-terms", a.n_terms, "Override the number of PSWF terms");
  sub->add_option("--estimators", a.estimators, "Comma-separated estimator list")->delimiter(',');
}

ExperimentConfig resolve_config(const RunArgs& a) {
  ExperimentConfig c = a.preset.empty() ? ExperimentConfig{} : preset_config(a.preset);
  if (!a.config_path.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(a.config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError("config file " + a.config_path + " is not valid JSON: " + e.what());
    }
    c = config_from_json(j, c);
  }
  if (a.seed) c.seed = *a.seed;
  if (a.burst_std) c = with_axis_value(c, SweepAxis::BurstStd, *a.burst_std);
  if (a.lambda) c = with_axis_value(c, SweepAxis::Lambda, *a.lambda);
  if (a.n_terms) c.n_terms = *a.n_terms;
  if (!a.estimators.empty()) {
    c.estimators.clear();
    for (const auto& e : a.estimators) c.estimators.push_back(parse_estimator(e));
  }
  c.validate();
  return c;
}

void print_single(const ExperimentReport& rep, std::ostream& out) {
  out << "estimator            error         RMSE  iterations  runtime_s\n";
  for (const auto& r : rep.results) {
    char name[16];
    std::snprintf(name, sizeof name, "%-9s", to_string(r.estimator));
    out << name;
    if (r.ok) {
      out << fmt("%16.6g", r.error) << fmt("%13.6g", r.rmse) << fmt("%12.0f", static_cast<double>(r.iterations))
          << fmt("%11.4f", r.runtime_seconds) << "\n";
    } else {
      out << "  FAILED: " << r.failure << "\n";
    }
  }
}

void print_aggregate(const std::vector<AggregateRow>& rows, Aggregate how, int seeds, std::ostream& out) {
  out << to_string(how) << " over " << seeds << " seeds\n";
  out << "estimator     " << (how == Aggregate::Median ? "median" : "  mean")
      << "          min          max  failures\n";
  for (const auto& r : rows) {
    char name[16];
    std::snprintf(name, sizeof name, "%-9s", to_string(r.estimator));
    out << name << fmt("%11.6g", r.value) << fmt("%13.6g", r.min) << fmt("%13.6g", r.max)
        << fmt("%10.0f", static_cast<double>(r.failures)) << "\n";
  }
}

int cmd_experiment(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = resolve_config(a);
  const Aggregate how = parse_aggregate(a.aggregate);
  const fs::path dir = prepare_dir(a.output_dir);

  bool failed = false;
  if (a.seeds == 1) {
    const auto rep = run_experiment(config);
    write_file(dir / "report.json", dump_json(rep.to_json(a.timings)));
    write_file(dir / "reconstruction.csv", rep.reconstruction_csv());
    print_single(rep, out);
    failed = !rep.all_ok();
  } else {
    const auto runs = run_seeds(config, config.seed, a.seeds, a.jobs);
    const auto rows = aggregate_errors(runs, how);
    nlohmann::json j;
    j["config"] = config_to_json(config);
    j["seeds"] = {{"first", config.seed}, {"count", a.seeds}};
    j["aggregate"] = to_string(how);
    nlohmann::json agg = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json e{{"name", to_string(r.estimator)}, {"value", r.value},   {"median", r.median},
                       {"mean", r.mean},                 {"min", r.min},       {"max", r.max},
                       {"seeds", r.seeds},               {"failures", r.failures}};
      nlohmann::json per_seed = nlohmann::json::array();
      for (const auto& run : runs) {
        const auto& res = run.result(r.estimator);
        per_seed.push_back(res.ok ? nlohmann::json(res.error) : nlohmann::json(nullptr));
      }
      e["errors"] = per_seed;
      agg.push_back(std::move(e));
    }
    j["estimators"] = std::move(agg);
    j["first_seed_report"] = runs.front().to_json(a.timings);
    write_file(dir / "report.json", dump_json(j));
    write_file(dir / "reconstruction.csv", runs.front().reconstruction_csv());
    print_aggregate(rows, how, a.seeds, out);
    for (const auto& r : rows) failed = failed || r.failures > 0;
  }
  if (failed) {
    err << "error: one or more estimators failed; see report.json\n";
    return 1;
  }
  return 0;
}

// ---- sweep ----

int cmd_sweep(const RunArgs& a, const std::string& axis_name, const std::vector<double>& values,
              std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = resolve_config(a);
  const SweepAxis axis = parse_sweep_axis(axis_name);
  const Aggregate how = parse_aggregate(a.aggregate);
  if (values.empty()) throw UsageError("--values needs at least one entry");
  const fs::path dir = prepare_dir(a.output_dir);
  const auto rows = run_sweep(config, axis, values, config.seed, a.seeds, how, a.jobs);
  write_file(dir / "sweep.csv", sweep_csv(axis, how, rows));
  out << to_string(axis) << "     estimator  " << to_string(how) << "_error  failures\n";
  bool failed = false;
  for (const auto& r : rows) {
    char name[16];
    std::snprintf(name, sizeof name, "%-9s", to_string(r.row.estimator));
    out << fmt("%-12.6g", r.axis_value) << name << fmt("%14.6g", r.row.value)
        << fmt("%10.0f", static_cast<double>(r.row.failures)) << "\n";
    failed = failed || r.row.failures > 0;
  }
  out << "wrote " << (dir / "sweep.csv").string() << "\n";
  if (failed) {
    err << "error: some runs failed; see sweep.csv\n";
    return 1;
  }
  return 0;
}

// ---- reconstruct ----

struct ReconstructArgs {
  std::string input;
  std::vector<std::string> estimators{"EPSWF"};
  double bandwidth = 60.0;
  double period_factor = 2.0;
  std::optional<int> half_length;
  std::optional<double> time_bandwidth;
  std::optional<double> omega0;
  std::optional<int> n_terms;
  double lambda = 1e-3;
  std::optional<double> kernel_sigma;
  int grid_size = 2048;
  std::string output_dir = ".";
};

SampleSet read_samples(const std::string& path) {
  std::istringstream in(read_file(path));
  SampleSet s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected 't,y'");
    try {
      std::size_t used = 0;
      const double t = std::stod(line.substr(0, comma), &used);
      const double y = std::stod(line.substr(comma + 1));
      s.times.push_back(t);
      s.values.push_back(y);
    } catch (const std::logic_error&) {
      if (s.times.empty() && lineno == 1) continue; // header
      throw UsageError(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  s.validate();
  if (s.size() < 2) throw UsageError("need at least two samples");
  return s;
}

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out, std::ostream& err) {
  const SampleSet samples = read_samples(a.input);
  ExperimentConfig c;
  c.window_start = samples.times.front();
  c.window_end = samples.times.back();
  c.noise = NoiseConfig{0.0, c.window_start, c.window_start, 0.0, 0.0, 0.0, BurstKind::Gaussian};
  c.sinc_bandwidth = a.bandwidth;
  c.basis = params_for_window(c.window_end - c.window_start, a.bandwidth, a.period_factor);
  if (a.half_length) c.basis.half_length = *a.half_length;
  if (a.time_bandwidth) c.basis.time_bandwidth = *a.time_bandwidth;
  if (a.omega0) c.basis.omega0 = *a.omega0;
  c.n_terms = a.n_terms;
  c.ridge.lambda = a.lambda;
  c.mcc.lambda = a.lambda;
  if (a.kernel_sigma) c.mcc.kernel_policy = FixedSigma{*a.kernel_sigma};
  c.eval_grid_size = a.grid_size;
  c.estimators.clear();
  for (const auto& e : a.estimators) c.estimators.push_back(parse_estimator(e));
  c.validate();

  const auto grid = evaluation_grid(c);
  const auto run = run_estimators(c, samples, grid, {});
  const fs::path dir = prepare_dir(a.output_dir);

  nlohmann::json j;
  j["input"] = a.input;
  j["window"] = {c.window_start, c.window_end};
  j["basis"] = {{"half_length", c.basis.half_length},
                {"time_bandwidth", c.basis.time_bandwidth},
                {"omega0", c.basis.omega0},
                {"origin", c.window_center()}};
  j["n_terms"] = c.effective_n_terms();
  j["sinc_bandwidth"] = c.sinc_bandwidth;
  j["lambda"] = a.lambda;
  j["basis_warnings"] = run.basis_warnings;
  nlohmann::json ests = nlohmann::json::array();
  bool failed = false;
  for (const auto& r : run.results) {
    nlohmann::json e{{"name", to_string(r.estimator)}, {"status", r.ok ? "ok" : "failed"}};
    if (r.ok) {
      e["coefficients"] = std::vector<double>(r.coefficients.data(), r.coefficients.data() + r.coefficients.size());
      Eigen::VectorXd res(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) res(i) = samples.values[i] - r.on_samples[i];
      e["sample_rmse"] = std::sqrt(res.squaredNorm() / static_cast<double>(samples.size()));
    } else {
      e["failure"] = r.failure;
      failed = true;
    }
    e["warnings"] = r.warnings;
    if (r.mcc) e["mcc"] = r.mcc->to_json();
    ests.push_back(std::move(e));
  }
  j["estimators"] = std::move(ests);
  write_file(dir / "report.json", dump_json(j));

  std::ostringstream csv;
  csv << "t,y";
  for (const auto& r : run.results) csv << ',' << to_string(r.estimator);
  csv << '\n';
  std::size_t g = 0, s = 0;
  while (g < grid.size() || s < samples.size()) {
    const bool take_sample = g == grid.size() || (s < samples.size() && samples.times[s] <= grid[g]);
    const bool take_grid = s == samples.size() || (g < grid.size() && grid[g] <= samples.times[s]);
    const double t = take_grid ? grid[g] : samples.times[s];
    csv << format_double(t) << ',';
    if (take_sample) csv << format_double(samples.values[s]);
    for (const auto& r : run.results) {
      csv << ',';
      if (r.ok) csv << format_double(take_grid ? r.on_grid[g] : r.on_samples[s]);
    }
    csv << '\n';
    if (take_grid) ++g;
    if (take_sample) ++s;
  }
  write_file(dir / "reconstruction.csv", csv.str());

  out << "estimator  sample_rmse  iterations\n";
  for (std::size_t k = 0; k < run.results.size(); ++k) {
    const auto& r = run.results[k];
    char name[16];
    std::snprintf(name, sizeof name, "%-9s", to_string(r.estimator));
    out << name;
    if (r.ok)
      out << fmt("%13.6g", j["estimators"][k]["sample_rmse"].get<double>())
          << fmt("%12.0f", static_cast<double>(r.iterations)) << "\n";
    else
      out << "  FAILED: " << r.failure << "\n";
  }
  if (failed) {
    err << "error: one or more estimators failed; see report.json\n";
    return 1;
  }
  return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bandlimited signal reconstruction with discrete prolate spheroidal bases"};
  app.name("pswfrec");
  app.require_subcommand(1);

  BasisArgs basis_args;
  auto* basis = app.add_subcommand("basis", "Compute a discrete PSWF basis and write it as JSON");
  basis->add_option("--half-length", basis_args.half_length, "M; the basis has 2M+1 functions");
  basis->add_option("--time-bandwidth", basis_args.time_bandwidth, "c = omega0 * tau, in (0, pi)");
  basis->add_option("--omega0", basis_args.omega0, "Fundamental frequency (rad per unit time)");
  basis->add_option("--output,-o", basis_args.output, "Output JSON path");

  RunArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Run the synthetic reconstruction experiment");
  add_run_options(experiment, exp_args);
  experiment->add_flag("--timings", exp_args.timings, "Include runtimes in report.json");

  RunArgs sweep_args;
  std::string axis;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "Aggregate errors over a parameter axis");
  add_run_options(sweep, sweep_args);
  sweep->add_option("--axis", axis, "burst_std, lambda or n_terms")->required();
  sweep->add_option("--values", values, "Comma-separated axis values")->delimiter(',')->required();

  ReconstructArgs rec_args;
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct a signal from a CSV of samples (t,y)");
  rec->add_option("--input,-i", rec_args.input, "Sample CSV with columns t,y")->required();
  rec->add_option("--estimators", rec_args.estimators, "Comma-separated estimator list")->delimiter(',');
  rec->add_option("--bandwidth", rec_args.bandwidth, "Signal bandwidth (rad per unit time)");
  rec->add_option("--period-factor", rec_args.period_factor, "Basis period as a multiple of the window length");
  rec->add_option("--half-length", rec_args.half_length, "Override M");
  rec->add_option("--time-bandwidth", rec_args.time_bandwidth, "Override c");
  rec->add_option("--omega0", rec_args.omega0, "Override omega0");
  rec->add_option("--n-terms", rec_args.n_terms, "Number of PSWF terms");
  rec->add_option("--lambda", rec_args.lambda, "Ridge and MCC regularization weight");
  rec->add_option("--kernel-sigma", rec_args.kernel_sigma, "Fixed MCC kernel width (adaptive when omitted)");
  rec->add_option("--grid-size", rec_args.grid_size, "Evaluation grid size");
  rec->add_option("--output-dir,-o", rec_args.output_dir, "Directory for output files");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*basis) return cmd_basis(basis_args, out);
    if (*experiment) return cmd_experiment(exp_args, out, err);
    if (*sweep) return cmd_sweep(sweep_args, axis, values, out, err);
    if (*rec) return cmd_reconstruct(rec_args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

} // namespace pswfrec
