// Acceptance suite. `acceptance` runs every criterion; `acceptance --criterion N`
// runs one. Each criterion prints a single PASS/FAIL line.
#include "pswfrec/experiments.hpp"
#include "pswfrec/pswf_core.hpp"
#include "pswfrec/solvers.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

using namespace pswfrec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

RowMatrix random_matrix(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  RowMatrix a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = z(rng);
  return a;
}

VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  VectorXd v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

Outcome basis_correctness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::pair<int, double> cases[] = {{5, 0.5}, {10, 1.0}, {25, 2.0}, {50, 3.0}};
  for (const auto& [m, c] : cases) {
    const BandlimitParams p{m, c, M_PI};
    const auto b = compute_basis(p);
    const Eigen::MatrixXd& phi = b.eigenvectors;
    const std::string tag = "(" + std::to_string(m) + "," + num(c) + ") ";
    const auto n = static_cast<Eigen::Index>(b.size());
    const double orth = (phi.transpose() * phi - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd lam = b.eigenvalues.asDiagonal();
    const double diag =
        (phi.transpose() * build_sinc_kernel(p) * phi - lam).cwiseAbs().maxCoeff();
    o.check(orth < 1e-10, tag + "orthonormality " + num(orth));
    o.check(diag < 1e-9, tag + "diagonalization " + num(diag));
    bool open = true, strict = true;
    for (Eigen::Index k = 0; k < n; ++k) {
      open = open && b.eigenvalues(k) > 0.0 && b.eigenvalues(k) < 1.0;
      if (k > 0) strict = strict && b.eigenvalues(k) < b.eigenvalues(k - 1);
    }
    o.check(open, tag + "eigenvalue outside (0,1), 1 - lambda_0 = " + num(1.0 - b.eigenvalues(0)));
    o.check(strict, tag + "eigenvalues not strictly descending");
    const double trace = b.eigenvalues.sum() - (2.0 * m + 1.0) * c / M_PI;
    o.check(std::abs(trace) < 1e-9, tag + "trace off by " + num(trace));
  }
  const double s = seconds_since(t0);
  o.check(s < 5.0, "runtime " + num(s) + " s");
  if (o.pass) o.detail = "4 bases in " + num(s) + " s";
  return o;
}

Outcome small_matrix() {
  Outcome o;
  const auto b = compute_basis({1, M_PI / 2, M_PI});
  const double expected[] = {0.5 + std::sqrt(2.0) / M_PI, 0.5, 0.5 - std::sqrt(2.0) / M_PI};
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(b.eigenvalues(k) - expected[k]));
  o.check(b.size() == 3 && worst < 1e-12, "max deviation " + num(worst));
  if (o.pass) o.detail = "max deviation " + num(worst);
  return o;
}

Outcome solver_reductions() {
  Outcome o;
  std::mt19937_64 rng(3);
  double worst_ridge = 0.0, worst_step = 0.0;
  for (int k = 0; k < 10; ++k) {
    const RowMatrix d = random_matrix(40, 6, rng);
    const VectorXd y = random_vector(40, rng);
    const VectorXd ls = solve_least_squares(d, y).coefficients;
    const VectorXd r0 = solve_ridge(d, y, {0.0}).coefficients;
    worst_ridge = std::max(worst_ridge, (ls - r0).cwiseAbs().maxCoeff());

    const double lambda = 0.05 * (k + 1), w0 = 0.3 + 0.4 * k;
    const VectorXd step = weighted_ridge_step(d, y, VectorXd::Constant(40, w0), lambda);
    const VectorXd ridge = solve_ridge(d, y, {lambda / w0}).coefficients;
    worst_step = std::max(worst_step, (step - ridge).cwiseAbs().maxCoeff());
  }
  o.check(worst_ridge < 1e-10, "ridge(0) vs LS " + num(worst_ridge));
  o.check(worst_step < 1e-10, "uniform weighted step vs ridge " + num(worst_step));

  RowMatrix d(2, 1);
  d << 1.0, 1.0;
  VectorXd y(2);
  y << 1.0, 3.0;
  const double ls = solve_least_squares(d, y).coefficients(0);
  const double ridge = solve_ridge(d, y, {2.0}).coefficients(0);
  o.check(std::abs(ls - 2.0) < 1e-12, "scalar LS gave " + num(ls));
  o.check(std::abs(ridge - 1.0) < 1e-12, "scalar ridge gave " + num(ridge));
  if (o.pass) o.detail = "max deviations " + num(worst_ridge) + ", " + num(worst_step);
  return o;
}

Outcome mcc_machinery() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4);

  double worst_grad = 0.0;
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const RowMatrix d = random_matrix(15, 4, rng);
    const VectorXd y = random_vector(15, rng);
    const VectorXd c = random_vector(4, rng, 0.5);
    const double lambda = 0.1 * (k % 4), sigma = 0.5 + 0.1 * k;
    const VectorXd g = mcc_objective_gradient(c, d, y, lambda, sigma);
    VectorXd fd(4);
    for (int i = 0; i < 4; ++i) {
      VectorXd p = c, m = c;
      p(i) += h;
      m(i) -= h;
      fd(i) = (mcc_objective(p, d, y, lambda, sigma) - mcc_objective(m, d, y, lambda, sigma)) / (2 * h);
    }
    worst_grad = std::max(worst_grad, (g - fd).norm() / g.norm());
  }
  o.check(worst_grad < 1e-5, "gradient relative error " + num(worst_grad));

  double worst_rise = 0.0;
  for (int k = 0; k < 20; ++k) {
    const RowMatrix d = random_matrix(30, 5, rng);
    VectorXd y = d * random_vector(5, rng) + random_vector(30, rng, 0.1);
    y(k) += 20.0;
    MccConfig cfg;
    cfg.lambda = 0.01 * (k % 3);
    cfg.kernel_policy = FixedSigma{0.3 + 0.05 * k};
    cfg.max_iterations = 60;
    const auto rep = solve_mcc(d, y, cfg);
    for (std::size_t t = 1; t < rep.objective_trace.size(); ++t)
      worst_rise = std::max(worst_rise, rep.objective_trace[t] - rep.objective_trace[t - 1]);
  }
  o.check(worst_rise <= 1e-12, "objective trace rose by " + num(worst_rise));

  RowMatrix d(3, 1);
  d << 1.0, 1.0, 1.0;
  VectorXd y(3);
  y << 1.0, 1.0, 100.0;
  MccConfig cfg;
  cfg.lambda = 1e-6;
  cfg.kernel_policy = AdaptiveSigma{0.1};
  const auto rep = solve_mcc(d, y, cfg);
  const double c = rep.coefficients(0);
  const double sigma = adaptive_sigma(y - d * rep.coefficients, 0.1);
  double best_c = 0.0, best = INFINITY;
  for (int i = 0; i <= 1000000; ++i) {
    const VectorXd x = VectorXd::Constant(1, 1e-4 * i);
    const double j = mcc_objective(x, d, y, cfg.lambda, sigma);
    if (j < best) {
      best = j;
      best_c = x(0);
    }
  }
  o.check(std::abs(c - best_c) < 0.05, "contaminated scalar c=" + num(c) + " vs grid minimizer " + num(best_c));

  const double s = seconds_since(t0);
  o.check(s < 10.0, "runtime " + num(s) + " s");
  if (o.pass)
    o.detail = "gradient " + num(worst_grad) + ", contaminated c=" + num(c) + " vs " + num(best_c) + ", " +
               num(s) + " s";
  return o;
}

Outcome noiseless() {
  Outcome o;
  auto c = preset_config("paper-uniform");
  c.noise.base_std = 0.0;
  c.noise.burst_std = 0.0;
  c.ridge.lambda = 1e-6;
  c.mcc.lambda = 1e-6;
  c.estimators = {Estimator::PSWF, Estimator::RPSWF, Estimator::EPSWF};
  const auto rep = run_experiment(c);
  std::string errors;
  for (const auto& r : rep.results) {
    o.check(r.ok && r.error < 1e-4, std::string(to_string(r.estimator)) + " error " +
                                        (r.ok ? num(r.error) : "failed: " + r.failure));
    errors += std::string(errors.empty() ? "" : ", ") + to_string(r.estimator) + " " + num(r.error);
  }
  if (o.pass) o.detail = errors;
  return o;
}

struct Medians {
  std::vector<AggregateRow> rows;
  std::vector<ExperimentReport> runs;
  double of(Estimator e) const {
    for (const auto& r : rows)
      if (r.estimator == e) return r.median;
    return NAN;
  }
};

Medians run25(const ExperimentConfig& c) {
  Medians m;
  m.runs = run_seeds(c, c.seed, 25, jobs());
  m.rows = aggregate_errors(m.runs, Aggregate::Median);
  return m;
}

void check_failures(Outcome& o, const Medians& m) {
  for (const auto& r : m.rows)
    o.check(r.failures == 0, std::string(to_string(r.estimator)) + " failed on " + std::to_string(r.failures) + " seeds");
}

Outcome uniform_ordering() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = run25(preset_config("paper-uniform"));
  check_failures(o, m);
  const double sinc = m.of(Estimator::Sinc), pswf = m.of(Estimator::PSWF), r = m.of(Estimator::RPSWF),
               e = m.of(Estimator::EPSWF);
  int wins = 0;
  for (const auto& run : m.runs) {
    const auto& re = run.result(Estimator::EPSWF);
    const auto& rr = run.result(Estimator::RPSWF);
    if (re.ok && rr.ok && re.error < rr.error) ++wins;
  }
  const std::string medians =
      "medians Sinc " + num(sinc) + ", PSWF " + num(pswf) + ", RPSWF " + num(r) + ", EPSWF " + num(e);
  o.check(e < r && r <= pswf && pswf < sinc, "ordering violated: " + medians);
  o.check(wins >= 20, "EPSWF < RPSWF on " + std::to_string(wins) + "/25 seeds");
  const double s = seconds_since(t0);
  o.check(s < 60.0, "runtime " + num(s) + " s");
  if (o.pass) o.detail = medians + "; EPSWF < RPSWF on " + std::to_string(wins) + "/25 seeds; " + num(s) + " s";
  return o;
}

Outcome nonuniform_ordering() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = run25(preset_config("paper-nonuniform"));
  check_failures(o, m);
  const double rs = m.of(Estimator::RSinc), es = m.of(Estimator::ESinc), rp = m.of(Estimator::RPSWF),
               ep = m.of(Estimator::EPSWF);
  const std::string medians =
      "medians RSinc " + num(rs) + ", ESinc " + num(es) + ", RPSWF " + num(rp) + ", EPSWF " + num(ep);
  o.check(ep < rp, "EPSWF !< RPSWF: " + medians);
  o.check(es < rs, "ESinc !< RSinc: " + medians);
  o.check(rp < rs && ep < es, "PSWF variants do not beat sinc: " + medians);
  const double s = seconds_since(t0);
  o.check(s < 60.0, "runtime " + num(s) + " s");
  if (o.pass) o.detail = medians + "; " + num(s) + " s";
  return o;
}

Outcome robustness_ratio() {
  Outcome o;
  auto c = preset_config("paper-uniform");
  c.estimators = {Estimator::RPSWF, Estimator::EPSWF};
  const auto clean = run25(with_axis_value(c, SweepAxis::BurstStd, 0.0));
  const auto dirty = run25(with_axis_value(c, SweepAxis::BurstStd, 20.0));
  check_failures(o, clean);
  check_failures(o, dirty);
  const double ge = dirty.of(Estimator::EPSWF) / clean.of(Estimator::EPSWF);
  const double gr = dirty.of(Estimator::RPSWF) / clean.of(Estimator::RPSWF);
  const std::string growth = "growth EPSWF x" + num(ge) + ", RPSWF x" + num(gr);
  o.check(ge < gr, growth);
  if (o.pass) o.detail = growth;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / ("pswfrec_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + PSWFREC_CLI_PATH +
                            "\" experiment --preset paper-uniform --seed 7 -o \"" + (base / run).string() +
                            "\" > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    o.check(WIFEXITED(status) && WEXITSTATUS(status) == 0, std::string("run ") + run + " exited abnormally");
  }
  for (const char* f : {"report.json", "reconstruction.csv"}) {
    const auto a = slurp(base / "a" / f), b = slurp(base / "b" / f);
    o.check(!a.empty() && a == b, std::string(f) + " differs between runs");
  }
  fs::remove_all(base);
  if (o.pass) o.detail = "report.json and reconstruction.csv byte-identical";
  return o;
}

const std::function<Outcome()> kCriteria[] = {basis_correctness, small_matrix,        solver_reductions,
                                              mcc_machinery,     noiseless,           uniform_ordering,
                                              nonuniform_ordering, robustness_ratio, determinism};

bool run_one(int n) {
  Outcome o;
  try {
    o = kCriteria[n - 1]();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
  return o.pass;
}

} // namespace

int main(int argc, char** argv) {
  const int count = static_cast<int>(std::size(kCriteria));
  if (argc == 3 && std::string(argv[1]) == "--criterion") {
    const int n = std::atoi(argv[2]);
    if (n < 1 || n > count) {
      std::cerr << "criterion must be 1.." << count << "\n";
      return 2;
    }
    return run_one(n) ? 0 : 1;
  }
  if (argc != 1) {
    std::cerr << "usage: acceptance [--criterion N]\n";
    return 2;
  }
  bool all = true;
  for (int n = 1; n <= count; ++n) all = run_one(n) && all;
  return all ? 0 : 1;
}
