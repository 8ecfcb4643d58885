#pragma once

// Configuration-driven experiments: each one assembles flows, diffusions,
// costs and solvers, writes <experiment>.csv and <experiment>.verdict.txt and
// maps the outcome to an exit code.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ricciot/costs.hpp"
#include "ricciot/diffusion.hpp"
#include "ricciot/geometry.hpp"
#include "ricciot/lflow.hpp"

namespace ricciot {

enum class Experiment {
  WassersteinMonotonicity,
  GeneralCostMonotonicity,
  LemmaSweep,
  DualityPreservation,
  ThetaMonotonicity,
  AdmissibilityReport,
};

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

/// exit codes of run()
inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfigError = 2;

struct FlowConfig {
  std::string name;
  Model model = Model::Sphere2;
  FlowLaw law = FlowLaw::ExactBackwardRicci;
  double c0 = 1.0;
  double K = 0.0;
  Interval domain{0.0, 1.0};
  std::vector<double> tau_samples;  // user_scale only
  std::vector<double> scale_samples;
  bool declared_super_ricci = true;

  ScaleFlow build() const;
};

struct CostConfig {
  /// power | analytic | table
  std::string kind = "power";
  std::string name;  // analytic: sqrt | linear | square | square_decay | negative_linear
  double p = 2.0;
  double K = 0.0;
  std::string table_path;

  CostFunction build() const;
  std::string id() const;
};

/// count evenly spaced values in [lo, hi]; explicit values win when given.
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int count = 2;
  std::vector<double> explicit_values;

  std::vector<double> values() const;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::WassersteinMonotonicity;
  std::uint64_t seed = 1;
  bool expect_violation = false;

  FlowConfig flow;
  std::vector<FlowConfig> flows;  // lemma_sweep; falls back to {flow}
  std::vector<MixtureComponent> mu;
  std::vector<MixtureComponent> nu;
  CostConfig cost;
  std::vector<CostConfig> costs;  // lemma_sweep; falls back to {cost}
  std::vector<double> p_values{2.0};

  int N = 200;
  int n_lat = 0;  // sphere product cloud override (with n_lon)
  int n_lon = 0;
  int band_limit = 0;  // 0: model default
  GridSpec tau_grid;
  GridSpec s_grid{0.0, 0.7, 8, {}};
  LClock clock;

  /// NaN: derive from resolution_study.
  double tol_mono = std::numeric_limits<double>::quiet_NaN();
  double tol_floor = 1e-4;
  bool observed_order = false;

  int pairs = 200;
  double lemma_tolerance = 1e-6;
  double cut_guard = 0.05;

  double duality_b = 1.0;
  int checkpoints = 6;
  double competitive_tolerance = 1e-4;
  double j_tolerance = 1e-8;

  GridSpec s_check{0.05, 3.0, 60, {}};
  GridSpec tau_check{0.0, 1.0, 11, {}};

  PointCloud cloud(int n_points) const;
  int effective_band_limit() const;
};

/// Parses YAML text; throws ConfigError.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

/// Tracked monotone quantity on the configured grid at resolution N. For
/// wasserstein_monotonicity one series per entry of p_values, in order.
std::vector<std::vector<double>> tracked_series(const ExperimentConfig& config, int n_points);

struct ConvergenceTable {
  std::vector<int> resolutions;                          // coarse to fine
  std::vector<std::vector<std::vector<double>>> series;  // [resolution][series][grid]
  /// Richardson estimate of the error of the per-step increments at the finest
  /// resolution (refinement ratio sqrt(2) in mesh width, first order).
  std::vector<double> increment_error;
  /// From three resolutions when requested, else NaN.
  std::vector<double> observed_order;
  std::vector<double> tol_mono;
  std::string provenance;
};

/// Reruns the tracked quantity at N/2 and N (and N/4 when observed_order is
/// set) and derives tol_mono = max(3 x increment error, tol_floor).
ConvergenceTable resolution_study(const ExperimentConfig& config);

struct MonotonicityReport {
  std::vector<double> grid;
  std::vector<double> values;
  double max_increase = 0.0;
  double tol_mono = 0.0;
  bool pass = true;
};

MonotonicityReport monotonicity(const std::vector<double>& grid, const std::vector<double>& values,
                                double tol_mono);

struct RunResult {
  int exit_code = kExitPass;
  std::string verdict;  // PASS | FAIL | EXPECTED_VIOLATION | ERROR
  std::string csv_path;
  std::string verdict_path;
  std::string summary;
};

/// Runs the configured experiment and writes its files into out_dir.
/// Configuration and resolution problems yield kExitConfigError.
RunResult run(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace ricciot
