#include "ricciot/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ricciot/coupling.hpp"
#include "ricciot/errors.hpp"
#include "ricciot/numerics.hpp"
#include "ricciot/transport.hpp"

namespace ricciot {

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names = {
      {Experiment::WassersteinMonotonicity, "wasserstein_monotonicity"},
      {Experiment::GeneralCostMonotonicity, "general_cost_monotonicity"},
      {Experiment::LemmaSweep, "lemma_sweep"},
      {Experiment::DualityPreservation, "duality_preservation"},
      {Experiment::ThetaMonotonicity, "theta_monotonicity"},
      {Experiment::AdmissibilityReport, "admissibility_report"},
  };
  return names;
}

// ---------------------------------------------------------------- YAML

template <class T>
T get(const YAML::Node& node, const char* key, T fallback) {
  if (!node || !node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

GridSpec parse_grid(const YAML::Node& node, GridSpec fallback) {
  if (!node) return fallback;
  GridSpec g = fallback;
  if (node.IsSequence()) {
    g.explicit_values = node.as<std::vector<double>>();
    return g;
  }
  g.lo = get(node, "lo", g.lo);
  g.hi = get(node, "hi", g.hi);
  g.count = get(node, "count", g.count);
  if (node["values"]) g.explicit_values = node["values"].as<std::vector<double>>();
  return g;
}

FlowConfig parse_flow(const YAML::Node& node) {
  FlowConfig f;
  if (!node) return f;
  f.name = get<std::string>(node, "name", "");
  f.model = model_from_string(get<std::string>(node, "model", "sphere"));
  const std::string law = get<std::string>(node, "law", "backward_ricci");
  f.c0 = get(node, "c0", f.c0);
  f.K = get(node, "K", f.K);
  f.declared_super_ricci = get(node, "declared_super_ricci", true);
  if (node["tau_domain"]) {
    const auto d = node["tau_domain"].as<std::vector<double>>();
    if (d.size() != 2) throw ConfigError("flow.tau_domain needs two values");
    f.domain = {d[0], d[1]};
  }
  if (law == "backward_ricci" || law == "exact_backward_ricci") {
    f.law = FlowLaw::ExactBackwardRicci;
  } else if (law == "user_scale") {
    f.law = FlowLaw::UserScale;
    if (node["samples"]) {
      f.tau_samples = get<std::vector<double>>(node["samples"], "tau", {});
      f.scale_samples = get<std::vector<double>>(node["samples"], "scale", {});
    } else if (node["linear_scale"]) {
      // c(tau) = c0 + rate * tau sampled on the domain
      const double rate = node["linear_scale"].as<double>();
      for (int k = 0; k <= 8; ++k) {
        const double t = f.domain.lo + (f.domain.hi - f.domain.lo) * k / 8.0;
        f.tau_samples.push_back(t);
        f.scale_samples.push_back(f.c0 + rate * (t - f.domain.lo));
      }
    } else {
      throw ConfigError("user_scale flow needs samples {tau, scale} or linear_scale");
    }
  } else {
    throw ConfigError("unknown flow law '" + law + "'");
  }
  if (f.name.empty()) f.name = to_string(f.model) + "_" + law;
  return f;
}

CostConfig parse_cost(const YAML::Node& node) {
  CostConfig c;
  if (!node) return c;
  c.kind = get<std::string>(node, "kind", c.kind);
  c.name = get<std::string>(node, "name", "");
  c.p = get(node, "p", c.p);
  c.K = get(node, "K", c.K);
  c.table_path = get<std::string>(node, "table", "");
  if (c.kind != "power" && c.kind != "analytic" && c.kind != "table") {
    throw ConfigError("unknown cost kind '" + c.kind + "'");
  }
  return c;
}

std::vector<MixtureComponent> parse_mixture(const YAML::Node& node) {
  std::vector<MixtureComponent> out;
  if (!node) return out;
  if (!node.IsSequence()) throw ConfigError("density must be a list of mixture components");
  for (const auto& item : node) {
    MixtureComponent m;
    const YAML::Node center = item["center"];
    if (!center) throw ConfigError("mixture component without center");
    if (center.IsSequence()) {
      const auto v = center.as<std::vector<double>>();
      if (v.empty() || v.size() > 2) throw ConfigError("mixture center needs one or two values");
      m.center_p = v[0];
      m.center_q = v.size() > 1 ? v[1] : 0.0;
    } else {
      m.center_p = center.as<double>();
    }
    m.concentration = get(item, "concentration", 1.0);
    m.weight = get(item, "weight", 1.0);
    out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------- output

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw ConfigError("cannot write '" + path + "'");
    out_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ofstream out_;
};

// ---------------------------------------------------------------- helpers

std::vector<double> tracked_grid(const ExperimentConfig& cfg) {
  return cfg.experiment == Experiment::ThetaMonotonicity ? cfg.s_grid.values()
                                                         : cfg.tau_grid.values();
}

std::vector<SpectralDensity> initial_densities(const ExperimentConfig& cfg, const ScaleFlow& flow,
                                               double tau0) {
  if (cfg.mu.empty() || cfg.nu.empty()) throw ConfigError("densities.mu and densities.nu are required");
  const int L = cfg.effective_band_limit();
  return {density_from_mixture(flow, tau0, cfg.mu, L), density_from_mixture(flow, tau0, cfg.nu, L)};
}

std::vector<std::vector<double>> monotone_series(const ExperimentConfig& cfg, int n_points) {
  const ScaleFlow flow = cfg.flow.build();
  const PointCloud cloud = cfg.cloud(n_points);
  if (cloud.size() > kMaxExactSize) {
    throw ConfigError("cloud size exceeds the exact-solver limit of 400 points");
  }
  const std::vector<double> grid = tracked_grid(cfg);

  if (cfg.experiment == Experiment::ThetaMonotonicity) {
    LClock clock = cfg.clock;
    clock.s_lo = grid.front();
    clock.s_hi = grid.back();
    const double tau0 = cfg.tau_grid.values().front();
    const auto u = initial_densities(cfg, flow, tau0);
    std::vector<double> values(grid.size());
    numerics::parallel_for(grid.size(), [&](std::size_t k) {
      values[k] = theta(flow, clock, u[0], u[1], grid[k], cloud).theta;
    });
    return {values};
  }

  const auto u = initial_densities(cfg, flow, grid.front());
  const std::size_t series_count =
      cfg.experiment == Experiment::WassersteinMonotonicity ? cfg.p_values.size() : 1;
  std::vector<std::vector<double>> out(series_count, std::vector<double>(grid.size()));
  const CostFunction cost = cfg.cost.build();
  numerics::parallel_for(grid.size(), [&](std::size_t k) {
    const double tau = grid[k];
    const auto mu = density_values(evolve_conjugate(flow, u[0], grid.front(), tau), cloud, flow, tau);
    const auto nu = density_values(evolve_conjugate(flow, u[1], grid.front(), tau), cloud, flow, tau);
    if (cfg.experiment == Experiment::WassersteinMonotonicity) {
      for (std::size_t s = 0; s < series_count; ++s) {
        out[s][k] = std::exp(flow.K() * tau) * wasserstein_p(flow, tau, cloud, mu, nu, cfg.p_values[s]);
      }
    } else {
      out[0][k] = transport_cost(flow, tau, cost, cloud, mu, nu);
    }
  });
  return out;
}

std::string verdict_word(bool violation, bool expected) {
  if (!violation) return "PASS";
  return expected ? "EXPECTED_VIOLATION" : "FAIL";
}

struct Outcome {
  bool violation = false;
  std::vector<std::string> lines;
};

void write_verdict(const std::string& path, const ExperimentConfig& cfg, const std::string& verdict,
                   const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "experiment: " << to_string(cfg.experiment) << '\n';
  out << "verdict: " << verdict << '\n';
  out << "seed: " << cfg.seed << '\n';
  out << "expect_violation: " << (cfg.expect_violation ? "true" : "false") << '\n';
  for (const auto& l : lines) out << l << '\n';
}

// ---------------------------------------------------------------- experiments

Outcome run_monotonicity(const ExperimentConfig& cfg, const std::string& csv_path) {
  const std::vector<double> grid = tracked_grid(cfg);
  if (grid.size() < 2) throw ConfigError("monotonicity grid needs at least two points");
  std::vector<std::vector<double>> values;
  std::vector<double> tols;
  std::string provenance;
  ConvergenceTable table;
  if (std::isfinite(cfg.tol_mono)) {
    values = monotone_series(cfg, cfg.N);
    tols.assign(values.size(), cfg.tol_mono);
    provenance = "config override";
  } else {
    table = resolution_study(cfg);
    values = table.series.back();
    tols = table.tol_mono;
    provenance = table.provenance;
  }

  const bool theta_exp = cfg.experiment == Experiment::ThetaMonotonicity;
  Outcome outcome;
  std::vector<MonotonicityReport> reports;
  for (std::size_t s = 0; s < values.size(); ++s) reports.push_back(monotonicity(grid, values[s], tols[s]));

  if (theta_exp) {
    const ScaleFlow flow = cfg.flow.build();
    CsvWriter csv(csv_path, "s,tau1,tau2,V,theta,delta_sqrt_tau,solver_gap");
    // recompute the per-point details at full resolution
    const PointCloud cloud = cfg.cloud(cfg.N);
    LClock clock = cfg.clock;
    clock.s_lo = grid.front();
    clock.s_hi = grid.back();
    const auto u = initial_densities(cfg, flow, cfg.tau_grid.values().front());
    std::vector<ThetaSample> samples(grid.size());
    numerics::parallel_for(grid.size(), [&](std::size_t k) {
      samples[k] = theta(flow, clock, u[0], u[1], grid[k], cloud);
    });
    for (const auto& t : samples) {
      csv.row(t.s, t.tau1, t.tau2, t.V, t.theta, t.delta_sqrt_tau, t.solver_gap);
    }
  } else if (cfg.experiment == Experiment::WassersteinMonotonicity) {
    CsvWriter csv(csv_path, "tau,p,value,increment");
    for (std::size_t s = 0; s < values.size(); ++s) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        csv.row(grid[k], cfg.p_values[s], values[s][k], k == 0 ? 0.0 : values[s][k] - values[s][k - 1]);
      }
    }
  } else {
    CsvWriter csv(csv_path, "tau,value,increment");
    for (std::size_t k = 0; k < grid.size(); ++k) {
      csv.row(grid[k], values[0][k], k == 0 ? 0.0 : values[0][k] - values[0][k - 1]);
    }
  }

  for (std::size_t s = 0; s < reports.size(); ++s) {
    const auto& r = reports[s];
    std::ostringstream line;
    line << "series " << s;
    if (cfg.experiment == Experiment::WassersteinMonotonicity) line << " (p = " << cfg.p_values[s] << ")";
    line << ": max_forward_increase = " << fmt(r.max_increase) << ", tol_mono = " << fmt(r.tol_mono)
         << " (" << provenance << "), " << (r.pass ? "nonincreasing" : "INCREASE");
    outcome.lines.push_back(line.str());
    outcome.violation = outcome.violation || !r.pass;
  }
  if (!table.resolutions.empty()) {
    outcome.lines.push_back("convergence table:");
    for (std::size_t r = 0; r < table.resolutions.size(); ++r) {
      std::ostringstream line;
      line << "  N = " << table.resolutions[r] << ": final values";
      for (const auto& series : table.series[r]) line << ' ' << fmt(series.back());
      outcome.lines.push_back(line.str());
    }
    for (std::size_t s = 0; s < table.increment_error.size(); ++s) {
      std::ostringstream line;
      line << "  series " << s << ": increment error estimate = " << fmt(table.increment_error[s]);
      if (std::isfinite(table.observed_order[s])) line << ", observed order = " << fmt(table.observed_order[s]);
      outcome.lines.push_back(line.str());
    }
  }
  return outcome;
}

Outcome run_lemma_sweep(const ExperimentConfig& cfg, const std::string& csv_path) {
  std::vector<FlowConfig> flows = cfg.flows.empty() ? std::vector<FlowConfig>{cfg.flow} : cfg.flows;
  std::vector<CostConfig> costs = cfg.costs.empty() ? std::vector<CostConfig>{cfg.cost} : cfg.costs;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GeometryOptions geometry;
  geometry.cut_guard = cfg.cut_guard;

  struct Sample {
    std::size_t flow, cost;
    CoupledPair pair;
    double gap = 0.0, margin = 0.0;
  };
  std::vector<ScaleFlow> built_flows;
  for (const auto& f : flows) built_flows.push_back(f.build());
  std::vector<CostFunction> built_costs;
  std::vector<bool> admissible;
  for (const auto& c : costs) {
    built_costs.push_back(c.build());
    admissible.push_back(
        admissibility_check(built_costs.back(), c.K, cfg.s_check.values(), cfg.tau_check.values()).pass);
  }

  std::vector<Sample> samples;
  for (std::size_t fi = 0; fi < flows.size(); ++fi) {
    const ScaleFlow& flow = built_flows[fi];
    for (std::size_t ci = 0; ci < costs.size(); ++ci) {
      int made = 0;
      while (made < cfg.pairs) {
        const double tau = flow.domain().lo + (flow.domain().hi - flow.domain().lo) * unit(rng);
        SamplePoint x, y;
        if (flow.model() == Model::Sphere2) {
          x = {std::acos(1.0 - 2.0 * unit(rng)), 2.0 * kPi * unit(rng)};
          y = {std::acos(1.0 - 2.0 * unit(rng)), 2.0 * kPi * unit(rng)};
        } else {
          x = {unit(rng), unit(rng)};
          y = {unit(rng), unit(rng)};
        }
        if (standard_distance(flow.model(), x, y) < 0.05) continue;
        try {
          samples.push_back({fi, ci, make_pair(flow, tau, x, y, geometry)});
          ++made;
        } catch (const CutLocusError&) {
        }
      }
    }
  }
  numerics::parallel_for(samples.size(), [&](std::size_t k) {
    Sample& s = samples[k];
    const ScaleFlow& flow = built_flows[s.flow];
    s.gap = lemma_gap(flow, s.pair.tau, built_costs[s.cost], s.pair);
    s.margin = super_ricci_margin(flow, s.pair.tau);
  });

  Outcome outcome;
  CsvWriter csv(csv_path, "tau,d,gap,margin,model,cost_id,flow");
  double worst_covered = std::numeric_limits<double>::infinity();
  double worst_any = std::numeric_limits<double>::infinity();
  std::size_t covered = 0;
  for (const auto& s : samples) {
    csv.row(s.pair.tau, s.pair.d, s.gap, s.margin, to_string(built_flows[s.flow].model()),
            costs[s.cost].id(), flows[s.flow].name);
    worst_any = std::min(worst_any, s.gap);
    if (s.margin >= -1e-12 && admissible[s.cost]) {
      ++covered;
      worst_covered = std::min(worst_covered, s.gap);
    }
  }
  outcome.violation = covered > 0 && worst_covered < -cfg.lemma_tolerance;
  outcome.lines.push_back("samples: " + std::to_string(samples.size()) + " (" + std::to_string(covered) +
                          " satisfy the flow and cost hypotheses)");
  outcome.lines.push_back("min gap under hypotheses: " + fmt(worst_covered) + ", tolerance " +
                          fmt(cfg.lemma_tolerance) + " (config)");
  outcome.lines.push_back("min gap over all samples: " + fmt(worst_any));
  for (std::size_t ci = 0; ci < costs.size(); ++ci) {
    outcome.lines.push_back("cost " + costs[ci].id() + ": " + (admissible[ci] ? "admissible" : "NOT admissible"));
  }
  return outcome;
}

int rings_of(const PointCloud& cloud) {
  std::set<double> rings;
  for (const auto& p : cloud.points) rings.insert(p.p);
  return static_cast<int>(rings.size());
}

Outcome run_duality_preservation(const ExperimentConfig& cfg, const std::string& csv_path) {
  const ScaleFlow flow = cfg.flow.build();
  const CostFunction cost = cfg.cost.build();
  const PointCloud cloud = cfg.cloud(cfg.N);
  if (cloud.size() > kMaxExactSize) throw ConfigError("cloud size exceeds the exact-solver limit");
  const double tau0 = cfg.tau_grid.values().front();
  const double b = cfg.duality_b;
  if (!(b > tau0)) throw ConfigError("duality.b must exceed the initial time");
  const auto u = initial_densities(cfg, flow, tau0);
  const SpectralDensity mu_b = evolve_conjugate(flow, u[0], tau0, b);
  const SpectralDensity nu_b = evolve_conjugate(flow, u[1], tau0, b);
  const DiscreteMeasure m = density_values(mu_b, cloud, flow, b);
  const DiscreteMeasure n = density_values(nu_b, cloud, flow, b);
  const ExactSolution sol = solve_exact(cost_matrix(flow, b, cost, cloud), m, n);

  // Band limit the cloud quadrature resolves exactly.
  int band = cfg.effective_band_limit();
  if (flow.model() == Model::Sphere2) {
    band = std::min(band, rings_of(cloud) - 1);
  } else {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cloud.size()))));
    band = std::min(band, (side - 1) / 2);
  }
  ScalarField alpha = project_to_field(cloud, sol.potentials.phi, band, b);
  ScalarField beta = project_to_field(cloud, sol.potentials.psi, band, b);
  PreservationOptions options;
  options.tolerance = cfg.competitive_tolerance;
  const CheckpointSlack at_b = competitive_slack(flow, cost, b, alpha, beta, cloud, options.dense_colatitudes);
  // lower psi until the projected pair is competitive on the check grid
  if (at_b.min_slack < 0.0) beta.add_constant(at_b.min_slack * (1.0 + 1e-12) - 1e-14);

  std::vector<double> checkpoints;
  for (int k = 0; k < cfg.checkpoints; ++k) {
    checkpoints.push_back(tau0 + (b - tau0) * k / cfg.checkpoints);
  }
  const PreservationReport report =
      verify_competitive_preservation(flow, cost, b, checkpoints, alpha, beta, cloud, options);

  const double J_b = duality_functional(alpha, beta, evolve_conjugate(flow, u[0], tau0, b),
                                        evolve_conjugate(flow, u[1], tau0, b), flow, b);
  double drift = 0.0;
  CsvWriter csv(csv_path, "tau,min_slack,J,J_drift");
  for (const auto& c : report.checkpoints) {
    const ScalarField phi = evolve_dual(flow, alpha, b, c.tau);
    const ScalarField psi = evolve_dual(flow, beta, b, c.tau);
    const double J = duality_functional(phi, psi, evolve_conjugate(flow, u[0], tau0, c.tau),
                                        evolve_conjugate(flow, u[1], tau0, c.tau), flow, c.tau);
    drift = std::max(drift, std::abs(J - J_b));
    csv.row(c.tau, c.min_slack, J, J - J_b);
  }
  const CheckpointSlack final_slack = competitive_slack(flow, cost, b, alpha, beta, cloud, options.dense_colatitudes);
  csv.row(b, final_slack.min_slack, J_b, 0.0);

  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : report.checkpoints) worst = std::min(worst, c.min_slack);
  Outcome outcome;
  outcome.violation = !report.pass || drift > cfg.j_tolerance;
  outcome.lines.push_back("transport value at b: " + fmt(sol.value) + ", projected J at b: " + fmt(J_b));
  outcome.lines.push_back("projection band limit: " + std::to_string(band) +
                          ", psi shift: " + fmt(std::min(at_b.min_slack, 0.0)));
  outcome.lines.push_back("min slack over checkpoints: " + fmt(worst) + ", tolerance " +
                          fmt(cfg.competitive_tolerance) + " (config)");
  outcome.lines.push_back("J drift: " + fmt(drift) + ", tolerance " + fmt(cfg.j_tolerance) + " (config)");
  outcome.lines.push_back(std::string("final-time pair under-resolved: ") +
                          (report.under_resolved ? "yes" : "no"));
  return outcome;
}

Outcome run_admissibility(const ExperimentConfig& cfg, const std::string& csv_path) {
  const CostFunction cost = cfg.cost.build();
  const AdmissibilityReport report =
      admissibility_check(cost, cfg.cost.K, cfg.s_check.values(), cfg.tau_check.values());
  CsvWriter csv(csv_path, "condition,min_margin,at_s,at_tau,pass");
  Outcome outcome;
  for (const auto& c : report.conditions) {
    csv.row(c.condition, c.min_margin, c.at_s, c.at_tau, c.pass ? "true" : "false");
    outcome.lines.push_back(c.condition + ": min margin " + fmt(c.min_margin) + (c.pass ? "" : " FAIL"));
  }
  outcome.lines.push_back("tolerance: " + fmt(report.tolerance));
  outcome.violation = !report.pass;
  return outcome;
}

}  // namespace

// ---------------------------------------------------------------- public API

std::string to_string(Experiment e) {
  for (const auto& [k, name] : experiment_names()) {
    if (k == e) return name;
  }
  return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : experiment_names()) {
    if (n == name) return k;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

ScaleFlow FlowConfig::build() const {
  if (law == FlowLaw::ExactBackwardRicci) {
    return ScaleFlow::backward_ricci(model, c0, K, domain, declared_super_ricci);
  }
  return ScaleFlow::user_scale(model, tau_samples, scale_samples, K, declared_super_ricci);
}

CostFunction CostConfig::build() const {
  if (kind == "power") return power_cost(p, K);
  if (kind == "table") return CostFunction::tabulated(read_cost_table(table_path), id());
  if (name == "sqrt") return power_cost(0.5, 0.0);
  if (name == "linear") return power_cost(1.0, 0.0);
  if (name == "square") return power_cost(2.0, 0.0);
  if (name == "square_decay") {
    return CostFunction::analytic(
        name, [](double s, double t) { return s * s * std::exp(-t); },
        [](double s, double t) { return 2.0 * s * std::exp(-t); },
        [](double, double t) { return 2.0 * std::exp(-t); },
        [](double s, double t) { return -s * s * std::exp(-t); });
  }
  if (name == "negative_linear") {
    return CostFunction::analytic(
        name, [](double s, double) { return -s; }, [](double, double) { return -1.0; },
        [](double, double) { return 0.0; }, [](double, double) { return 0.0; });
  }
  throw ConfigError("unknown analytic cost '" + name + "'");
}

std::string CostConfig::id() const {
  if (kind == "power") return "power_p" + fmt(p) + "_K" + fmt(K);
  if (kind == "table") return "table:" + std::filesystem::path(table_path).filename().string();
  return name;
}

std::vector<double> GridSpec::values() const {
  if (!explicit_values.empty()) return explicit_values;
  if (count < 1) throw ConfigError("grid count must be positive");
  if (count == 1) return {lo};
  std::vector<double> v(count);
  for (int k = 0; k < count; ++k) v[k] = lo + (hi - lo) * k / (count - 1);
  v.back() = hi;
  return v;
}

PointCloud ExperimentConfig::cloud(int n_points) const {
  if (flow.model == Model::Sphere2 && n_lat > 0 && n_lon > 0) {
    // keep the aspect of the override when the study halves N
    const double ratio = std::sqrt(static_cast<double>(n_points) / (n_lat * n_lon));
    const int lat = std::max(2, static_cast<int>(std::lround(n_lat * ratio)));
    const int lon = std::max(1, n_points / lat);
    return sphere_cloud(lat, lon);
  }
  return make_cloud(flow.model, n_points);
}

int ExperimentConfig::effective_band_limit() const {
  if (band_limit > 0) return band_limit;
  return flow.model == Model::Sphere2 ? kDefaultSphereBand : kDefaultTorusBand;
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ConfigError("config must be a mapping");
  ExperimentConfig c;
  try {
    if (root["experiment"]) c.experiment = experiment_from_string(root["experiment"].as<std::string>());
    c.seed = get<std::uint64_t>(root, "seed", c.seed);
    c.expect_violation = get(root, "expect_violation", false);
    c.flow = parse_flow(root["flow"]);
    if (root["flows"]) {
      for (const auto& f : root["flows"]) c.flows.push_back(parse_flow(f));
    }
    if (root["densities"]) {
      c.mu = parse_mixture(root["densities"]["mu"]);
      c.nu = parse_mixture(root["densities"]["nu"]);
    }
    c.cost = parse_cost(root["cost"]);
    if (root["costs"]) {
      for (const auto& x : root["costs"]) c.costs.push_back(parse_cost(x));
    }
    if (root["p"]) {
      c.p_values = root["p"].IsSequence() ? root["p"].as<std::vector<double>>()
                                          : std::vector<double>{root["p"].as<double>()};
    }
    const YAML::Node res = root["resolution"];
    c.N = get(res, "N", c.N);
    c.n_lat = get(res, "n_lat", c.n_lat);
    c.n_lon = get(res, "n_lon", c.n_lon);
    c.band_limit = get(res, "band_limit", c.band_limit);
    c.observed_order = get(res, "observed_order", c.observed_order);
    if (res) {
      c.tau_grid = parse_grid(res["tau_grid"], c.tau_grid);
      c.s_grid = parse_grid(res["s_grid"], c.s_grid);
    }
    if (!res || !res["tau_grid"]) c.tau_grid = {c.flow.domain.lo, c.flow.domain.hi, 12, {}};
    const YAML::Node clock = root["clock"];
    c.clock.bar_tau1 = get(clock, "bar_tau1", c.clock.bar_tau1);
    c.clock.bar_tau2 = get(clock, "bar_tau2", c.clock.bar_tau2);
    const YAML::Node tol = root["tolerance"];
    if (tol && tol["mono"] && tol["mono"].as<std::string>() != "auto") c.tol_mono = tol["mono"].as<double>();
    c.tol_floor = get(tol, "floor", c.tol_floor);
    c.lemma_tolerance = get(tol, "lemma", c.lemma_tolerance);
    c.competitive_tolerance = get(tol, "competitive", c.competitive_tolerance);
    c.j_tolerance = get(tol, "J", c.j_tolerance);
    const YAML::Node lemma = root["lemma"];
    c.pairs = get(lemma, "pairs", c.pairs);
    c.cut_guard = get(root, "cut_guard", c.cut_guard);
    const YAML::Node dual = root["duality"];
    c.duality_b = get(dual, "b", c.tau_grid.values().back());
    c.checkpoints = get(dual, "checkpoints", c.checkpoints);
    const YAML::Node adm = root["admissibility"];
    if (adm) {
      c.s_check = parse_grid(adm["s_grid"], c.s_check);
      c.tau_check = parse_grid(adm["tau_grid"], c.tau_check);
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.N < 4) throw ConfigError("resolution.N must be at least 4");
  const auto grid = c.tau_grid.values();
  if (!std::is_sorted(grid.begin(), grid.end())) throw ConfigError("tau_grid must be increasing");
  const auto sgrid = c.s_grid.values();
  if (!std::is_sorted(sgrid.begin(), sgrid.end())) throw ConfigError("s_grid must be increasing");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::vector<std::vector<double>> tracked_series(const ExperimentConfig& config, int n_points) {
  switch (config.experiment) {
    case Experiment::WassersteinMonotonicity:
    case Experiment::GeneralCostMonotonicity:
    case Experiment::ThetaMonotonicity:
      return monotone_series(config, n_points);
    default:
      throw ConfigError("experiment '" + to_string(config.experiment) + "' has no tracked series");
  }
}

ConvergenceTable resolution_study(const ExperimentConfig& config) {
  ConvergenceTable t;
  if (config.observed_order) t.resolutions.push_back(config.N / 4);
  t.resolutions.push_back(config.N / 2);
  t.resolutions.push_back(config.N);
  for (int N : t.resolutions) t.series.push_back(tracked_series(config, N));

  const double r = std::sqrt(2.0);  // mesh-width ratio for halving N in 2-D
  const auto& fine = t.series.back();
  const auto& coarse = t.series[t.series.size() - 2];
  for (std::size_t s = 0; s < fine.size(); ++s) {
    double err = 0.0;
    for (std::size_t k = 1; k < fine[s].size(); ++k) {
      const double df = fine[s][k] - fine[s][k - 1];
      const double dc = coarse[s][k] - coarse[s][k - 1];
      err = std::max(err, std::abs(df - dc) / (r - 1.0));
    }
    t.increment_error.push_back(err);
    t.tol_mono.push_back(std::max(3.0 * err, config.tol_floor));
    double order = std::numeric_limits<double>::quiet_NaN();
    if (t.series.size() >= 3) {
      double e1 = 0.0, e2 = 0.0;
      for (std::size_t k = 0; k < fine[s].size(); ++k) {
        e1 = std::max(e1, std::abs(t.series[1][s][k] - t.series[0][s][k]));
        e2 = std::max(e2, std::abs(t.series[2][s][k] - t.series[1][s][k]));
      }
      if (e1 > 0.0 && e2 > 0.0) order = std::log(e1 / e2) / std::log(r);
    }
    t.observed_order.push_back(order);
  }
  std::ostringstream prov;
  prov << "resolution_study N/2 = " << config.N / 2 << " vs N = " << config.N
       << ", 3 x extrapolated increment error, floor " << fmt(config.tol_floor);
  t.provenance = prov.str();
  return t;
}

MonotonicityReport monotonicity(const std::vector<double>& grid, const std::vector<double>& values,
                                double tol_mono) {
  if (grid.size() != values.size()) throw InvalidArgument("monotonicity: grid and values differ in size");
  MonotonicityReport r;
  r.grid = grid;
  r.values = values;
  r.tol_mono = tol_mono;
  for (std::size_t k = 1; k < values.size(); ++k) {
    r.max_increase = std::max(r.max_increase, values[k] - values[k - 1]);
  }
  r.pass = r.max_increase <= tol_mono;
  return r;
}

RunResult run(const ExperimentConfig& config, const std::string& out_dir) {
  RunResult result;
  const std::string name = to_string(config.experiment);
  std::filesystem::create_directories(out_dir);
  result.csv_path = (std::filesystem::path(out_dir) / (name + ".csv")).string();
  result.verdict_path = (std::filesystem::path(out_dir) / (name + ".verdict.txt")).string();
  try {
    Outcome outcome;
    switch (config.experiment) {
      case Experiment::WassersteinMonotonicity:
      case Experiment::GeneralCostMonotonicity:
      case Experiment::ThetaMonotonicity:
        outcome = run_monotonicity(config, result.csv_path);
        break;
      case Experiment::LemmaSweep:
        outcome = run_lemma_sweep(config, result.csv_path);
        break;
      case Experiment::DualityPreservation:
        outcome = run_duality_preservation(config, result.csv_path);
        break;
      case Experiment::AdmissibilityReport:
        outcome = run_admissibility(config, result.csv_path);
        break;
    }
    result.verdict = verdict_word(outcome.violation, config.expect_violation);
    if (!outcome.violation && config.expect_violation) {
      outcome.lines.push_back("note: a violation was expected but none was observed");
    }
    result.exit_code = (outcome.violation && !config.expect_violation) ? kExitViolation : kExitPass;
    write_verdict(result.verdict_path, config, result.verdict, outcome.lines);
    std::ostringstream s;
    s << name << ": " << result.verdict;
    for (const auto& l : outcome.lines) s << "\n  " << l;
    result.summary = s.str();
  } catch (const ConfigError& e) {
    result.exit_code = kExitConfigError;
    result.verdict = "ERROR";
    result.summary = std::string("configuration error: ") + e.what();
  } catch (const ResolutionError& e) {
    result.exit_code = kExitConfigError;
    result.verdict = "ERROR";
    result.summary = std::string("resolution error: ") + e.what();
  } catch (const Error& e) {
    result.exit_code = kExitConfigError;
    result.verdict = "ERROR";
    result.summary = std::string("invalid setup: ") + e.what();
  }
  if (result.exit_code == kExitConfigError) {
    write_verdict(result.verdict_path, config, result.verdict, {result.summary});
  }
  return result;
}

}  // namespace ricciot
