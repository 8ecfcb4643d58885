#pragma once

// Discrete Monge-Kantorovich problem between measures on point clouds: an exact
// network-simplex solver returning an optimal plan and Kantorovich potentials,
// a log-domain Sinkhorn approximation, and the checks built on them.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ricciot/costs.hpp"
#include "ricciot/diffusion.hpp"
#include "ricciot/geometry.hpp"
#include "ricciot/measure.hpp"

namespace ricciot {

/// Dense cost table C(i, j) between source point i and target point j.
using CostMatrix = Eigen::MatrixXd;

/// Exact solves are limited to dense tables of this many rows or columns.
inline constexpr std::size_t kMaxExactSize = 400;

struct Coupling {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<Coupling> couplings;
  /// Row sums minus source weights, column sums minus target weights.
  std::vector<double> source_residual;
  std::vector<double> target_residual;

  double max_marginal_error() const;
  /// Sum of C(i, j) * mass.
  double cost(const CostMatrix& C) const;
};

struct DualPotentials {
  std::vector<double> phi;  // one per source point
  std::vector<double> psi;  // one per target point

  /// sum_i mu_i phi_i + sum_j nu_j psi_j
  double value(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
  /// max over pairs of phi_i + psi_j - C(i, j) (<= 0 for a competitive pair).
  double max_violation(const CostMatrix& C) const;
};

struct ExactSolution {
  TransportPlan plan;
  DualPotentials potentials;
  double value = 0.0;       // primal
  double dual_value = 0.0;  // J(phi, psi)
  std::size_t pivots = 0;
};

/// Network simplex on the bipartite transport graph. Anti-cycling by
/// strongly feasible spanning trees; entering arcs by deterministic block
/// search with ties broken by lowest arc index. Potentials are normalized so
/// that max phi = 0.
ExactSolution solve_exact(const CostMatrix& C, const DiscreteMeasure& mu,
                          const DiscreteMeasure& nu);

struct EntropicSolution {
  TransportPlan plan;
  double value = 0.0;  // <C, P>, without the entropy term
  double marginal_error = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Log-domain Sinkhorn with regularization eps. Converged when the l1 marginal
/// error is at most tol; otherwise converged = false and the error is reported.
EntropicSolution solve_entropic(const CostMatrix& C, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu, double eps,
                                std::size_t max_iters, double tol = 1e-7);

/// primal(plan) - J(potentials).
double duality_gap(const CostMatrix& C, const TransportPlan& plan,
                   const DualPotentials& potentials, const DiscreteMeasure& mu,
                   const DiscreteMeasure& nu);

/// C(i, j) = d_tau(x_i, y_j)^p over one cloud.
CostMatrix distance_power_matrix(const ScaleFlow& flow, double tau, const PointCloud& cloud,
                                 double p);
/// C(i, j) = eta(d_tau(x_i, x_j), tau).
CostMatrix cost_matrix(const ScaleFlow& flow, double tau, const CostFunction& cost,
                       const PointCloud& cloud);

double wasserstein_p(const ScaleFlow& flow, double tau, const PointCloud& cloud,
                     const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

double transport_cost(const ScaleFlow& flow, double tau, const CostFunction& cost,
                      const PointCloud& cloud, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu);

struct CheckpointSlack {
  double tau = 0.0;
  /// min over the checked pairs of c_tau(x, y) - phi(x, tau) - psi(y, tau).
  double min_slack = 0.0;
  SamplePoint at_x;
  SamplePoint at_y;
};

struct PreservationReport {
  std::vector<CheckpointSlack> checkpoints;
  /// Competitiveness violation of the final-time pair (>= 0).
  double final_violation = 0.0;
  bool under_resolved = false;
  bool pass = true;
  double tolerance = 1e-4;
};

struct PreservationOptions {
  double tolerance = 1e-4;
  double final_time_tolerance = 1e-8;
  /// Colatitude samples of the dense check for zonal sphere pairs. A zonal
  /// pair is tightest at equal longitude, so the dense check runs over
  /// (theta_x, theta_y) with equal longitude.
  int dense_colatitudes = 361;
};

/// Evolves (alpha_b, beta_b) by the backward heat equation from tau = b to each
/// checkpoint and records the minimum competitiveness slack over the cloud
/// product grid (and, on the sphere, the dense colatitude grid).
PreservationReport verify_competitive_preservation(
    const ScaleFlow& flow, const CostFunction& cost, double b,
    const std::vector<double>& checkpoints, const ScalarField& alpha_b,
    const ScalarField& beta_b, const PointCloud& cloud,
    const PreservationOptions& options = {});

/// min over checked pairs of c_tau - phi - psi for fields at clock tau.
CheckpointSlack competitive_slack(const ScaleFlow& flow, const CostFunction& cost, double tau,
                                  const ScalarField& phi, const ScalarField& psi,
                                  const PointCloud& cloud, int dense_colatitudes);

void write_cost_matrix_csv(const std::string& path, const CostMatrix& C);
void write_plan_csv(const std::string& path, const TransportPlan& plan);

}  // namespace ricciot
