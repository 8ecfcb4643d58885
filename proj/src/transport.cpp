#include "ricciot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "ricciot/errors.hpp"

namespace ricciot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Primal network simplex for the uncapacitated transportation problem.
//
// Nodes 0..m-1 are sources, m..m+n-1 sinks and m+n is an artificial root.
// Arc e < m*n is the real arc (e / n) -> m + (e % n). Arc m*n + k joins node
// k to the root: source -> root for k < m, root -> sink otherwise. Artificial
// arcs carry a cost large enough that they end with zero flow.
class NetworkSimplex {
 public:
  NetworkSimplex(const CostMatrix& C, const std::vector<double>& supply,
                 const std::vector<double>& demand)
      : C_(C),
        m_(supply.size()),
        n_(demand.size()),
        real_arcs_(m_ * n_),
        arcs_(real_arcs_ + m_ + n_),
        root_(m_ + n_),
        flow_(arcs_, 0.0),
        in_tree_(arcs_, 0),
        parent_(m_ + n_ + 1, -1),
        pred_(m_ + n_ + 1, -1),
        up_(m_ + n_ + 1, 0),
        depth_(m_ + n_ + 1, 0),
        pi_(m_ + n_ + 1, 0.0),
        kids_(m_ + n_ + 1) {
    double max_cost = 0.0;
    for (Eigen::Index i = 0; i < C_.rows(); ++i) {
      for (Eigen::Index j = 0; j < C_.cols(); ++j) max_cost = std::max(max_cost, std::abs(C_(i, j)));
    }
    art_cost_ = (max_cost + 1.0) * static_cast<double>(m_ + n_);
    eps_ = 64.0 * std::numeric_limits<double>::epsilon() * art_cost_;

    for (std::size_t k = 0; k < m_ + n_; ++k) {
      const std::size_t e = real_arcs_ + k;
      in_tree_[e] = 1;
      parent_[k] = static_cast<long>(root_);
      pred_[k] = static_cast<long>(e);
      depth_[k] = 1;
      kids_[root_].push_back(static_cast<long>(k));
      if (k < m_) {
        flow_[e] = supply[k];
        up_[k] = 1;
        pi_[k] = -art_cost_;  // cost + pi_k - pi_root = 0
      } else {
        flow_[e] = demand[k - m_];
        up_[k] = 0;
        pi_[k] = art_cost_;  // cost + pi_root - pi_k = 0
      }
    }
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(std::sqrt(double(arcs_)))));
  }

  std::size_t run() {
    std::size_t pivots = 0;
    const std::size_t limit = 50 * arcs_ + 1000;
    long entering;
    while ((entering = find_entering()) >= 0) {
      pivot(static_cast<std::size_t>(entering));
      if (++pivots > limit) throw ConvergenceError("network simplex: pivot limit exceeded");
    }
    for (std::size_t k = 0; k < m_ + n_; ++k) {
      if (flow_[real_arcs_ + k] > 1e-12) {
        throw InvalidArgument("solve_exact: infeasible marginals (artificial flow remains)");
      }
    }
    return pivots;
  }

  double flow(std::size_t i, std::size_t j) const { return flow_[i * n_ + j]; }
  double potential(std::size_t node) const { return pi_[node]; }

 private:
  std::size_t source(std::size_t e) const {
    if (e < real_arcs_) return e / n_;
    const std::size_t k = e - real_arcs_;
    return k < m_ ? k : root_;
  }
  std::size_t target(std::size_t e) const {
    if (e < real_arcs_) return m_ + e % n_;
    const std::size_t k = e - real_arcs_;
    return k < m_ ? root_ : k;
  }
  double cost(std::size_t e) const {
    if (e < real_arcs_) return C_(static_cast<Eigen::Index>(e / n_), static_cast<Eigen::Index>(e % n_));
    return art_cost_;
  }
  double reduced_cost(std::size_t e) const {
    return cost(e) + pi_[source(e)] - pi_[target(e)];
  }

  // Block search: scan blocks cyclically from next_arc_, pick the most
  // negative reduced cost of the first block that has one.
  long find_entering() {
    long best = -1;
    double best_rc = -eps_;
    std::size_t scanned = 0;
    std::size_t e = next_arc_;
    while (scanned < arcs_) {
      const std::size_t stop = std::min(arcs_, scanned + block_);
      for (; scanned < stop; ++scanned) {
        if (!in_tree_[e]) {
          const double rc = reduced_cost(e);
          if (rc < best_rc || (rc == best_rc && best >= 0 && e < static_cast<std::size_t>(best))) {
            best_rc = rc;
            best = static_cast<long>(e);
          }
        }
        if (++e == arcs_) e = 0;
      }
      if (best >= 0) break;
    }
    next_arc_ = e;
    return best;
  }

  void pivot(std::size_t entering) {
    const std::size_t a = source(entering);
    const std::size_t b = target(entering);
    const double rc = reduced_cost(entering);

    std::size_t u = a, v = b;
    while (u != v) {
      if (depth_[u] >= depth_[v]) {
        u = static_cast<std::size_t>(parent_[u]);
      } else {
        v = static_cast<std::size_t>(parent_[v]);
      }
    }
    const std::size_t join = u;

    // Flow goes join -> ... -> a -> b -> ... -> join. Among blocking arcs
    // take the last one met from the join (strongly feasible rule).
    double delta = kInf;
    long leaving_node = -1;
    bool on_source_side = true;
    for (std::size_t w = a; w != join; w = static_cast<std::size_t>(parent_[w])) {
      if (up_[w]) {
        const double residual = flow_[static_cast<std::size_t>(pred_[w])];
        if (residual < delta) {
          delta = residual;
          leaving_node = static_cast<long>(w);
          on_source_side = true;
        }
      }
    }
    for (std::size_t w = b; w != join; w = static_cast<std::size_t>(parent_[w])) {
      if (!up_[w]) {
        const double residual = flow_[static_cast<std::size_t>(pred_[w])];
        if (residual <= delta) {
          delta = residual;
          leaving_node = static_cast<long>(w);
          on_source_side = false;
        }
      }
    }
    if (leaving_node < 0) throw ConvergenceError("network simplex: unbounded cycle");

    if (delta > 0.0) {
      flow_[entering] += delta;
      for (std::size_t w = a; w != join; w = static_cast<std::size_t>(parent_[w])) {
        flow_[static_cast<std::size_t>(pred_[w])] += up_[w] ? -delta : delta;
      }
      for (std::size_t w = b; w != join; w = static_cast<std::size_t>(parent_[w])) {
        flow_[static_cast<std::size_t>(pred_[w])] += up_[w] ? delta : -delta;
      }
    }

    const std::size_t out = static_cast<std::size_t>(leaving_node);
    in_tree_[static_cast<std::size_t>(pred_[out])] = 0;
    in_tree_[entering] = 1;
    // Any flow left on the leaving arc is rounding noise.
    flow_[static_cast<std::size_t>(pred_[out])] = 0.0;

    const std::size_t in_node = on_source_side ? a : b;
    const std::size_t anchor = on_source_side ? b : a;
    const double sigma = on_source_side ? -rc : rc;

    detach(out);
    // Reverse the path in_node -> ... -> out.
    long prev_node = static_cast<long>(anchor);
    long prev_arc = static_cast<long>(entering);
    char prev_up = on_source_side ? 1 : 0;
    std::size_t w = in_node;
    while (true) {
      const long next = parent_[w];
      const long w_arc = pred_[w];
      const char w_up = up_[w];
      if (w != out) detach(w);
      parent_[w] = prev_node;
      pred_[w] = prev_arc;
      up_[w] = prev_up;
      kids_[static_cast<std::size_t>(prev_node)].push_back(static_cast<long>(w));
      if (w == out) break;
      prev_node = static_cast<long>(w);
      prev_arc = w_arc;
      prev_up = w_up ? 0 : 1;
      w = static_cast<std::size_t>(next);
    }

    // Depths and potentials of the re-hung subtree.
    stack_.clear();
    stack_.push_back(in_node);
    while (!stack_.empty()) {
      const std::size_t x = stack_.back();
      stack_.pop_back();
      depth_[x] = depth_[static_cast<std::size_t>(parent_[x])] + 1;
      pi_[x] += sigma;
      for (long k : kids_[x]) stack_.push_back(static_cast<std::size_t>(k));
    }
  }

  // Removes x from its parent's child list.
  void detach(std::size_t x) {
    auto& siblings = kids_[static_cast<std::size_t>(parent_[x])];
    auto it = std::find(siblings.begin(), siblings.end(), static_cast<long>(x));
    *it = siblings.back();
    siblings.pop_back();
  }

  const CostMatrix& C_;
  std::size_t m_, n_, real_arcs_, arcs_, root_;
  std::vector<double> flow_;
  std::vector<char> in_tree_;
  std::vector<long> parent_, pred_;
  std::vector<char> up_;
  std::vector<long> depth_;
  std::vector<double> pi_;
  std::vector<std::vector<long>> kids_;
  std::vector<std::size_t> stack_;
  double art_cost_ = 0.0;
  double eps_ = 0.0;
  std::size_t block_ = 10;
  std::size_t next_arc_ = 0;
};

void fill_residuals(TransportPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  plan.source_residual.assign(mu.size(), 0.0);
  plan.target_residual.assign(nu.size(), 0.0);
  for (const auto& c : plan.couplings) {
    plan.source_residual[c.i] += c.mass;
    plan.target_residual[c.j] += c.mass;
  }
  for (std::size_t i = 0; i < mu.size(); ++i) plan.source_residual[i] -= mu.weights[i];
  for (std::size_t j = 0; j < nu.size(); ++j) plan.target_residual[j] -= nu.weights[j];
}

void check_problem(const CostMatrix& C, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const char* where) {
  if (static_cast<std::size_t>(C.rows()) != mu.size() ||
      static_cast<std::size_t>(C.cols()) != nu.size()) {
    throw InvalidArgument(std::string(where) + ": cost table shape does not match the measures");
  }
  if (!C.allFinite()) throw InvalidArgument(std::string(where) + ": cost table is not finite");
  mu.validate(1e-9);
  nu.validate(1e-9);
  double sa = 0.0, sb = 0.0;
  for (double w : mu.weights) sa += w;
  for (double w : nu.weights) sb += w;
  if (std::abs(sa - sb) > 1e-9) {
    throw InvalidArgument(std::string(where) + ": infeasible marginals (total masses differ)");
  }
}

double log_sum_exp(const double* values, std::size_t n, std::size_t stride) {
  double hi = -kInf;
  for (std::size_t k = 0; k < n; ++k) hi = std::max(hi, values[k * stride]);
  if (hi == -kInf) return -kInf;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += std::exp(values[k * stride] - hi);
  return hi + std::log(sum);
}

}  // namespace

// ---------------------------------------------------------------- value types

double TransportPlan::max_marginal_error() const {
  double e = 0.0;
  for (double r : source_residual) e = std::max(e, std::abs(r));
  for (double r : target_residual) e = std::max(e, std::abs(r));
  return e;
}

double TransportPlan::cost(const CostMatrix& C) const {
  double sum = 0.0;
  for (const auto& c : couplings) {
    sum += c.mass * C(static_cast<Eigen::Index>(c.i), static_cast<Eigen::Index>(c.j));
  }
  return sum;
}

double DualPotentials::value(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (mu.weights[i] > 0.0) sum += mu.weights[i] * phi[i];
  }
  for (std::size_t j = 0; j < psi.size(); ++j) {
    if (nu.weights[j] > 0.0) sum += nu.weights[j] * psi[j];
  }
  return sum;
}

double DualPotentials::max_violation(const CostMatrix& C) const {
  double worst = -kInf;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    for (std::size_t j = 0; j < psi.size(); ++j) {
      worst = std::max(worst, phi[i] + psi[j] -
                                  C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------- exact solver

ExactSolution solve_exact(const CostMatrix& C, const DiscreteMeasure& mu,
                          const DiscreteMeasure& nu) {
  check_problem(C, mu, nu, "solve_exact");
  if (mu.size() > kMaxExactSize || nu.size() > kMaxExactSize) {
    throw InvalidArgument("solve_exact: dense tables are limited to 400 x 400; use solve_entropic");
  }
  const std::vector<std::size_t> rows = mu.support();
  const std::vector<std::size_t> cols = nu.support();

  CostMatrix reduced(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  std::vector<double> supply(rows.size()), demand(cols.size());
  double total_supply = 0.0, total_demand = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    supply[r] = mu.weights[rows[r]];
    total_supply += supply[r];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      reduced(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          C(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
    }
  }
  for (std::size_t c = 0; c < cols.size(); ++c) {
    demand[c] = nu.weights[cols[c]];
    total_demand += demand[c];
  }
  // Balance the two totals exactly so the artificial arcs can be emptied.
  for (double& d : demand) d *= total_supply / total_demand;

  NetworkSimplex simplex(reduced, supply, demand);
  ExactSolution sol;
  sol.pivots = simplex.run();

  const std::size_t m = rows.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double f = simplex.flow(r, c);
      if (f > 0.0) sol.plan.couplings.push_back({rows[r], cols[c], f});
    }
  }
  fill_residuals(sol.plan, mu, nu);

  auto& phi = sol.potentials.phi;
  auto& psi = sol.potentials.psi;
  phi.assign(mu.size(), kInf);
  psi.assign(nu.size(), kInf);
  for (std::size_t r = 0; r < rows.size(); ++r) phi[rows[r]] = -simplex.potential(r);
  for (std::size_t c = 0; c < cols.size(); ++c) psi[cols[c]] = simplex.potential(m + c);
  // Off-support potentials by c-transform keep the pair competitive everywhere.
  std::vector<char> active_row(mu.size(), 0), active_col(nu.size(), 0);
  for (std::size_t r : rows) active_row[r] = 1;
  for (std::size_t c : cols) active_col[c] = 1;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (active_row[i]) continue;
    for (std::size_t c : cols) {
      phi[i] = std::min(phi[i], C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) - psi[c]);
    }
  }
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (active_col[j]) continue;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      psi[j] = std::min(psi[j], C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - phi[i]);
    }
  }
  const double shift = *std::max_element(phi.begin(), phi.end());
  for (double& v : phi) v -= shift;
  for (double& v : psi) v += shift;

  sol.value = sol.plan.cost(C);
  sol.dual_value = sol.potentials.value(mu, nu);
  return sol;
}

// ---------------------------------------------------------------- entropic solver

EntropicSolution solve_entropic(const CostMatrix& C, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu, double eps, std::size_t max_iters,
                                double tol) {
  check_problem(C, mu, nu, "solve_entropic");
  if (!(eps > 0.0)) throw InvalidArgument("solve_entropic: eps must be positive");
  const std::size_t m = mu.size(), n = nu.size();
  std::vector<double> log_a(m), log_b(n);
  for (std::size_t i = 0; i < m; ++i) log_a[i] = mu.weights[i] > 0.0 ? std::log(mu.weights[i]) : -kInf;
  for (std::size_t j = 0; j < n; ++j) log_b[j] = nu.weights[j] > 0.0 ? std::log(nu.weights[j]) : -kInf;

  std::vector<double> f(m, 0.0), g(n, 0.0), work(std::max(m, n));
  EntropicSolution sol;
  auto row_sums = [&](std::vector<double>& out) {
    out.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (log_a[i] == -kInf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (log_b[j] == -kInf) continue;
        out[i] += std::exp((f[i] + g[j] - C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) / eps);
      }
    }
  };
  std::vector<double> rows;
  for (sol.iterations = 1; sol.iterations <= max_iters; ++sol.iterations) {
    for (std::size_t i = 0; i < m; ++i) {
      if (log_a[i] == -kInf) {
        f[i] = -kInf;
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        work[j] = log_b[j] == -kInf ? -kInf
                                    : (g[j] - C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) / eps;
      }
      f[i] = eps * (log_a[i] - log_sum_exp(work.data(), n, 1));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (log_b[j] == -kInf) {
        g[j] = -kInf;
        continue;
      }
      for (std::size_t i = 0; i < m; ++i) {
        work[i] = log_a[i] == -kInf ? -kInf
                                    : (f[i] - C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) / eps;
      }
      g[j] = eps * (log_b[j] - log_sum_exp(work.data(), m, 1));
    }
    row_sums(rows);
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) err += std::abs(rows[i] - mu.weights[i]);
    sol.marginal_error = err;
    if (err <= tol) {
      sol.converged = true;
      break;
    }
  }
  if (sol.iterations > max_iters) sol.iterations = max_iters;

  for (std::size_t i = 0; i < m; ++i) {
    if (log_a[i] == -kInf) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (log_b[j] == -kInf) continue;
      const double mass = std::exp((f[i] + g[j] - C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) / eps);
      if (mass > 0.0) sol.plan.couplings.push_back({i, j, mass});
    }
  }
  fill_residuals(sol.plan, mu, nu);
  sol.value = sol.plan.cost(C);
  return sol;
}

double duality_gap(const CostMatrix& C, const TransportPlan& plan,
                   const DualPotentials& potentials, const DiscreteMeasure& mu,
                   const DiscreteMeasure& nu) {
  return plan.cost(C) - potentials.value(mu, nu);
}

// ---------------------------------------------------------------- geometric wrappers

CostMatrix distance_power_matrix(const ScaleFlow& flow, double tau, const PointCloud& cloud,
                                 double p) {
  flow.require_in_domain(tau, "distance_power_matrix");
  if (!(p > 0.0)) throw InvalidArgument("distance power must be positive");
  const auto n = static_cast<Eigen::Index>(cloud.size());
  CostMatrix C(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double d = distance(flow, tau, cloud.points[i], cloud.points[j]);
      C(i, j) = C(j, i) = std::pow(d, p);
    }
  }
  return C;
}

CostMatrix cost_matrix(const ScaleFlow& flow, double tau, const CostFunction& cost,
                       const PointCloud& cloud) {
  flow.require_in_domain(tau, "cost_matrix");
  const auto n = static_cast<Eigen::Index>(cloud.size());
  CostMatrix C(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      C(i, j) = C(j, i) = eval_cost(cost, flow, tau, cloud.points[i], cloud.points[j]);
    }
  }
  return C;
}

double wasserstein_p(const ScaleFlow& flow, double tau, const PointCloud& cloud,
                     const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  const CostMatrix C = distance_power_matrix(flow, tau, cloud, p);
  const double value = solve_exact(C, mu, nu).value;
  return std::pow(std::max(value, 0.0), 1.0 / p);
}

double transport_cost(const ScaleFlow& flow, double tau, const CostFunction& cost,
                      const PointCloud& cloud, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu) {
  return solve_exact(cost_matrix(flow, tau, cost, cloud), mu, nu).value;
}

// ---------------------------------------------------------------- competitiveness

CheckpointSlack competitive_slack(const ScaleFlow& flow, const CostFunction& cost, double tau,
                                  const ScalarField& phi, const ScalarField& psi,
                                  const PointCloud& cloud, int dense_colatitudes) {
  CheckpointSlack out;
  out.tau = tau;
  out.min_slack = kInf;
  const std::vector<double> pv = phi.values(cloud.points);
  const std::vector<double> qv = psi.values(cloud.points);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      const double slack =
          eval_cost(cost, flow, tau, cloud.points[i], cloud.points[j]) - pv[i] - qv[j];
      if (slack < out.min_slack) {
        out.min_slack = slack;
        out.at_x = cloud.points[i];
        out.at_y = cloud.points[j];
      }
    }
  }
  if (flow.model() == Model::Sphere2 && dense_colatitudes > 1) {
    const double sqrt_c = std::sqrt(flow.scale(tau));
    std::vector<double> theta(dense_colatitudes), pz(dense_colatitudes), qz(dense_colatitudes);
    for (int k = 0; k < dense_colatitudes; ++k) {
      theta[k] = std::numbers::pi * k / (dense_colatitudes - 1);
      pz[k] = phi.zonal_value(std::cos(theta[k]));
      qz[k] = psi.zonal_value(std::cos(theta[k]));
    }
    for (int a = 0; a < dense_colatitudes; ++a) {
      for (int b = 0; b < dense_colatitudes; ++b) {
        const double slack = cost.eta(sqrt_c * std::abs(theta[a] - theta[b]), tau) - pz[a] - qz[b];
        if (slack < out.min_slack) {
          out.min_slack = slack;
          out.at_x = {theta[a], 0.0};
          out.at_y = {theta[b], 0.0};
        }
      }
    }
  }
  return out;
}

PreservationReport verify_competitive_preservation(
    const ScaleFlow& flow, const CostFunction& cost, double b,
    const std::vector<double>& checkpoints, const ScalarField& alpha_b,
    const ScalarField& beta_b, const PointCloud& cloud, const PreservationOptions& options) {
  flow.require_in_domain(b, "verify_competitive_preservation");
  PreservationReport report;
  report.tolerance = options.tolerance;
  const CheckpointSlack final_slack =
      competitive_slack(flow, cost, b, alpha_b, beta_b, cloud, options.dense_colatitudes);
  report.final_violation = std::max(0.0, -final_slack.min_slack);
  report.under_resolved = report.final_violation > options.final_time_tolerance;

  for (double tau : checkpoints) {
    if (tau > b) throw DomainError("verify_competitive_preservation: checkpoints must not exceed b");
    const ScalarField phi = evolve_dual(flow, alpha_b, b, tau);
    const ScalarField psi = evolve_dual(flow, beta_b, b, tau);
    report.checkpoints.push_back(
        competitive_slack(flow, cost, tau, phi, psi, cloud, options.dense_colatitudes));
  }
  report.pass = !report.under_resolved;
  for (const auto& c : report.checkpoints) {
    report.pass = report.pass && c.min_slack >= -options.tolerance;
  }
  return report;
}

// ---------------------------------------------------------------- CSV export

void write_cost_matrix_csv(const std::string& path, const CostMatrix& C) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "i,j,value\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    for (Eigen::Index j = 0; j < C.cols(); ++j) out << i << ',' << j << ',' << C(i, j) << '\n';
  }
}

void write_plan_csv(const std::string& path, const TransportPlan& plan) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "i,j,mass\n" << std::setprecision(17);
  for (const auto& c : plan.couplings) out << c.i << ',' << c.j << ',' << c.mass << '\n';
}

}  // namespace ricciot
