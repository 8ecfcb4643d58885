#pragma once

// Time-dependent costs c_tau(x, y) = eta(d_tau(x, y), tau) and the checker for
// the three admissibility conditions on eta.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ricciot/geometry.hpp"

namespace ricciot {

enum class CostKind { Power, Analytic, Tabulated };

/// Samples of eta and its derivatives on a full (s, tau) grid, row-major in s:
/// entry (i, j) <-> (s[i], tau[j]).
struct CostTable {
  std::vector<double> s;
  std::vector<double> tau;
  std::vector<double> eta;
  std::vector<double> eta_s;
  std::vector<double> eta_ss;
  std::vector<double> eta_tau;
};

/// Reads CSV rows "s,tau,eta,eta_s,eta_ss,eta_tau" (header optional) forming a
/// complete grid in any row order.
CostTable read_cost_table(const std::string& path);

class CostFunction {
 public:
  using Fn = std::function<double(double s, double tau)>;

  /// eta(s, tau) = exp(p K tau) s^p.
  static CostFunction power(double p, double K);

  /// Closed-form eta with caller-supplied derivatives.
  static CostFunction analytic(std::string name, Fn eta, Fn eta_s, Fn eta_ss, Fn eta_tau,
                               bool singular_at_zero = false);

  /// Bicubic Hermite interpolation of a table. Derivative tables supplied by
  /// the user are used as the Hermite slopes; the remaining slopes come from
  /// centered differences of the tables.
  static CostFunction tabulated(CostTable table, std::string name = "table");

  CostKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double p() const { return p_; }
  double K() const { return K_; }
  /// True when eta'' (and possibly eta') is unbounded at s = 0.
  bool singular_at_zero() const { return singular_at_zero_; }
  /// Table nodes of a tabulated cost (empty otherwise).
  const CostTable* table() const { return table_.get(); }

  double eta(double s, double tau) const;
  double eta_s(double s, double tau) const;
  double eta_ss(double s, double tau) const;
  double eta_tau(double s, double tau) const;

 private:
  CostFunction() = default;

  CostKind kind_ = CostKind::Power;
  std::string name_;
  double p_ = 0.0;
  double K_ = 0.0;
  bool singular_at_zero_ = false;
  Fn eta_, eta_s_, eta_ss_, eta_tau_;
  std::shared_ptr<const CostTable> table_;
};

CostFunction power_cost(double p, double K);

struct ConditionMargin {
  std::string condition;
  double min_margin = 0.0;
  double at_s = 0.0;
  double at_tau = 0.0;
  bool pass = true;
};

struct AdmissibilityReport {
  /// eta(0, tau) = 0; eta_s >= 0; -eta_tau + K s eta_s - min(4 eta_ss, 0) >= 0.
  std::vector<ConditionMargin> conditions;
  bool pass = true;
  /// Relative to the magnitude of the terms at each node.
  double tolerance = 1e-12;
};

/// Minimum margin of each admissibility condition over the grid. Tabulated
/// costs are checked on their own table nodes and the grids are ignored.
AdmissibilityReport admissibility_check(const CostFunction& cost, double K,
                                        const std::vector<double>& s_grid,
                                        const std::vector<double>& tau_grid);

double eval_cost(const CostFunction& cost, const ScaleFlow& flow, double tau,
                 const SamplePoint& x, const SamplePoint& y);

}  // namespace ricciot
