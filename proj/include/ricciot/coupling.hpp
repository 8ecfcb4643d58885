#pragma once

// Upper bound for the coupled Laplacian of c_tau(x, y) = eta(d_tau(x, y), tau)
// from the distinguished parallel frames, and the gap of the evolution
// inequality it feeds into.

#include "ricciot/costs.hpp"
#include "ricciot/geometry.hpp"

namespace ricciot {

/// Off-diagonal pair (x, y) at time tau with its frames.
struct CoupledPair {
  SamplePoint x;
  SamplePoint y;
  double tau = 0.0;
  double d = 0.0;
  ParallelFrames frames;
};

/// Builds a pair; throws CutLocusError inside the guard and InvalidArgument for
/// coincident points.
CoupledPair make_pair(const ScaleFlow& flow, double tau, const SamplePoint& x,
                      const SamplePoint& y, const GeometryOptions& options = {});

struct BoundTerms {
  double tangential = 0.0;  // sum over i < n of the (E_i, E_i) second differences
  double along = 0.0;       // (E_n, E_n)
  double opposed = 0.0;     // (E_n, -E_n)
  double h = 0.0;           // step actually used
  double bound() const { return tangential + std::min(along, opposed); }
};

struct HessianOptions {
  /// Relative step h / d; h = rel_step * d when step <= 0.
  double rel_step = 1e-3;
  double step = 0.0;
  /// Smallest step tried after repeated cut-locus shrinking, relative to d.
  double min_rel_step = 1e-8;
  GeometryOptions geometry;
};

/// Three-point second differences of eta(L(r), tau), where L(r) is the g_tau
/// length of the variation curve s -> exp_{gamma(s)}(r E_i(s)) joining
/// exp_x(r E_i) to exp_y(+-r E_i). Since d_tau <= L with equality at r = 0 and
/// eta is nondecreasing, each term bounds the corresponding second difference
/// of c_tau from above.
BoundTerms coupled_hessian_terms(const ScaleFlow& flow, const CostFunction& cost,
                                 const CoupledPair& pair, const HessianOptions& options = {});

double coupled_hessian_bound(const ScaleFlow& flow, double tau, const CostFunction& cost,
                             const CoupledPair& pair, double h = 0.0);

/// -eta' * int Ric(gamma', gamma') ds + min(4 eta'', 0) evaluated exactly.
double closed_form_second_variation(const ScaleFlow& flow, double tau, const CostFunction& cost,
                                    const CoupledPair& pair);

/// d/dtau of c_tau(x, y) for fixed x, y: eta' (c' / 2c) d + eta_tau.
double time_derivative_cost(const ScaleFlow& flow, double tau, const CostFunction& cost,
                            const CoupledPair& pair);

/// Right-hand side  -eta_tau + K eta' d - min(4 eta'', 0)  of the inequality.
double lemma_rhs(const ScaleFlow& flow, double tau, const CostFunction& cost,
                 const CoupledPair& pair);

/// [-d/dtau c - bound] - rhs, with the bound Richardson-extrapolated from
/// steps h and h / 2 (h = 1e-3 d). Nonnegative whenever the flow satisfies the
/// super-Ricci condition with the flow's K and the cost is admissible.
double lemma_gap(const ScaleFlow& flow, double tau, const CostFunction& cost,
                 const CoupledPair& pair);

}  // namespace ricciot
