#pragma once

// Space-time geometry of backward Ricci flow on the model spaces: L-length,
// L-geodesics, the L-distance Q, the trace Harnack integral, the scaled frame
// ODE, the L-Wasserstein distance V and the normalized distance Theta.

#include <array>
#include <functional>
#include <vector>

#include "ricciot/diffusion.hpp"
#include "ricciot/geometry.hpp"
#include "ricciot/measure.hpp"
#include "ricciot/transport.hpp"

namespace ricciot {

/// A space-time curve tau -> gamma(tau) on [tau1, tau2], tau1 > 0.
///
/// Samples sit on `panels` geometric panels of [tau1, tau2] with five
/// Gauss-Lobatto nodes each (shared panel ends), so tau.size() = 4 panels + 1.
/// Positions and velocities are ambient standard-metric vectors (unit-sphere
/// embedding, or unwrapped plane coordinates on the torus); velocities are
/// d/dtau.
struct LPath {
  Model model = Model::Sphere2;
  int panels = 0;
  std::vector<double> tau;
  std::vector<SamplePoint> points;
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  /// L-length from the stored samples.
  double length = 0.0;
  /// Sup over the check grid of the g_tau norm of the geodesic-equation
  /// residual (0 for paths that did not come from l_geodesic).
  double residual = 0.0;

  /// Continuous trace used for evaluation between samples.
  std::function<Vec3(double)> position_at;
  std::function<Vec3(double)> velocity_at;

  double tau1() const { return tau.front(); }
  double tau2() const { return tau.back(); }
};

/// Samples a caller-supplied curve on the standard panel layout.
LPath sample_path(const ScaleFlow& flow, double tau1, double tau2,
                  std::function<Vec3(double)> position, std::function<Vec3(double)> velocity,
                  int panels = 64);

/// int sqrt(tau) (R + |gamma'|^2_{g_tau}) dtau by composite Lobatto quadrature on
/// the stored samples.
double l_length(const ScaleFlow& flow, const LPath& path);
/// The same integral by adaptive quadrature of the continuous trace.
double l_length_adaptive(const ScaleFlow& flow, const LPath& path);

struct LGeodesicOptions {
  int panels = 64;
  /// Chebyshev-Lobatto collocation nodes in u = sqrt(tau) (count - 1 intervals).
  int collocation = 40;
  double max_residual = 1e-6;
  GeometryOptions geometry;
};

/// L-geodesic from (x, tau1) to (y, tau2) under exact backward Ricci flow. The
/// minimizer along the spatial minimizing geodesic is known in closed form; it
/// starts a Newton solve of the full two-component collocation system in
/// u = sqrt(tau). Throws ConvergenceError when the residual exceeds
/// options.max_residual, CutLocusError for (near) antipodal sphere endpoints.
LPath l_geodesic(const ScaleFlow& flow, const SamplePoint& x, double tau1,
                 const SamplePoint& y, double tau2, const LGeodesicOptions& options = {});

/// L-length of l_geodesic.
double l_distance(const ScaleFlow& flow, const SamplePoint& x, double tau1,
                  const SamplePoint& y, double tau2, const LGeodesicOptions& options = {});

/// Q for fixed (tau1, tau2) as a function of the standard distance D between the
/// endpoints: Q = int sqrt(tau) R dtau + D^2 / int dtau / (sqrt(tau) c). By
/// Cauchy-Schwarz this is the minimum over all curves, and it agrees with
/// l_distance on exact backward Ricci flow. Valid for any scale flow.
class QKernel {
 public:
  QKernel(const ScaleFlow& flow, double tau1, double tau2);
  double operator()(double standard_distance) const { return curvature_ + d2_weight_ * standard_distance * standard_distance; }
  double operator()(const SamplePoint& x, const SamplePoint& y) const;
  double curvature_term() const { return curvature_; }
  /// 1 / int dtau / (sqrt(tau) c).
  double d2_weight() const { return d2_weight_; }

 private:
  Model model_;
  double curvature_ = 0.0;
  double d2_weight_ = 0.0;
};

/// Hamilton's trace Harnack integral int tau^{3/2} H(X) dtau along the path,
/// H = -dR/dtau - R/tau + 2 Ric(X, X) (R is spatially constant on the models).
double harnack_K(const ScaleFlow& flow, const LPath& path);

/// |LHS - RHS| of  tau1 dQ/dtau1 + tau2 dQ/dtau2 =
///   2 tau2^{3/2} R(tau2) - 2 tau1^{3/2} R(tau1) + K - Q / 2,
/// with central differences of l_distance (steps h tau_i) on the left.
double partL_residual(const ScaleFlow& flow, const SamplePoint& x, double tau1,
                      const SamplePoint& y, double tau2, double h,
                      const LGeodesicOptions& options = {});

/// Solutions Y_i of  nabla_X Y = -Ric(Y, .) + Y / (2 tau)  along a path, started
/// from a g_{tau1}-orthogonal frame of norm sqrt(tau1). frames[i][k] is Y_i at
/// path.tau[k].
struct FrameTransport {
  std::vector<double> tau;
  std::array<std::vector<Vec3>, kDim> frames;
  /// max over samples and i, j of |<Y_i, Y_j>_{g_tau} - tau delta_ij|.
  double invariant_error = 0.0;
};

FrameTransport frame_transport(const ScaleFlow& flow, const LPath& path, double tol = 1e-13);

struct SummedVariationReport {
  double lhs = 0.0;  // sum_i of coupled second differences of Q
  double rhs = 0.0;  // n (sqrt tau2 - sqrt tau1) - (2 tau2^{3/2} R2 - 2 tau1^{3/2} R1) - K
  double tolerance = 1e-4;
  bool pass = true;
};

SummedVariationReport summed_variation_check(const ScaleFlow& flow, const SamplePoint& x,
                                             double tau1, const SamplePoint& y, double tau2,
                                             double h, double tolerance = 1e-4,
                                             const LGeodesicOptions& options = {});

/// Q(x_i, tau1; x_j, tau2) over one cloud.
CostMatrix q_table(const ScaleFlow& flow, const PointCloud& cloud, double tau1, double tau2);

struct LWassersteinResult {
  double value = 0.0;
  double duality_gap = 0.0;
};

/// V(nu1 at tau1, nu2 at tau2) = min over couplings of the integral of Q.
LWassersteinResult l_wasserstein(const ScaleFlow& flow, const PointCloud& cloud,
                                 const DiscreteMeasure& nu1, double tau1,
                                 const DiscreteMeasure& nu2, double tau2);
/// Same with a precomputed q_table.
LWassersteinResult l_wasserstein(const CostMatrix& q, const DiscreteMeasure& nu1,
                                 const DiscreteMeasure& nu2);

/// Exponential clock tau_i(s) = bar_tau_i e^s.
struct LClock {
  double bar_tau1 = 0.5;
  double bar_tau2 = 1.0;
  double s_lo = 0.0;
  double s_hi = 1.0;

  double tau1(double s) const;
  double tau2(double s) const;
  /// which = 0 or 1.
  double tau(int which, double s) const;
  /// Checks 0 < bar_tau1 < bar_tau2 and that both clocks stay in the flow
  /// domain over [s_lo, s_hi].
  void validate(const ScaleFlow& flow) const;
};

struct ThetaSample {
  double s = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double V = 0.0;
  double theta = 0.0;
  double delta_sqrt_tau = 0.0;  // sqrt(tau2) - sqrt(tau1)
  double solver_gap = 0.0;
  double mass_defect = 0.0;
};

/// Theta(s) = 2 (sqrt tau2 - sqrt tau1) V - 2 n (sqrt tau2 - sqrt tau1)^2 for
/// diffusions u1, u2 evolved to tau1(s), tau2(s) and discretized on the cloud.
ThetaSample theta(const ScaleFlow& flow, const LClock& clock, const SpectralDensity& u1,
                  const SpectralDensity& u2, double s, const PointCloud& cloud);

/// Theta from V directly.
double theta_from_v(double V, double tau1, double tau2);

/// Backward heat flow in the clock variable: -df/ds = tau(s) Delta_{tau(s)} f
/// along clock `which`, from s_from down to s_to.
ScalarField evolve_dual_lclock(const ScaleFlow& flow, const ScalarField& f, const LClock& clock,
                               int which, double s_from, double s_to);

}  // namespace ricciot
