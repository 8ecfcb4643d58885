#pragma once

// Model evolving geometries g_tau = c(tau) * g_std on the round unit 2-sphere
// and the flat unit 2-torus. Every metric quantity is exact on these models,
// so discretization error only enters through transport and diffusion.

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ricciot {

/// Manifold dimension. Formulas keep the symbolic (n - 1).
inline constexpr int kDim = 2;

enum class Model { Sphere2, Torus2 };
enum class FlowLaw { ExactBackwardRicci, UserScale };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

using Vec3 = Eigen::Vector3d;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double t, double slack = 1e-12) const {
    return t >= lo - slack && t <= hi + slack;
  }
};

/// (colatitude, longitude) on Sphere2, (x, y) in [0,1)^2 on Torus2.
struct SamplePoint {
  double p = 0.0;
  double q = 0.0;
};

struct GeometryOptions {
  /// Pairs closer than this to the cut locus are refused. On the sphere it is
  /// an angle; on the torus it is the minimum standard-length gap between the
  /// two shortest lattice translates.
  double cut_guard = 0.05;
};

/// A scale-factor family g_tau = c(tau) g_std together with the curvature
/// constant K of the super-Ricci condition it is declared to satisfy.
class ScaleFlow {
 public:
  /// Exact backward Ricci flow: c = c0 + 2(n-1) tau on the sphere, c = c0 on the
  /// torus.
  static ScaleFlow backward_ricci(Model model, double c0, double K, Interval domain,
                                  bool declared_super_ricci = true);

  /// Scale given by samples (tau_k, c_k), interpolated by a monotone cubic
  /// (PCHIP). Needs at least four samples.
  static ScaleFlow user_scale(Model model, std::vector<double> tau,
                              std::vector<double> scale, double K,
                              bool declared_super_ricci = true);

  Model model() const { return model_; }
  FlowLaw law() const { return law_; }
  double K() const { return K_; }
  double c0() const { return c0_; }
  const Interval& domain() const { return domain_; }
  bool declared_super_ricci() const { return declared_; }

  double scale(double tau) const;
  double scale_derivative(double tau) const;

  /// Ric(g_tau) = ricci_factor(tau) * g_tau.
  double ricci_factor(double tau) const;
  /// Scalar curvature R(tau), spatially constant on the models.
  double scalar_curvature(double tau) const;
  double scalar_curvature_derivative(double tau) const;

  /// Integral of ds / c(s) over [a, b]; closed form for the exact law.
  double inverse_scale_integral(double a, double b) const;

  void require_in_domain(double tau, const char* where) const;

 private:
  ScaleFlow() = default;
  void validate() const;

  Model model_ = Model::Sphere2;
  FlowLaw law_ = FlowLaw::ExactBackwardRicci;
  double c0_ = 1.0;
  double K_ = 0.0;
  Interval domain_;
  bool declared_ = true;
  std::vector<double> sample_tau_;
  std::vector<double> sample_scale_;
  struct Interpolant;
  std::shared_ptr<const Interpolant> interp_;
};

/// Quadrature cloud on the standard metric: weights sum to 4 pi (sphere) or 1
/// (torus).
struct PointCloud {
  Model model = Model::Sphere2;
  std::vector<SamplePoint> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Product cloud: Gauss-Legendre nodes in cos(colatitude) times uniform longitudes.
PointCloud sphere_cloud(int n_lat, int n_lon);
/// Sphere cloud with N points, n_lat the divisor of N closest to sqrt(N / 2).
PointCloud sphere_cloud(int n_points);
/// Uniform nx * ny grid on the torus (cell centers).
PointCloud torus_cloud(int nx, int ny);
/// Torus cloud with N points on the most nearly square factorization.
PointCloud torus_cloud(int n_points);
PointCloud make_cloud(Model model, int n_points);

// ---- point and tangent-vector helpers (standard metric, ambient coordinates)

/// Unit-sphere embedding (sphere) or (x, y, 0) (torus).
Vec3 embed(Model model, const SamplePoint& x);
SamplePoint from_embedding(Model model, const Vec3& v);
SamplePoint normalize(Model model, const SamplePoint& x);

/// Standard-metric exponential map; v is an ambient tangent vector at x.
SamplePoint exp_std(Model model, const SamplePoint& x, const Vec3& v);

/// Distance for c = 1: great-circle angle, or flat distance minimized over the
/// 9 nearest lattice translates.
double standard_distance(Model model, const SamplePoint& x, const SamplePoint& y);

// ---- operations

double metric_scale(const ScaleFlow& flow, double tau);
double metric_scale_derivative(const ScaleFlow& flow, double tau);

double distance(const ScaleFlow& flow, double tau, const SamplePoint& x,
                const SamplePoint& y);

/// m(tau) with condition  -d/dtau g + 2 Ric >= 2 K g  holding iff m >= 0.
double super_ricci_margin(const ScaleFlow& flow, double tau);

/// Point at fraction t in [0, 1] along the unique minimizing geodesic.
SamplePoint geodesic_point(const ScaleFlow& flow, double tau, const SamplePoint& x,
                           const SamplePoint& y, double t,
                           const GeometryOptions& options = {});

/// Parallel orthonormal frames at the endpoints of the minimizing geodesic.
/// Vectors are ambient and g_tau-orthonormal; index kDim - 1 is the unit
/// tangent pointing from x towards y (at both ends).
struct ParallelFrames {
  std::array<Vec3, kDim> at_x;
  std::array<Vec3, kDim> at_y;
};

ParallelFrames parallel_frame(const ScaleFlow& flow, double tau, const SamplePoint& x,
                              const SamplePoint& y, const GeometryOptions& options = {});

/// g_tau inner product of two ambient tangent vectors.
double metric_inner(const ScaleFlow& flow, double tau, const Vec3& a, const Vec3& b);

}  // namespace ricciot
