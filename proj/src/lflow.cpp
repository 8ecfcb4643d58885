#include "ricciot/lflow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <boost/numeric/odeint.hpp>

#include "ricciot/errors.hpp"
#include "ricciot/numerics.hpp"

namespace ricciot {

namespace {

constexpr int n = kDim;

void require_positive_times(const ScaleFlow& flow, double tau1, double tau2, const char* where) {
  if (!(tau1 > 0.0) || !(tau2 > tau1)) {
    std::ostringstream msg;
    msg << where << ": need 0 < tau1 < tau2, got " << tau1 << ", " << tau2;
    throw DomainError(msg.str());
  }
  flow.require_in_domain(tau1, where);
  flow.require_in_domain(tau2, where);
}

std::vector<double> panel_edges(double tau1, double tau2, int panels) {
  std::vector<double> edges(panels + 1);
  for (int k = 0; k <= panels; ++k) {
    edges[k] = tau1 * std::pow(tau2 / tau1, static_cast<double>(k) / panels);
  }
  edges.front() = tau1;
  edges.back() = tau2;
  return edges;
}

// Lobatto quadrature of samples g[k] laid out on the path's panels.
double panel_quadrature(const LPath& path, const std::vector<double>& g) {
  const auto& w = numerics::gauss_lobatto5().weights;
  double sum = 0.0;
  for (int p = 0; p < path.panels; ++p) {
    const std::size_t base = 4 * static_cast<std::size_t>(p);
    const double half = 0.5 * (path.tau[base + 4] - path.tau[base]);
    for (int k = 0; k < 5; ++k) sum += half * w[k] * g[base + k];
  }
  return sum;
}

double tangent_speed2(Model model, const Vec3& position, const Vec3& velocity) {
  if (model == Model::Torus2) return velocity.squaredNorm();
  const Vec3 u = position.normalized();
  return (velocity - velocity.dot(u) * u).squaredNorm();
}

double l_integrand(const ScaleFlow& flow, Model model, double tau, const Vec3& pos, const Vec3& vel) {
  return std::sqrt(tau) *
         (flow.scalar_curvature(tau) + flow.scale(tau) * tangent_speed2(model, pos, vel));
}

// Polynomial interpolant through Chebyshev-Lobatto nodes in barycentric form.
struct Chebyshev {
  std::vector<double> x;
  std::vector<double> w;
  Eigen::MatrixXd D;

  Chebyshev(int m, double a, double b) : x(numerics::chebyshev_lobatto(m, a, b)), w(m + 1) {
    for (int k = 0; k <= m; ++k) w[k] = ((k % 2) ? -1.0 : 1.0) * ((k == 0 || k == m) ? 0.5 : 1.0);
    D.setZero(m + 1, m + 1);
    for (int i = 0; i <= m; ++i) {
      double diag = 0.0;
      for (int j = 0; j <= m; ++j) {
        if (i == j) continue;
        D(i, j) = (w[j] / w[i]) / (x[i] - x[j]);
        diag -= D(i, j);
      }
      D(i, i) = diag;
    }
  }

  int size() const { return static_cast<int>(x.size()); }

  double eval(const Eigen::VectorXd& f, double t) const {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = t - x[j];
      if (diff == 0.0) return f[static_cast<Eigen::Index>(j)];
      const double c = w[j] / diff;
      num += c * f[static_cast<Eigen::Index>(j)];
      den += c;
    }
    return num / den;
  }
};

// Collocation solution of the geodesic equation in u = sqrt(tau):
//   q'' + Gamma(q', q') + 4 u rho(u^2) q' = 0,  rho = Ricci factor,
// with q = (theta, phi) in a frame where both endpoints lie on the equator
// (sphere), or q = (x, y) unwrapped (torus).
struct Trace {
  Model model = Model::Sphere2;
  Chebyshev cheb;
  Eigen::VectorXd q1, q2, d1, d2, dd1, dd2;
  Vec3 a, b, pole;  // sphere frame
  Vec3 origin;      // torus start

  explicit Trace(Chebyshev c) : cheb(std::move(c)) {}

  void refresh_derivatives() {
    d1 = cheb.D * q1;
    d2 = cheb.D * q2;
    dd1 = cheb.D * d1;
    dd2 = cheb.D * d2;
  }

  Vec3 position(double tau) const {
    const double u = std::sqrt(tau);
    const double t = cheb.eval(q1, u), p = cheb.eval(q2, u);
    if (model == Model::Torus2) return origin + Vec3(t, p, 0.0);
    return std::sin(t) * std::cos(p) * a + std::sin(t) * std::sin(p) * b + std::cos(t) * pole;
  }

  Vec3 velocity(double tau) const {
    const double u = std::sqrt(tau);
    const double tu = cheb.eval(d1, u), pu = cheb.eval(d2, u);
    if (model == Model::Torus2) return Vec3(tu, pu, 0.0) / (2.0 * u);
    const double t = cheb.eval(q1, u), p = cheb.eval(q2, u);
    const Vec3 dt = std::cos(t) * std::cos(p) * a + std::cos(t) * std::sin(p) * b - std::sin(t) * pole;
    const Vec3 dp = -std::sin(t) * std::sin(p) * a + std::sin(t) * std::cos(p) * b;
    return (tu * dt + pu * dp) / (2.0 * u);
  }

  // g_tau norm of 2 nabla_X X + 4 Ric(X) + X / tau at tau.
  double residual(const ScaleFlow& flow, double tau) const {
    const double u = std::sqrt(tau);
    const double t = cheb.eval(q1, u);
    const double tu = cheb.eval(d1, u), pu = cheb.eval(d2, u);
    const double tuu = cheb.eval(dd1, u), puu = cheb.eval(dd2, u);
    const double k = 4.0 * u * flow.ricci_factor(tau);
    double r1 = tuu + k * tu, r2 = puu + k * pu;
    double metric2 = 1.0;
    if (model == Model::Sphere2) {
      r1 -= std::sin(t) * std::cos(t) * pu * pu;
      r2 += 2.0 * (std::cos(t) / std::sin(t)) * tu * pu;
      metric2 = std::sin(t) * std::sin(t);
    }
    const double scale = 1.0 / (2.0 * u * u);
    return std::sqrt(flow.scale(tau)) * scale * std::sqrt(r1 * r1 + metric2 * r2 * r2);
  }
};

// F(u) = int_{u1}^{u} 2 dv / c(v^2) = int dtau / (sqrt(tau) c).
double inverse_scale_sqrt_integral(const ScaleFlow& flow, double tau_a, double tau_b) {
  if (flow.law() == FlowLaw::ExactBackwardRicci) {
    const double c0 = flow.c0();
    if (flow.model() == Model::Torus2) return 2.0 * (std::sqrt(tau_b) - std::sqrt(tau_a)) / c0;
    const double beta = 2.0 * (n - 1);
    const double kappa = std::sqrt(beta / c0);
    return (2.0 / std::sqrt(c0 * beta)) *
           (std::atan(kappa * std::sqrt(tau_b)) - std::atan(kappa * std::sqrt(tau_a)));
  }
  return numerics::integrate(
      [&](double u) { return 2.0 / flow.scale(u * u); }, std::sqrt(tau_a), std::sqrt(tau_b));
}

// int sqrt(tau) R dtau.
double curvature_integral(const ScaleFlow& flow, double tau_a, double tau_b) {
  if (flow.model() == Model::Torus2) return 0.0;
  if (flow.law() == FlowLaw::ExactBackwardRicci) {
    const double c0 = flow.c0();
    const double beta = 2.0 * (n - 1);
    const double kappa = std::sqrt(beta / c0);
    auto antiderivative = [&](double u) {
      return n * (u - std::atan(kappa * u) / kappa);
    };
    return antiderivative(std::sqrt(tau_b)) - antiderivative(std::sqrt(tau_a));
  }
  return numerics::integrate(
      [&](double u) { return 2.0 * u * u * flow.scalar_curvature(u * u); }, std::sqrt(tau_a),
      std::sqrt(tau_b));
}

void newton_solve(Trace& tr, const ScaleFlow& flow) {
  const int N = tr.cheb.size();
  const int M = N - 2;  // interior unknowns per component
  if (M <= 0) return;
  const Eigen::MatrixXd& D = tr.cheb.D;
  const Eigen::MatrixXd D2 = D * D;
  const bool sphere = tr.model == Model::Sphere2;
  Eigen::VectorXd k(N);
  for (int i = 0; i < N; ++i) {
    const double u = tr.cheb.x[i];
    k[i] = 4.0 * u * flow.ricci_factor(u * u);
  }
  for (int iter = 0; iter < 30; ++iter) {
    tr.refresh_derivatives();
    Eigen::VectorXd R(2 * M);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * M, 2 * M);
    for (int r = 0; r < M; ++r) {
      const int i = r + 1;
      const double t = tr.q1[i];
      const double tu = tr.d1[i], pu = tr.d2[i];
      double r1 = (D2.row(i).dot(tr.q1)) + k[i] * tu;
      double r2 = (D2.row(i).dot(tr.q2)) + k[i] * pu;
      const double s = std::sin(t), c = std::cos(t);
      if (sphere) {
        r1 -= s * c * pu * pu;
        r2 += 2.0 * (c / s) * tu * pu;
      }
      R[r] = r1;
      R[M + r] = r2;
      for (int col = 0; col < M; ++col) {
        const int j = col + 1;
        double j11 = D2(i, j) + k[i] * D(i, j);
        double j12 = 0.0, j21 = 0.0;
        double j22 = D2(i, j) + k[i] * D(i, j);
        if (sphere) {
          j12 = -2.0 * s * c * pu * D(i, j);
          j21 = 2.0 * (c / s) * pu * D(i, j);
          j22 += 2.0 * (c / s) * tu * D(i, j);
          if (i == j) {
            j11 -= (c * c - s * s) * pu * pu;
            j21 -= 2.0 / (s * s) * tu * pu;
          }
        }
        J(r, col) = j11;
        J(r, M + col) = j12;
        J(M + r, col) = j21;
        J(M + r, M + col) = j22;
      }
    }
    const Eigen::VectorXd delta = J.partialPivLu().solve(-R);
    for (int r = 0; r < M; ++r) {
      tr.q1[r + 1] += delta[r];
      tr.q2[r + 1] += delta[M + r];
    }
    const double scale = 1.0 + std::max(tr.q1.cwiseAbs().maxCoeff(), tr.q2.cwiseAbs().maxCoeff());
    if (delta.cwiseAbs().maxCoeff() <= 1e-14 * scale) break;
  }
  tr.refresh_derivatives();
}

LPath build_samples(const ScaleFlow& flow, double tau1, double tau2, int panels,
                    std::function<Vec3(double)> position, std::function<Vec3(double)> velocity) {
  if (panels < 1) throw InvalidArgument("path needs at least one panel");
  LPath path;
  path.model = flow.model();
  path.panels = panels;
  const auto edges = panel_edges(tau1, tau2, panels);
  const auto& nodes = numerics::gauss_lobatto5().nodes;
  path.tau.reserve(4 * panels + 1);
  for (int p = 0; p < panels; ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (int k = 0; k < 4; ++k) path.tau.push_back(mid + half * nodes[k]);
  }
  path.tau.push_back(tau2);
  for (double t : path.tau) {
    const Vec3 pos = position(t);
    path.positions.push_back(pos);
    path.velocities.push_back(velocity(t));
    path.points.push_back(from_embedding(path.model, pos));
  }
  path.position_at = std::move(position);
  path.velocity_at = std::move(velocity);
  path.length = l_length(flow, path);
  return path;
}

}  // namespace

// ---------------------------------------------------------------- L-length

LPath sample_path(const ScaleFlow& flow, double tau1, double tau2,
                  std::function<Vec3(double)> position, std::function<Vec3(double)> velocity,
                  int panels) {
  require_positive_times(flow, tau1, tau2, "sample_path");
  return build_samples(flow, tau1, tau2, panels, std::move(position), std::move(velocity));
}

double l_length(const ScaleFlow& flow, const LPath& path) {
  if (path.tau.empty() || !(path.tau.front() > 0.0)) {
    throw DomainError("l_length: path must start at tau1 > 0");
  }
  std::vector<double> g(path.tau.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] = l_integrand(flow, path.model, path.tau[k], path.positions[k], path.velocities[k]);
  }
  return panel_quadrature(path, g);
}

double l_length_adaptive(const ScaleFlow& flow, const LPath& path) {
  if (path.tau.empty() || !(path.tau.front() > 0.0)) {
    throw DomainError("l_length: path must start at tau1 > 0");
  }
  double sum = 0.0;
  for (int p = 0; p < path.panels; ++p) {
    sum += numerics::integrate(
        [&](double t) {
          return l_integrand(flow, path.model, t, path.position_at(t), path.velocity_at(t));
        },
        path.tau[4 * p], path.tau[4 * p + 4], 1e-12);
  }
  return sum;
}

// ---------------------------------------------------------------- L-geodesics

LPath l_geodesic(const ScaleFlow& flow, const SamplePoint& x, double tau1, const SamplePoint& y,
                 double tau2, const LGeodesicOptions& options) {
  require_positive_times(flow, tau1, tau2, "l_geodesic");
  if (flow.law() != FlowLaw::ExactBackwardRicci) {
    throw InvalidArgument("l_geodesic: the geodesic equation assumes exact backward Ricci flow");
  }
  if (options.collocation < 2) throw InvalidArgument("l_geodesic: collocation needs >= 2 intervals");
  const double u1 = std::sqrt(tau1), u2 = std::sqrt(tau2);
  auto trace = std::make_shared<Trace>(Chebyshev(options.collocation, u1, u2));
  Trace& tr = *trace;
  tr.model = flow.model();
  const int N = tr.cheb.size();
  tr.q1.resize(N);
  tr.q2.resize(N);

  const double D = standard_distance(flow.model(), x, y);
  // fraction of the way along the spatial geodesic for the constrained minimizer
  const double F2 = inverse_scale_sqrt_integral(flow, tau1, tau2);
  auto fraction = [&](double u) { return inverse_scale_sqrt_integral(flow, tau1, u * u) / F2; };

  if (flow.model() == Model::Sphere2) {
    const Vec3 ex = embed(Model::Sphere2, x);
    const Vec3 ey = embed(Model::Sphere2, y);
    if (D > std::numbers::pi - options.geometry.cut_guard) {
      throw CutLocusError("l_geodesic: endpoints are (nearly) antipodal");
    }
    tr.a = ex;
    Vec3 b = ey - ey.dot(ex) * ex;
    if (b.norm() < 1e-300 || D == 0.0) {
      b = std::abs(ex.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
      b -= b.dot(ex) * ex;
    }
    tr.b = b.normalized();
    tr.pole = tr.a.cross(tr.b);
    for (int i = 0; i < N; ++i) {
      tr.q1[i] = 0.5 * std::numbers::pi;
      tr.q2[i] = D * fraction(tr.cheb.x[i]);
    }
  } else {
    tr.origin = embed(Model::Torus2, normalize(Model::Torus2, x));
    Eigen::Vector2d disp(0.0, 0.0);
    if (D > 0.0) {
      const ParallelFrames frames = parallel_frame(flow, tau1, x, y, options.geometry);
      const Vec3 t = frames.at_x[n - 1] * std::sqrt(flow.scale(tau1)) * D;
      disp = {t.x(), t.y()};
    }
    for (int i = 0; i < N; ++i) {
      const double f = fraction(tr.cheb.x[i]);
      tr.q1[i] = f * disp.x();
      tr.q2[i] = f * disp.y();
    }
  }
  newton_solve(tr, flow);

  LPath path = build_samples(
      flow, tau1, tau2, options.panels, [trace](double t) { return trace->position(t); },
      [trace](double t) { return trace->velocity(t); });
  double worst = 0.0;
  for (double t : path.tau) worst = std::max(worst, tr.residual(flow, t));
  for (double u : tr.cheb.x) worst = std::max(worst, tr.residual(flow, u * u));
  path.residual = worst;
  if (!(worst <= options.max_residual)) {
    std::ostringstream msg;
    msg << "l_geodesic: collocation residual " << worst << " exceeds " << options.max_residual;
    throw ConvergenceError(msg.str());
  }
  return path;
}

double l_distance(const ScaleFlow& flow, const SamplePoint& x, double tau1, const SamplePoint& y,
                  double tau2, const LGeodesicOptions& options) {
  return l_geodesic(flow, x, tau1, y, tau2, options).length;
}

QKernel::QKernel(const ScaleFlow& flow, double tau1, double tau2) : model_(flow.model()) {
  require_positive_times(flow, tau1, tau2, "QKernel");
  curvature_ = curvature_integral(flow, tau1, tau2);
  d2_weight_ = 1.0 / inverse_scale_sqrt_integral(flow, tau1, tau2);
}

double QKernel::operator()(const SamplePoint& x, const SamplePoint& y) const {
  return (*this)(standard_distance(model_, x, y));
}

// ---------------------------------------------------------------- Harnack

double harnack_K(const ScaleFlow& flow, const LPath& path) {
  std::vector<double> g(path.tau.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double t = path.tau[k];
    const double c = flow.scale(t);
    const double R = flow.scalar_curvature(t);
    const double speed2 = c * tangent_speed2(path.model, path.positions[k], path.velocities[k]);
    const double H = -flow.scalar_curvature_derivative(t) - R / t +
                     2.0 * flow.ricci_factor(t) * speed2;
    g[k] = std::pow(t, 1.5) * H;
  }
  return panel_quadrature(path, g);
}

double partL_residual(const ScaleFlow& flow, const SamplePoint& x, double tau1,
                      const SamplePoint& y, double tau2, double h,
                      const LGeodesicOptions& options) {
  if (!(h > 0.0) || h >= 0.5) throw InvalidArgument("partL_residual: need 0 < h < 0.5");
  const LPath path = l_geodesic(flow, x, tau1, y, tau2, options);
  auto Q = [&](double t1, double t2) { return l_distance(flow, x, t1, y, t2, options); };
  const double lhs = (Q(tau1 * (1 + h), tau2) - Q(tau1 * (1 - h), tau2)) / (2.0 * h) +
                     (Q(tau1, tau2 * (1 + h)) - Q(tau1, tau2 * (1 - h))) / (2.0 * h);
  const double rhs = 2.0 * std::pow(tau2, 1.5) * flow.scalar_curvature(tau2) -
                     2.0 * std::pow(tau1, 1.5) * flow.scalar_curvature(tau1) +
                     harnack_K(flow, path) - 0.5 * path.length;
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------- frames

FrameTransport frame_transport(const ScaleFlow& flow, const LPath& path, double tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  const bool sphere = path.model == Model::Sphere2;
  const double tau1 = path.tau.front();

  std::array<Vec3, n> start;
  if (sphere) {
    const Vec3 p = path.positions.front().normalized();
    Vec3 t = path.velocities.front() - path.velocities.front().dot(p) * p;
    if (t.norm() < 1e-12) {
      t = std::abs(p.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
      t -= t.dot(p) * p;
    }
    t.normalize();
    start = {p.cross(t), t};
  } else {
    start = {Vec3::UnitX(), Vec3::UnitY()};
  }
  const double norm0 = std::sqrt(tau1 / flow.scale(tau1));

  State y(3 * n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) y[3 * i + c] = norm0 * start[i][c];
  }
  auto rhs = [&](const State& s, State& ds, double t) {
    const double rate = -flow.ricci_factor(t) + 0.5 / t;
    Vec3 g = Vec3::Zero(), gv = Vec3::Zero();
    if (sphere) {
      g = path.position_at(t).normalized();
      gv = path.velocity_at(t);
    }
    for (int i = 0; i < n; ++i) {
      const Vec3 Y(s[3 * i], s[3 * i + 1], s[3 * i + 2]);
      Vec3 dY = rate * Y;
      if (sphere) dY -= Y.dot(gv) * g;
      for (int c = 0; c < 3; ++c) ds[3 * i + c] = dY[c];
    }
  };

  FrameTransport out;
  out.tau = path.tau;
  for (auto& f : out.frames) f.reserve(path.tau.size());
  auto observer = [&](const State& s, double) {
    for (int i = 0; i < n; ++i) out.frames[i].emplace_back(s[3 * i], s[3 * i + 1], s[3 * i + 2]);
  };
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol);
  odeint::integrate_times(stepper, rhs, y, path.tau.begin(), path.tau.end(),
                          (path.tau[1] - path.tau[0]) * 0.1, observer);

  for (std::size_t k = 0; k < out.tau.size(); ++k) {
    const double t = out.tau[k];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double g = metric_inner(flow, t, out.frames[i][k], out.frames[j][k]);
        out.invariant_error = std::max(out.invariant_error, std::abs(g - (i == j ? t : 0.0)));
      }
    }
  }
  return out;
}

SummedVariationReport summed_variation_check(const ScaleFlow& flow, const SamplePoint& x,
                                             double tau1, const SamplePoint& y, double tau2,
                                             double h, double tolerance,
                                             const LGeodesicOptions& options) {
  if (!(h > 0.0)) throw InvalidArgument("summed_variation_check: h must be positive");
  const LPath path = l_geodesic(flow, x, tau1, y, tau2, options);
  const FrameTransport frames = frame_transport(flow, path);
  const QKernel Q(flow, tau1, tau2);
  const double q0 = Q(x, y);

  SummedVariationReport report;
  report.tolerance = tolerance;
  for (int i = 0; i < n; ++i) {
    const Vec3& y1 = frames.frames[i].front();
    const Vec3& y2 = frames.frames[i].back();
    double second = -2.0 * q0;
    for (double sign : {1.0, -1.0}) {
      const SamplePoint xr = exp_std(flow.model(), x, sign * h * y1);
      const SamplePoint yr = exp_std(flow.model(), y, sign * h * y2);
      second += Q(xr, yr);
    }
    report.lhs += second / (h * h);
  }
  const double dsq = std::sqrt(tau2) - std::sqrt(tau1);
  report.rhs = n * dsq -
               (2.0 * std::pow(tau2, 1.5) * flow.scalar_curvature(tau2) -
                2.0 * std::pow(tau1, 1.5) * flow.scalar_curvature(tau1)) -
               harnack_K(flow, path);
  report.pass = report.lhs <= report.rhs + tolerance;
  return report;
}

// ---------------------------------------------------------------- V and Theta

CostMatrix q_table(const ScaleFlow& flow, const PointCloud& cloud, double tau1, double tau2) {
  const QKernel Q(flow, tau1, tau2);
  const auto size = static_cast<Eigen::Index>(cloud.size());
  CostMatrix C(size, size);
  numerics::parallel_for(cloud.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Q(cloud.points[i], cloud.points[j]);
    }
  });
  return C;
}

LWassersteinResult l_wasserstein(const CostMatrix& q, const DiscreteMeasure& nu1,
                                 const DiscreteMeasure& nu2) {
  const ExactSolution sol = solve_exact(q, nu1, nu2);
  return {sol.value, duality_gap(q, sol.plan, sol.potentials, nu1, nu2)};
}

LWassersteinResult l_wasserstein(const ScaleFlow& flow, const PointCloud& cloud,
                                 const DiscreteMeasure& nu1, double tau1,
                                 const DiscreteMeasure& nu2, double tau2) {
  return l_wasserstein(q_table(flow, cloud, tau1, tau2), nu1, nu2);
}

double LClock::tau1(double s) const { return bar_tau1 * std::exp(s); }
double LClock::tau2(double s) const { return bar_tau2 * std::exp(s); }
double LClock::tau(int which, double s) const {
  if (which != 0 && which != 1) throw InvalidArgument("LClock: clock index must be 0 or 1");
  return which == 0 ? tau1(s) : tau2(s);
}

void LClock::validate(const ScaleFlow& flow) const {
  if (!(bar_tau1 > 0.0) || !(bar_tau2 > bar_tau1) || !(s_hi >= s_lo)) {
    throw InvalidArgument("LClock: need 0 < bar_tau1 < bar_tau2 and s_lo <= s_hi");
  }
  for (double s : {s_lo, s_hi}) {
    flow.require_in_domain(tau1(s), "LClock");
    flow.require_in_domain(tau2(s), "LClock");
  }
}

double theta_from_v(double V, double tau1, double tau2) {
  const double dsq = std::sqrt(tau2) - std::sqrt(tau1);
  return 2.0 * dsq * V - 2.0 * n * dsq * dsq;
}

ThetaSample theta(const ScaleFlow& flow, const LClock& clock, const SpectralDensity& u1,
                  const SpectralDensity& u2, double s, const PointCloud& cloud) {
  clock.validate(flow);
  if (s < clock.s_lo - 1e-12 || s > clock.s_hi + 1e-12) {
    throw DomainError("theta: s outside the clock range");
  }
  ThetaSample out;
  out.s = s;
  out.tau1 = clock.tau1(s);
  out.tau2 = clock.tau2(s);
  const SpectralDensity v1 = evolve_conjugate(flow, u1, u1.clock, out.tau1);
  const SpectralDensity v2 = evolve_conjugate(flow, u2, u2.clock, out.tau2);
  const DiscreteMeasure m1 = density_values(v1, cloud, flow, out.tau1);
  const DiscreteMeasure m2 = density_values(v2, cloud, flow, out.tau2);
  out.mass_defect = std::max(m1.mass_defect, m2.mass_defect);
  const LWassersteinResult V = l_wasserstein(flow, cloud, m1, out.tau1, m2, out.tau2);
  out.V = V.value;
  out.solver_gap = V.duality_gap;
  out.delta_sqrt_tau = std::sqrt(out.tau2) - std::sqrt(out.tau1);
  out.theta = theta_from_v(out.V, out.tau1, out.tau2);
  return out;
}

ScalarField evolve_dual_lclock(const ScaleFlow& flow, const ScalarField& f, const LClock& clock,
                               int which, double s_from, double s_to) {
  if (s_to > s_from) throw DomainError("evolve_dual_lclock: need s_to <= s_from");
  // tau(s) ds = dtau, so the clock equation is the backward heat equation in tau.
  return evolve_dual(flow, f, clock.tau(which, s_from), clock.tau(which, s_to));
}

}  // namespace ricciot
