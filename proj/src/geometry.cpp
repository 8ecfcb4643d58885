#include "ricciot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>
// pchip.hpp in Boost 1.74 calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "ricciot/errors.hpp"
#include "ricciot/numerics.hpp"

namespace ricciot {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_unit(double v) {
  double r = v - std::floor(v);
  if (r >= 1.0) r = 0.0;
  return r;
}

struct TorusDisplacement {
  Eigen::Vector2d best;
  double best_length;
  double runner_up_length;
};

TorusDisplacement torus_displacement(const SamplePoint& x, const SamplePoint& y) {
  const double dx = wrap_unit(y.p) - wrap_unit(x.p);
  const double dy = wrap_unit(y.q) - wrap_unit(x.q);
  TorusDisplacement out{{0.0, 0.0}, std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity()};
  for (int mx = -1; mx <= 1; ++mx) {
    for (int my = -1; my <= 1; ++my) {
      const Eigen::Vector2d v(dx + mx, dy + my);
      const double len = v.norm();
      if (len < out.best_length) {
        out.runner_up_length = out.best_length;
        out.best_length = len;
        out.best = v;
      } else if (len < out.runner_up_length) {
        out.runner_up_length = len;
      }
    }
  }
  return out;
}

double sphere_angle(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace

std::string to_string(Model model) {
  return model == Model::Sphere2 ? "sphere" : "torus";
}

Model model_from_string(const std::string& name) {
  if (name == "sphere" || name == "Sphere2" || name == "S2") return Model::Sphere2;
  if (name == "torus" || name == "Torus2" || name == "T2") return Model::Torus2;
  throw InvalidArgument("unknown model '" + name + "'");
}

// ---------------------------------------------------------------- ScaleFlow

struct ScaleFlow::Interpolant {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

ScaleFlow ScaleFlow::backward_ricci(Model model, double c0, double K, Interval domain,
                                    bool declared_super_ricci) {
  ScaleFlow flow;
  flow.model_ = model;
  flow.law_ = FlowLaw::ExactBackwardRicci;
  flow.c0_ = c0;
  flow.K_ = K;
  flow.domain_ = domain;
  flow.declared_ = declared_super_ricci;
  flow.validate();
  return flow;
}

ScaleFlow ScaleFlow::user_scale(Model model, std::vector<double> tau,
                                std::vector<double> scale, double K,
                                bool declared_super_ricci) {
  if (tau.size() != scale.size() || tau.size() < 4) {
    throw InvalidArgument("user_scale: need at least four (tau, c) samples");
  }
  if (!std::is_sorted(tau.begin(), tau.end()) ||
      std::adjacent_find(tau.begin(), tau.end()) != tau.end()) {
    throw InvalidArgument("user_scale: tau samples must be strictly increasing");
  }
  ScaleFlow flow;
  flow.model_ = model;
  flow.law_ = FlowLaw::UserScale;
  flow.c0_ = scale.front();
  flow.K_ = K;
  flow.domain_ = {tau.front(), tau.back()};
  flow.declared_ = declared_super_ricci;
  flow.sample_tau_ = tau;
  flow.sample_scale_ = scale;
  flow.interp_ = std::make_shared<Interpolant>(
      Interpolant{boost::math::interpolators::pchip<std::vector<double>>(
          std::move(tau), std::move(scale))});
  flow.validate();
  return flow;
}

void ScaleFlow::validate() const {
  if (!(domain_.lo >= 0.0) || !(domain_.hi > domain_.lo)) {
    throw InvalidArgument("flow domain must satisfy 0 <= tau_a < tau_b");
  }
  if (!(c0_ > 0.0)) throw InvalidArgument("flow scale c0 must be positive");

  std::vector<double> grid;
  constexpr int kChecks = 64;
  for (int k = 0; k <= kChecks; ++k) {
    grid.push_back(domain_.lo + (domain_.hi - domain_.lo) * k / kChecks);
  }
  grid.insert(grid.end(), sample_tau_.begin(), sample_tau_.end());
  for (double t : grid) {
    if (!(scale(t) > 0.0)) {
      std::ostringstream msg;
      msg << "flow scale is not positive at tau = " << t;
      throw InvalidArgument(msg.str());
    }
    if (declared_ && super_ricci_margin(*this, t) < -1e-12) {
      std::ostringstream msg;
      msg << "flow declared " << K_ << "-super-Ricci but the margin is "
          << super_ricci_margin(*this, t) << " at tau = " << t;
      throw InvalidArgument(msg.str());
    }
  }
}

void ScaleFlow::require_in_domain(double tau, const char* where) const {
  if (!std::isfinite(tau) || !domain_.contains(tau)) {
    std::ostringstream msg;
    msg << where << ": tau = " << tau << " outside flow domain [" << domain_.lo << ", "
        << domain_.hi << "]";
    throw DomainError(msg.str());
  }
}

double ScaleFlow::scale(double tau) const {
  if (law_ == FlowLaw::UserScale) {
    return interp_->spline(std::clamp(tau, domain_.lo, domain_.hi));
  }
  return model_ == Model::Sphere2 ? c0_ + 2.0 * (kDim - 1) * tau : c0_;
}

double ScaleFlow::scale_derivative(double tau) const {
  if (law_ == FlowLaw::UserScale) {
    return interp_->spline.prime(std::clamp(tau, domain_.lo, domain_.hi));
  }
  return model_ == Model::Sphere2 ? 2.0 * (kDim - 1) : 0.0;
}

double ScaleFlow::ricci_factor(double tau) const {
  return model_ == Model::Sphere2 ? (kDim - 1) / scale(tau) : 0.0;
}

double ScaleFlow::scalar_curvature(double tau) const { return kDim * ricci_factor(tau); }

double ScaleFlow::scalar_curvature_derivative(double tau) const {
  if (model_ == Model::Torus2) return 0.0;
  const double c = scale(tau);
  return -kDim * (kDim - 1) * scale_derivative(tau) / (c * c);
}

double ScaleFlow::inverse_scale_integral(double a, double b) const {
  if (law_ == FlowLaw::ExactBackwardRicci) {
    if (model_ == Model::Torus2) return (b - a) / c0_;
    return std::log(scale(b) / scale(a)) / (2.0 * (kDim - 1));
  }
  return numerics::integrate([this](double s) { return 1.0 / scale(s); }, a, b, 1e-14);
}

// ---------------------------------------------------------------- clouds

PointCloud sphere_cloud(int n_lat, int n_lon) {
  if (n_lat < 1 || n_lon < 1) throw InvalidArgument("sphere_cloud: sizes must be positive");
  const auto rule = numerics::gauss_legendre(n_lat);
  PointCloud cloud;
  cloud.model = Model::Sphere2;
  for (int i = 0; i < n_lat; ++i) {
    const double theta = std::acos(rule.nodes[i]);
    const double offset = (i % 2 == 0) ? 0.0 : kPi / n_lon;
    for (int j = 0; j < n_lon; ++j) {
      cloud.points.push_back({theta, 2.0 * kPi * j / n_lon + offset});
      cloud.weights.push_back(rule.weights[i] * 2.0 * kPi / n_lon);
    }
  }
  return cloud;
}

namespace {
int divisor_near(int n, double target) {
  int best = 1;
  for (int d = 1; d <= n; ++d) {
    if (n % d == 0 && std::abs(d - target) < std::abs(best - target)) best = d;
  }
  return best;
}
}  // namespace

PointCloud sphere_cloud(int n_points) {
  if (n_points < 1) throw InvalidArgument("sphere_cloud: N must be positive");
  const int n_lat = divisor_near(n_points, std::sqrt(n_points / 2.0));
  return sphere_cloud(n_lat, n_points / n_lat);
}

PointCloud torus_cloud(int nx, int ny) {
  if (nx < 1 || ny < 1) throw InvalidArgument("torus_cloud: sizes must be positive");
  PointCloud cloud;
  cloud.model = Model::Torus2;
  const double w = 1.0 / (static_cast<double>(nx) * ny);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      cloud.points.push_back({(i + 0.5) / nx, (j + 0.5) / ny});
      cloud.weights.push_back(w);
    }
  }
  return cloud;
}

PointCloud torus_cloud(int n_points) {
  if (n_points < 1) throw InvalidArgument("torus_cloud: N must be positive");
  const int nx = divisor_near(n_points, std::sqrt(static_cast<double>(n_points)));
  return torus_cloud(nx, n_points / nx);
}

PointCloud make_cloud(Model model, int n_points) {
  return model == Model::Sphere2 ? sphere_cloud(n_points) : torus_cloud(n_points);
}

// ---------------------------------------------------------------- helpers

Vec3 embed(Model model, const SamplePoint& x) {
  if (model == Model::Torus2) return {x.p, x.q, 0.0};
  const double s = std::sin(x.p);
  return {s * std::cos(x.q), s * std::sin(x.q), std::cos(x.p)};
}

SamplePoint from_embedding(Model model, const Vec3& v) {
  if (model == Model::Torus2) return {wrap_unit(v.x()), wrap_unit(v.y())};
  const Vec3 u = v.normalized();
  double phi = std::atan2(u.y(), u.x());
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  return {std::acos(std::clamp(u.z(), -1.0, 1.0)), phi};
}

SamplePoint normalize(Model model, const SamplePoint& x) {
  if (model == Model::Torus2) return {wrap_unit(x.p), wrap_unit(x.q)};
  return from_embedding(model, embed(model, x));
}

SamplePoint exp_std(Model model, const SamplePoint& x, const Vec3& v) {
  if (model == Model::Torus2) return {wrap_unit(x.p + v.x()), wrap_unit(x.q + v.y())};
  const Vec3 base = embed(model, x);
  const Vec3 tangent = v - v.dot(base) * base;
  const double len = tangent.norm();
  if (len == 0.0) return x;
  return from_embedding(model, std::cos(len) * base + std::sin(len) * (tangent / len));
}

double standard_distance(Model model, const SamplePoint& x, const SamplePoint& y) {
  if (model == Model::Torus2) return torus_displacement(x, y).best_length;
  return sphere_angle(embed(model, x), embed(model, y));
}

// ---------------------------------------------------------------- operations

double metric_scale(const ScaleFlow& flow, double tau) {
  flow.require_in_domain(tau, "metric_scale");
  return flow.scale(tau);
}

double metric_scale_derivative(const ScaleFlow& flow, double tau) {
  flow.require_in_domain(tau, "metric_scale_derivative");
  return flow.scale_derivative(tau);
}

double distance(const ScaleFlow& flow, double tau, const SamplePoint& x,
                const SamplePoint& y) {
  return std::sqrt(flow.scale(tau)) * standard_distance(flow.model(), x, y);
}

double super_ricci_margin(const ScaleFlow& flow, double tau) {
  const double c = flow.scale(tau);
  const double dc = flow.scale_derivative(tau);
  const double curvature = flow.model() == Model::Sphere2 ? 2.0 * (kDim - 1) : 0.0;
  return -dc + curvature - 2.0 * flow.K() * c;
}

namespace {

struct SphereSegment {
  Vec3 x, y;
  double angle;
};

SphereSegment sphere_segment(const SamplePoint& x, const SamplePoint& y,
                             const GeometryOptions& options) {
  SphereSegment seg{embed(Model::Sphere2, x), embed(Model::Sphere2, y), 0.0};
  seg.angle = sphere_angle(seg.x, seg.y);
  if (seg.angle > kPi - options.cut_guard) {
    std::ostringstream msg;
    msg << "points at angle " << seg.angle << " are within the cut-locus guard "
        << options.cut_guard;
    throw CutLocusError(msg.str());
  }
  return seg;
}

Eigen::Vector2d torus_segment(const SamplePoint& x, const SamplePoint& y,
                              const GeometryOptions& options) {
  const auto disp = torus_displacement(x, y);
  if (disp.runner_up_length - disp.best_length < options.cut_guard) {
    std::ostringstream msg;
    msg << "torus pair has two near-minimal lattice translates (gap "
        << disp.runner_up_length - disp.best_length << ")";
    throw CutLocusError(msg.str());
  }
  return disp.best;
}

}  // namespace

SamplePoint geodesic_point(const ScaleFlow& flow, double tau, const SamplePoint& x,
                           const SamplePoint& y, double t, const GeometryOptions& options) {
  flow.require_in_domain(tau, "geodesic_point");
  if (t == 0.0) return normalize(flow.model(), x);
  if (t == 1.0) return normalize(flow.model(), y);
  if (flow.model() == Model::Torus2) {
    const Eigen::Vector2d d = torus_segment(x, y, options);
    return {wrap_unit(x.p + t * d.x()), wrap_unit(x.q + t * d.y())};
  }
  const SphereSegment seg = sphere_segment(x, y, options);
  if (seg.angle == 0.0) return normalize(flow.model(), x);
  const double s = std::sin(seg.angle);
  const Vec3 p = (std::sin((1.0 - t) * seg.angle) / s) * seg.x +
                 (std::sin(t * seg.angle) / s) * seg.y;
  return from_embedding(Model::Sphere2, p);
}

ParallelFrames parallel_frame(const ScaleFlow& flow, double tau, const SamplePoint& x,
                              const SamplePoint& y, const GeometryOptions& options) {
  flow.require_in_domain(tau, "parallel_frame");
  const double unit = 1.0 / std::sqrt(flow.scale(tau));
  ParallelFrames frames;
  if (flow.model() == Model::Torus2) {
    const Eigen::Vector2d d = torus_segment(x, y, options);
    if (d.norm() == 0.0) throw InvalidArgument("parallel_frame: coincident points");
    const Eigen::Vector2d t = d.normalized();
    const Vec3 tangent(t.x(), t.y(), 0.0);
    const Vec3 normal(-t.y(), t.x(), 0.0);
    frames.at_x = {unit * normal, unit * tangent};
    frames.at_y = frames.at_x;
    return frames;
  }
  const SphereSegment seg = sphere_segment(x, y, options);
  if (seg.angle == 0.0) throw InvalidArgument("parallel_frame: coincident points");
  const Vec3 normal = seg.x.cross(seg.y).normalized();
  const Vec3 tangent_x = (seg.y - std::cos(seg.angle) * seg.x).normalized();
  const Vec3 tangent_y = (std::cos(seg.angle) * seg.y - seg.x).normalized();
  frames.at_x = {unit * normal, unit * tangent_x};
  frames.at_y = {unit * normal, unit * tangent_y};
  return frames;
}

double metric_inner(const ScaleFlow& flow, double tau, const Vec3& a, const Vec3& b) {
  return flow.scale(tau) * a.dot(b);
}

}  // namespace ricciot
