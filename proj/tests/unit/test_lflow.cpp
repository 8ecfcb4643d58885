#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ricciot/errors.hpp"
#include "ricciot/lflow.hpp"

using namespace ricciot;
using std::numbers::pi;

namespace {

ScaleFlow sphere() { return ScaleFlow::backward_ricci(Model::Sphere2, 1.0, 0.0, {0.0, 3.0}); }
ScaleFlow torus() { return ScaleFlow::backward_ricci(Model::Torus2, 1.0, 0.0, {0.0, 3.0}); }

template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

Vec3 ambient(const SamplePoint& x) {
  return {std::sin(x.p) * std::cos(x.q), std::sin(x.p) * std::sin(x.q), std::cos(x.p)};
}

}  // namespace

TEST_CASE("torus L-distance is the scaled squared distance") {
  const ScaleFlow t = torus();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0), tt(0.1, 2.9);
  int tested = 0;
  while (tested < 50) {
    const SamplePoint x{u(rng), u(rng)}, y{u(rng), u(rng)};
    double t1 = tt(rng), t2 = tt(rng);
    if (std::abs(t1 - t2) < 0.05) continue;
    if (t1 > t2) std::swap(t1, t2);
    double Q;
    try {
      Q = l_distance(t, x, t1, y, t2);
    } catch (const CutLocusError&) {
      continue;
    }
    const double D = standard_distance(Model::Torus2, x, y);
    const double expected = D * D / (2 * (std::sqrt(t2) - std::sqrt(t1)));
    CHECK(std::abs(Q - expected) <= 1e-6 * std::max(1.0, expected));
    CHECK(QKernel(t, t1, t2)(x, y) == doctest::Approx(expected).epsilon(1e-12));
    ++tested;
  }
}

TEST_CASE("constant paths") {
  const ScaleFlow s = sphere();
  const double t1 = 0.2, t2 = 1.7;
  const Vec3 p = ambient({0.9, 0.4});
  const LPath path = sample_path(s, t1, t2, [&](double) { return p; }, [](double) { return Vec3::Zero(); });
  CHECK(path.tau.size() == 4 * 64 + 1);
  const double L = simpson([&](double t) { return std::sqrt(t) * 2.0 / s.scale(t); }, t1, t2);
  CHECK(l_length(s, path) == doctest::Approx(L).epsilon(1e-10));
  CHECK(path.length == doctest::Approx(L).epsilon(1e-10));
  // R = 2 / (1 + 2 tau), R' = -4 / (1 + 2 tau)^2
  const double K = simpson(
      [](double t) {
        const double c = 1 + 2 * t;
        return std::pow(t, 1.5) * (4.0 / (c * c) - 2.0 / (c * t));
      },
      t1, t2);
  CHECK(harnack_K(s, path) == doctest::Approx(K).epsilon(1e-10));
  CHECK(QKernel(s, t1, t2).curvature_term() == doctest::Approx(L).epsilon(1e-10));

  const ScaleFlow t = torus();
  const LPath flat = sample_path(t, t1, t2, [](double) { return Vec3(0.3, 0.3, 0.0); }, [](double) { return Vec3::Zero(); });
  CHECK(l_length(t, flat) == 0.0);
  CHECK(harnack_K(t, flat) == 0.0);
}

TEST_CASE("sample and adaptive lengths agree") {
  const ScaleFlow s = sphere();
  // uniform-speed meridian in tau
  auto pos = [](double t) { return ambient({0.3 + 0.5 * t, 0.0}); };
  auto vel = [](double t) {
    const double th = 0.3 + 0.5 * t;
    return Vec3(0.5 * std::cos(th), 0.0, -0.5 * std::sin(th));
  };
  const LPath path = sample_path(s, 0.1, 2.0, pos, vel);
  CHECK(l_length(s, path) == doctest::Approx(l_length_adaptive(s, path)).epsilon(1e-10));
  const double L = simpson([&](double t) { return std::sqrt(t) * (2.0 / s.scale(t) + s.scale(t) * 0.25); }, 0.1, 2.0);
  CHECK(l_length(s, path) == doctest::Approx(L).epsilon(1e-10));
}

TEST_CASE("sphere L-geodesics") {
  const ScaleFlow s = sphere();
  const std::vector<std::array<double, 6>> cases = {
      {0.3, 0.0, 1.2, 0.5, 0.2, 1.0}, {1.0, 1.0, 2.0, 2.5, 0.5, 2.5}, {0.1, 0.0, 0.1, 2.0, 0.05, 0.3},
      {2.0, 0.3, 1.2, 4.0, 1.0, 1.2}};
  for (const auto& c : cases) {
    const SamplePoint x{c[0], c[1]}, y{c[2], c[3]};
    const LPath g = l_geodesic(s, x, c[4], y, c[5]);
    CHECK(g.residual <= 1e-6);
    CHECK((g.positions.front() - ambient(x)).norm() < 1e-12);
    CHECK((g.positions.back() - ambient(y)).norm() < 1e-12);
    const double Q = QKernel(s, c[4], c[5])(x, y);
    CHECK(g.length == doctest::Approx(Q).epsilon(1e-7));
    // any other curve is longer: the spatial geodesic at constant speed in tau
    const Vec3 a = ambient(x), b = ambient(y);
    const double ang = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
    const Vec3 w = (b - a.dot(b) * a).normalized();
    auto pos = [&](double t) { const double th = ang * (t - c[4]) / (c[5] - c[4]); return Vec3(std::cos(th) * a + std::sin(th) * w); };
    auto vel = [&](double t) {
      const double th = ang * (t - c[4]) / (c[5] - c[4]), k = ang / (c[5] - c[4]);
      return Vec3(k * (-std::sin(th) * a + std::cos(th) * w));
    };
    CHECK(l_length(s, sample_path(s, c[4], c[5], pos, vel)) >= g.length - 1e-9);
  }
  CHECK_THROWS_AS(l_geodesic(s, {0.0, 0.0}, 0.5, {pi - 0.01, 0.0}, 1.0), CutLocusError);
  const ScaleFlow user = ScaleFlow::user_scale(Model::Sphere2, {0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0}, 0.0);
  CHECK_THROWS_AS(l_geodesic(user, {0.3, 0.0}, 0.5, {1.0, 0.0}, 1.0), InvalidArgument);
}

TEST_CASE("scaled frame transport") {
  const ScaleFlow s = sphere();
  const LPath g = l_geodesic(s, {0.4, 0.1}, 0.3, {1.3, 1.9}, 1.6);
  const FrameTransport fr = frame_transport(s, g);
  CHECK(fr.invariant_error <= 1e-8);
  for (int i = 0; i < kDim; ++i) CHECK(fr.frames[i].size() == g.tau.size());

  const ScaleFlow t = torus();
  const LPath h = l_geodesic(t, {0.1, 0.1}, 0.4, {0.3, 0.25}, 2.0);
  const FrameTransport ft = frame_transport(t, h);
  CHECK(ft.invariant_error <= 1e-8);
  for (int i = 0; i < kDim; ++i) {
    CHECK(ft.frames[i][0].norm() == doctest::Approx(std::sqrt(0.4)).epsilon(1e-12));
    for (std::size_t k = 0; k < h.tau.size(); k += 17) {
      const Vec3 expected = ft.frames[i][0] * std::sqrt(h.tau[k] / 0.4);
      CHECK((ft.frames[i][k] - expected).norm() <= 1e-9);
    }
  }
}

TEST_CASE("time-scaling identity for the L-distance") {
  for (const ScaleFlow& f : {sphere(), torus()}) {
    const SamplePoint x = f.model() == Model::Sphere2 ? SamplePoint{0.5, 0.2} : SamplePoint{0.2, 0.3};
    const SamplePoint y = f.model() == Model::Sphere2 ? SamplePoint{1.4, 1.0} : SamplePoint{0.45, 0.4};
    const double r1 = partL_residual(f, x, 0.4, y, 1.3, 1e-3);
    const double r2 = partL_residual(f, x, 0.4, y, 1.3, 5e-4);
    CHECK(r2 <= 1e-6);
    const double slope = std::log(r1 / r2) / std::log(2.0);
    CHECK(slope >= 1.8);
    CHECK(slope <= 2.2);
  }
}

TEST_CASE("summed second variation of Q") {
  for (const ScaleFlow& f : {sphere(), torus()}) {
    const SamplePoint x = f.model() == Model::Sphere2 ? SamplePoint{0.6, 0.2} : SamplePoint{0.2, 0.3};
    const SamplePoint y = f.model() == Model::Sphere2 ? SamplePoint{1.2, 0.9} : SamplePoint{0.45, 0.4};
    const SummedVariationReport r = summed_variation_check(f, x, 0.5, y, 1.2, 1e-3);
    CHECK(r.pass);
    CHECK(r.lhs <= r.rhs + r.tolerance);
  }
}

TEST_CASE("L-Wasserstein distance") {
  const ScaleFlow t = torus();
  const PointCloud cloud = torus_cloud(8, 8);
  const std::size_t a = 3, b = 42;
  const auto da = DiscreteMeasure::dirac(cloud.size(), a), db = DiscreteMeasure::dirac(cloud.size(), b);
  const LWassersteinResult v = l_wasserstein(t, cloud, da, 0.5, db, 1.5);
  CHECK(v.value == doctest::Approx(QKernel(t, 0.5, 1.5)(cloud.points[a], cloud.points[b])).epsilon(1e-13));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiscreteMeasure m1, m2;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    m1.weights.push_back(u(rng));
    m2.weights.push_back(u(rng));
  }
  double s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) s1 += m1.weights[i], s2 += m2.weights[i];
  for (std::size_t i = 0; i < cloud.size(); ++i) m1.weights[i] /= s1, m2.weights[i] /= s2;
  const double w2 = wasserstein_p(t, 0.0, cloud, m1, m2, 2.0);
  const LWassersteinResult lw = l_wasserstein(t, cloud, m1, 0.5, m2, 1.5);
  CHECK(lw.value == doctest::Approx(w2 * w2 / (2 * (std::sqrt(1.5) - std::sqrt(0.5)))).epsilon(1e-10));
  CHECK(std::abs(lw.duality_gap) <= 1e-10);

  const ScaleFlow s = sphere();
  const PointCloud sc = sphere_cloud(6, 10);
  const CostMatrix q = q_table(s, sc, 0.5, 1.5);
  const QKernel k(s, 0.5, 1.5);
  for (std::size_t i = 0; i < sc.size(); i += 7)
    for (std::size_t j = 0; j < sc.size(); j += 5) CHECK(q(i, j) == doctest::Approx(k(sc.points[i], sc.points[j])).epsilon(1e-14));
  const double direct = l_distance(s, sc.points[8], 0.5, sc.points[33], 1.5);
  CHECK(q(8, 33) == doctest::Approx(direct).epsilon(1e-7));
}

TEST_CASE("Theta") {
  CHECK(theta_from_v(0.0, 0.5, 2.0) == doctest::Approx(-4 * std::pow(std::sqrt(2.0) - std::sqrt(0.5), 2)).epsilon(1e-15));
  const ScaleFlow t = torus();
  LClock clock;
  clock.s_hi = 0.5;
  const SpectralDensity u = density_from_mixture(t, 0.0, {{0.4, 0.4, 20.0, 1.0}}, 8);
  const ThetaSample th = theta(t, clock, u, u, 0.3, torus_cloud(12, 12));
  const double dst = std::sqrt(th.tau2) - std::sqrt(th.tau1);
  CHECK(th.tau1 == doctest::Approx(0.5 * std::exp(0.3)).epsilon(1e-15));
  CHECK(th.tau2 == doctest::Approx(std::exp(0.3)).epsilon(1e-15));
  CHECK(th.delta_sqrt_tau == doctest::Approx(dst).epsilon(1e-15));
  // u1 and u2 evolve to different times, but on the static torus only the spread differs
  CHECK(th.V >= 0.0);
  CHECK(th.theta == doctest::Approx(2 * dst * th.V - 4 * dst * dst).epsilon(1e-12));

  LClock bad;
  bad.bar_tau1 = 1.0;
  bad.bar_tau2 = 0.5;
  CHECK_THROWS_AS(bad.validate(t), InvalidArgument);
  LClock far;
  far.s_hi = 5.0;
  CHECK_THROWS_AS(far.validate(t), DomainError);
}

TEST_CASE("backward heat flow in the clock variable") {
  const ScaleFlow s = sphere();
  LClock clock;
  clock.s_hi = 1.0;
  SpectralField f = SpectralField::zeros(Model::Sphere2, 6, clock.tau2(1.0));
  for (int l = 0; l <= 6; ++l) f.legendre[l] = 1.0 / (1 + l);
  const ScalarField out = evolve_dual_lclock(s, ScalarField(f), clock, 1, 1.0, 0.2);
  CHECK(out.clock == doctest::Approx(clock.tau2(0.2)).epsilon(1e-15));
  for (int l = 0; l <= 6; ++l) {
    const double lambda = l * (l + 1.0);
    // RK4 on da/ds = tau(s) lambda / c(tau(s)) a, integrated from s = 1 down to 0.2
    auto rhs = [&](double sv, double a) { const double tv = clock.tau2(sv); return tv * lambda / s.scale(tv) * a; };
    double a = f.legendre[l], sv = 1.0;
    const int steps = 4000;
    const double h = -0.8 / steps;
    for (int k = 0; k < steps; ++k) {
      const double k1 = rhs(sv, a), k2 = rhs(sv + h / 2, a + h / 2 * k1), k3 = rhs(sv + h / 2, a + h / 2 * k2), k4 = rhs(sv + h, a + h * k3);
      a += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      sv += h;
    }
    CHECK(out.legendre[l] == doctest::Approx(a).epsilon(1e-10));
  }
}
