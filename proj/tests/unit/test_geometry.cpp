#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ricciot/errors.hpp"
#include "ricciot/geometry.hpp"

using namespace ricciot;
using std::numbers::pi;

namespace {

ScaleFlow sphere_ricci(double c0 = 1.0, double K = 0.0) {
  return ScaleFlow::backward_ricci(Model::Sphere2, c0, K, {0.0, 2.0});
}

// Classical RK4 for a scalar ODE y' = f(t, y).
template <class F>
double rk4(F f, double y, double t0, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(t, y);
    const double k2 = f(t + h / 2, y + h / 2 * k1);
    const double k3 = f(t + h / 2, y + h / 2 * k2);
    const double k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return y;
}

SamplePoint random_point(Model model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (model == Model::Torus2) return {u(rng), u(rng)};
  return {std::acos(1.0 - 2.0 * u(rng)), 2.0 * pi * u(rng)};
}

}  // namespace

TEST_CASE("scale of the exact backward Ricci flow") {
  const ScaleFlow s = sphere_ricci();
  CHECK(metric_scale(s, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  const double integrated = rk4([](double, double) { return 2.0 * (kDim - 1); }, 1.0, 0.0, 0.5, 20);
  CHECK(std::abs(metric_scale(s, 0.5) - integrated) < 1e-13);
  CHECK(metric_scale(s, 0.0) == 1.0);

  const ScaleFlow t = ScaleFlow::backward_ricci(Model::Torus2, 3.0, 0.0, {0.0, 5.0});
  for (double tau : {0.0, 1.3, 5.0}) CHECK(metric_scale(t, tau) == 3.0);
  CHECK(metric_scale_derivative(t, 2.0) == 0.0);
}

TEST_CASE("metric_scale refuses times outside the domain") {
  const ScaleFlow s = sphere_ricci();
  CHECK_THROWS_AS(metric_scale(s, -0.1), DomainError);
  CHECK_THROWS_AS(metric_scale(s, 2.5), DomainError);
}

TEST_CASE("user scale derivative agrees with central differences") {
  std::vector<double> tau, c;
  for (int k = 0; k <= 20; ++k) {
    tau.push_back(0.05 * k);
    c.push_back(1.0 + 1.5 * tau.back() - 0.2 * tau.back() * tau.back());
  }
  const ScaleFlow f = ScaleFlow::user_scale(Model::Sphere2, tau, c, 0.0);
  const double t0 = 0.437;
  auto fd_error = [&](double h) {
    return std::abs(f.scale_derivative(t0) - (f.scale(t0 + h) - f.scale(t0 - h)) / (2 * h));
  };
  // inside one cubic piece the difference quotient converges at second order
  const double e1 = fd_error(2e-3), e2 = fd_error(1e-3);
  CHECK(e1 < 1e-5);
  CHECK(e2 < e1 / 3.0);
}

TEST_CASE("distance examples") {
  const ScaleFlow s = ScaleFlow::backward_ricci(Model::Sphere2, 4.0, 0.0, {0.0, 1.0});
  CHECK(distance(s, 0.0, {pi / 2, 0.0}, {pi / 2, pi / 2}) == doctest::Approx(pi).epsilon(1e-14));
  const ScaleFlow t = ScaleFlow::backward_ricci(Model::Torus2, 1.0, 0.0, {0.0, 1.0});
  CHECK(distance(t, 0.3, {0.0, 0.0}, {0.9, 0.0}) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(distance(t, 0.3, {0.25, 0.7}, {0.25, 0.7}) == 0.0);
  CHECK(distance(s, 0.3, {1.0, 2.0}, {1.0, 2.0}) == 0.0);
}

TEST_CASE("triangle inequality and symmetry on random triples") {
  std::mt19937_64 rng(11);
  for (Model model : {Model::Sphere2, Model::Torus2}) {
    const ScaleFlow f = ScaleFlow::backward_ricci(model, 1.7, 0.0, {0.0, 1.0});
    for (int k = 0; k < 500; ++k) {
      const auto a = random_point(model, rng), b = random_point(model, rng), c = random_point(model, rng);
      const double ab = distance(f, 0.4, a, b), bc = distance(f, 0.4, b, c), ac = distance(f, 0.4, a, c);
      CHECK(ac <= ab + bc + 1e-12);
      CHECK(std::abs(ab - distance(f, 0.4, b, a)) < 1e-14);
    }
  }
}

TEST_CASE("super Ricci margin") {
  const ScaleFlow s = sphere_ricci();
  for (double tau : {0.0, 0.5, 1.7}) CHECK(std::abs(super_ricci_margin(s, tau)) < 1e-14);

  const ScaleFlow t = ScaleFlow::user_scale(Model::Torus2, {0.0, 0.25, 0.5, 0.75, 1.0},
                                            {1.0, 0.925, 0.85, 0.775, 0.7}, 0.0);
  for (double tau : {0.0, 0.3, 0.9}) CHECK(super_ricci_margin(t, tau) >= 0.0);

  const ScaleFlow probe = ScaleFlow::backward_ricci(Model::Sphere2, 1.0, 1.0, {0.0, 1.0}, false);
  CHECK(super_ricci_margin(probe, 0.0) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(ScaleFlow::backward_ricci(Model::Sphere2, 1.0, 1.0, {0.0, 1.0}, true), InvalidArgument);
}

TEST_CASE("geodesic points") {
  const ScaleFlow s = sphere_ricci();
  const SamplePoint x{pi / 2, 0.0}, y{pi / 2, pi / 2};
  const auto start = geodesic_point(s, 0.2, x, y, 0.0);
  const auto end = geodesic_point(s, 0.2, x, y, 1.0);
  CHECK(start.p == doctest::Approx(x.p));
  CHECK(start.q == doctest::Approx(x.q));
  CHECK(end.p == doctest::Approx(y.p));
  CHECK(end.q == doctest::Approx(y.q));
  const auto mid = geodesic_point(s, 0.2, x, y, 0.5);
  CHECK(mid.p == doctest::Approx(pi / 2).epsilon(1e-14));
  CHECK(mid.q == doctest::Approx(pi / 4).epsilon(1e-14));

  const ScaleFlow t = ScaleFlow::backward_ricci(Model::Torus2, 1.0, 0.0, {0.0, 1.0});
  const auto m = geodesic_point(t, 0.0, {0.0, 0.0}, {0.9, 0.0}, 0.5);
  // brute force over lattice translates of y
  double best = 1e9, bx = 0, by = 0;
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) {
      const double dx = 0.9 + i, dy = 0.0 + j;
      if (std::hypot(dx, dy) < best) {
        best = std::hypot(dx, dy);
        bx = dx;
        by = dy;
      }
    }
  }
  const double ex = std::fmod(0.5 * bx + 1.0, 1.0), ey = std::fmod(0.5 * by + 1.0, 1.0);
  CHECK(m.p == doctest::Approx(ex).epsilon(1e-14));
  CHECK(m.p == doctest::Approx(0.95).epsilon(1e-14));
  CHECK(std::abs(m.q - ey) < 1e-14);
}

TEST_CASE("pairs inside the cut-locus guard are refused") {
  const ScaleFlow s = sphere_ricci();
  CHECK_THROWS_AS(geodesic_point(s, 0.0, {0.0, 0.0}, {pi - 0.01, 0.0}, 0.5), CutLocusError);
  CHECK_THROWS_AS(parallel_frame(s, 0.0, {0.0, 0.0}, {pi - 0.01, 0.0}), CutLocusError);
  const ScaleFlow t = ScaleFlow::backward_ricci(Model::Torus2, 1.0, 0.0, {0.0, 1.0});
  CHECK_THROWS_AS(geodesic_point(t, 0.0, {0.0, 0.0}, {0.5, 0.0}, 0.5), CutLocusError);
}

TEST_CASE("parallel frames are orthonormal and transported correctly") {
  std::mt19937_64 rng(5);
  for (Model model : {Model::Sphere2, Model::Torus2}) {
    const ScaleFlow f = ScaleFlow::backward_ricci(model, 1.3, 0.0, {0.0, 1.0});
    int done = 0;
    while (done < 100) {
      const auto x = random_point(model, rng), y = random_point(model, rng);
      ParallelFrames fr;
      try {
        fr = parallel_frame(f, 0.6, x, y);
      } catch (const CutLocusError&) {
        continue;
      }
      ++done;
      for (int i = 0; i < kDim; ++i) {
        for (int j = 0; j < kDim; ++j) {
          CHECK(std::abs(metric_inner(f, 0.6, fr.at_x[i], fr.at_x[j]) - (i == j)) < 1e-12);
          CHECK(std::abs(metric_inner(f, 0.6, fr.at_y[i], fr.at_y[j]) - (i == j)) < 1e-12);
        }
      }
      if (model == Model::Torus2) {
        for (int i = 0; i < kDim; ++i) CHECK((fr.at_x[i] - fr.at_y[i]).norm() < 1e-15);
      }
    }
  }
}

TEST_CASE("equator frame matches numerically transported vectors") {
  const ScaleFlow s = sphere_ricci();
  const SamplePoint x{pi / 2, 0.3}, y{pi / 2, 2.1};
  const auto fr = parallel_frame(s, 0.0, x, y);
  // normal is the polar direction along the equator
  CHECK(std::abs(std::abs(fr.at_x[0].z()) - 1.0) < 1e-14);
  CHECK((fr.at_x[0] - fr.at_y[0]).norm() < 1e-14);

  // transport both frame vectors along the great circle with RK4 on
  // V' = -(V . gamma') gamma (unit-speed gamma in the embedding)
  const Vec3 a = embed(Model::Sphere2, x);
  const Vec3 b = embed(Model::Sphere2, y);
  const double angle = std::acos(a.dot(b));
  const Vec3 e = (b - a.dot(b) * a).normalized();
  auto gamma = [&](double t) { return Vec3(std::cos(t) * a + std::sin(t) * e); };
  auto dgamma = [&](double t) { return Vec3(-std::sin(t) * a + std::cos(t) * e); };
  for (int i = 0; i < kDim; ++i) {
    Vec3 v = fr.at_x[i];
    const int steps = 2000;
    const double h = angle / steps;
    auto rhs = [&](double t, const Vec3& w) { return Vec3(-w.dot(dgamma(t)) * gamma(t)); };
    for (int k = 0; k < steps; ++k) {
      const double t = k * h;
      const Vec3 k1 = rhs(t, v), k2 = rhs(t + h / 2, v + h / 2 * k1), k3 = rhs(t + h / 2, v + h / 2 * k2),
                 k4 = rhs(t + h, v + h * k3);
      v += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    CHECK((v - fr.at_y[i]).norm() < 1e-11);
  }
}

TEST_CASE("cloud weights integrate the standard volume") {
  double sum = 0.0;
  for (double w : sphere_cloud(300).weights) sum += w;
  CHECK(std::abs(sum - 4 * pi) < 1e-10);
  sum = 0.0;
  for (double w : torus_cloud(400).weights) sum += w;
  CHECK(std::abs(sum - 1.0) < 1e-10);
  CHECK(sphere_cloud(300).size() == 300);
  CHECK(torus_cloud(200).size() == 200);
}
