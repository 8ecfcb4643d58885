#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ricciot/coupling.hpp"
#include "ricciot/errors.hpp"

using namespace ricciot;
using std::numbers::pi;

namespace {

ScaleFlow sphere() { return ScaleFlow::backward_ricci(Model::Sphere2, 1.0, 0.0, {0.0, 2.0}); }

CostFunction sqrt_cost() { return power_cost(0.5, 0.0); }

// exact second derivatives in r of the three variation-curve costs
double sqrt_closed(double d, double c) { return -std::sqrt(d) / (2 * c) - std::pow(d, -1.5); }

SamplePoint random_sphere_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), a(0.0, 2 * pi);
  return {std::acos(u(rng)), a(rng)};
}

}  // namespace

TEST_CASE("flat torus bound") {
  const ScaleFlow t = ScaleFlow::backward_ricci(Model::Torus2, 1.0, 0.0, {0.0, 1.0});
  const CoupledPair pair = make_pair(t, 0.5, {0.1, 0.2}, {0.4, 0.6});
  CHECK(pair.d == doctest::Approx(0.5).epsilon(1e-14));
  const BoundTerms b = coupled_hessian_terms(t, power_cost(2.0, 0.0), pair);
  CHECK(std::abs(b.tangential) < 1e-8);
  CHECK(std::abs(b.along) < 1e-8);
  CHECK(b.opposed == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(std::abs(b.bound()) < 1e-8);
  CHECK(std::abs(coupled_hessian_bound(t, 0.5, power_cost(2.0, 0.0), pair)) < 1e-8);
}

TEST_CASE("sphere closed forms") {
  const ScaleFlow s = sphere();
  const double tau = 0.5, c = s.scale(tau);
  const CoupledPair pair = make_pair(s, tau, {0.3, 0.0}, {1.4, 0.8});
  const double d = pair.d;
  CHECK(closed_form_second_variation(s, tau, power_cost(2.0, 0.0), pair) == doctest::Approx(-2 * d * d / c).epsilon(1e-13));
  CHECK(closed_form_second_variation(s, tau, sqrt_cost(), pair) == doctest::Approx(sqrt_closed(d, c)).epsilon(1e-13));
  CHECK(time_derivative_cost(s, tau, power_cost(2.0, 0.0), pair) == doctest::Approx(2 * d * d / c).epsilon(1e-13));
  CHECK(coupled_hessian_bound(s, tau, power_cost(2.0, 0.0), pair) == doctest::Approx(-2 * d * d / c).epsilon(1e-5));
  CHECK(lemma_rhs(s, tau, power_cost(2.0, 0.0), pair) == 0.0);
}

TEST_CASE("finite-difference bound converges at second order on the sphere") {
  const ScaleFlow s = sphere();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> taus(0.0, 2.0);
  int tested = 0;
  while (tested < 200) {
    const SamplePoint x = random_sphere_point(rng), y = random_sphere_point(rng);
    const double ang = standard_distance(Model::Sphere2, x, y);
    if (ang < 0.2 || ang > pi - 0.3) continue;
    const double tau = taus(rng);
    const CoupledPair pair = make_pair(s, tau, x, y);
    const CostFunction& cost = tested % 2 ? sqrt_cost() : power_cost(2.0, 0.0);
    const double exact = closed_form_second_variation(s, tau, cost, pair);
    HessianOptions coarse, fine;
    coarse.step = 0.04 * pair.d;
    fine.step = 0.02 * pair.d;
    const double e1 = std::abs(coupled_hessian_terms(s, cost, pair, coarse).bound() - exact);
    const double e2 = std::abs(coupled_hessian_terms(s, cost, pair, fine).bound() - exact);
    const double slope = std::log(e1 / e2) / std::log(2.0);
    CHECK(slope >= 1.7);
    CHECK(slope <= 2.3);
    ++tested;
  }
}

TEST_CASE("equality case of the gap") {
  const ScaleFlow s = sphere();
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const SamplePoint x = random_sphere_point(rng), y = random_sphere_point(rng);
    const double ang = standard_distance(Model::Sphere2, x, y);
    if (ang < 0.1 || ang > pi - 0.2) continue;
    const CoupledPair pair = make_pair(s, 1.1, x, y);
    CHECK(std::abs(lemma_gap(s, 1.1, power_cost(2.0, 0.0), pair)) <= 1e-8);
  }
}

TEST_CASE("shrinking torus gap") {
  const ScaleFlow t = ScaleFlow::user_scale(Model::Torus2, {0.0, 0.5, 1.0, 1.5, 2.0}, {1.0, 0.9, 0.82, 0.76, 0.72}, 0.0);
  for (double tau : {0.2, 0.9, 1.7}) {
    const CoupledPair pair = make_pair(t, tau, {0.1, 0.1}, {0.35, 0.2});
    const double c = t.scale(tau), dc = t.scale_derivative(tau), d = pair.d;
    const CostFunction cost = power_cost(2.0, 0.0);
    CHECK(lemma_gap(t, tau, cost, pair) == doctest::Approx(-2 * d * (dc / (2 * c)) * d).epsilon(1e-7));
    CHECK(lemma_gap(t, tau, cost, pair) > 0.0);
  }
}

TEST_CASE("rejected pairs") {
  const ScaleFlow s = sphere();
  CHECK_THROWS_AS(make_pair(s, 0.5, {0.0, 0.0}, {pi - 0.01, 0.0}), CutLocusError);
  CHECK_THROWS_AS(make_pair(s, 0.5, {0.7, 1.0}, {0.7, 1.0}), InvalidArgument);
  const ScaleFlow t = ScaleFlow::backward_ricci(Model::Torus2, 1.0, 0.0, {0.0, 1.0});
  CHECK_THROWS_AS(make_pair(t, 0.5, {0.0, 0.0}, {0.5, 0.0}), CutLocusError);
  CHECK_THROWS_AS(make_pair(s, 2.5, {0.3, 0.0}, {1.0, 0.0}), DomainError);
}
