#include "ricciot/coupling.hpp"

#include <cmath>
#include <sstream>

#include "ricciot/errors.hpp"

namespace ricciot {

namespace {

enum class Variation { Tangential, Along, Opposed };

// g_tau length of s -> exp_{gamma(s)}(r E(s)) for the frame vector E.
double variation_length(const ScaleFlow& flow, double tau, double d, Variation kind, double r) {
  switch (kind) {
    case Variation::Along:
      return d;
    case Variation::Opposed:
      return d - 2.0 * r;
    case Variation::Tangential:
      if (flow.model() == Model::Torus2) return d;
      // parallel small circle at normal offset r on the sphere of radius sqrt(c)
      return d * std::cos(r / std::sqrt(flow.scale(tau)));
  }
  return d;
}

// Refuses a step whose varied endpoints leave the region of unique geodesics.
void check_endpoints(const ScaleFlow& flow, const CoupledPair& pair, const Vec3& ex,
                     const Vec3& ey, double r, const GeometryOptions& geometry) {
  for (double sign : {1.0, -1.0}) {
    const SamplePoint xr = exp_std(flow.model(), pair.x, sign * r * ex);
    const SamplePoint yr = exp_std(flow.model(), pair.y, sign * r * ey);
    geodesic_point(flow, pair.tau, xr, yr, 0.5, geometry);
  }
}

double second_difference(const ScaleFlow& flow, const CostFunction& cost,
                         const CoupledPair& pair, Variation kind, double h) {
  auto f = [&](double r) {
    return cost.eta(variation_length(flow, pair.tau, pair.d, kind, r), pair.tau);
  };
  return (f(h) + f(-h) - 2.0 * f(0.0)) / (h * h);
}

BoundTerms terms_at(const ScaleFlow& flow, const CostFunction& cost, const CoupledPair& pair,
                    double h, const GeometryOptions& geometry) {
  constexpr int n = kDim;
  const auto& ex = pair.frames.at_x;
  const auto& ey = pair.frames.at_y;
  for (int i = 0; i < n - 1; ++i) check_endpoints(flow, pair, ex[i], ey[i], h, geometry);
  check_endpoints(flow, pair, ex[n - 1], ey[n - 1], h, geometry);
  check_endpoints(flow, pair, ex[n - 1], -ey[n - 1], h, geometry);

  BoundTerms t;
  t.h = h;
  for (int i = 0; i < n - 1; ++i) {
    t.tangential += second_difference(flow, cost, pair, Variation::Tangential, h);
  }
  t.along = second_difference(flow, cost, pair, Variation::Along, h);
  t.opposed = second_difference(flow, cost, pair, Variation::Opposed, h);
  return t;
}

}  // namespace

CoupledPair make_pair(const ScaleFlow& flow, double tau, const SamplePoint& x,
                      const SamplePoint& y, const GeometryOptions& options) {
  CoupledPair pair;
  pair.x = normalize(flow.model(), x);
  pair.y = normalize(flow.model(), y);
  pair.tau = tau;
  pair.frames = parallel_frame(flow, tau, pair.x, pair.y, options);
  pair.d = distance(flow, tau, pair.x, pair.y);
  return pair;
}

BoundTerms coupled_hessian_terms(const ScaleFlow& flow, const CostFunction& cost,
                                 const CoupledPair& pair, const HessianOptions& options) {
  flow.require_in_domain(pair.tau, "coupled_hessian_bound");
  double h = options.step > 0.0 ? options.step : options.rel_step * pair.d;
  if (!(pair.d >= 10.0 * h) || !(h > 0.0)) {
    std::ostringstream msg;
    msg << "coupled_hessian_bound: pair at distance " << pair.d
        << " is too close to the diagonal for step " << h;
    throw InvalidArgument(msg.str());
  }
  const double h_min = options.min_rel_step * pair.d;
  while (true) {
    try {
      return terms_at(flow, cost, pair, h, options.geometry);
    } catch (const CutLocusError&) {
      h *= 0.5;
      if (h < h_min) {
        throw CutLocusError("coupled_hessian_bound: variations cross the cut locus for every step");
      }
    }
  }
}

double coupled_hessian_bound(const ScaleFlow& flow, double tau, const CostFunction& cost,
                             const CoupledPair& pair, double h) {
  if (tau != pair.tau) throw InvalidArgument("coupled_hessian_bound: pair built at another tau");
  HessianOptions options;
  options.step = h;
  return coupled_hessian_terms(flow, cost, pair, options).bound();
}

double closed_form_second_variation(const ScaleFlow& flow, double tau, const CostFunction& cost,
                                    const CoupledPair& pair) {
  flow.require_in_domain(tau, "closed_form_second_variation");
  // Ric(gamma', gamma') = ricci_factor for a g_tau unit-speed geodesic, times
  // the n - 1 tangential directions.
  const double ric_integral = (kDim - 1) * flow.ricci_factor(tau) * pair.d;
  return -cost.eta_s(pair.d, tau) * ric_integral + std::min(4.0 * cost.eta_ss(pair.d, tau), 0.0);
}

double time_derivative_cost(const ScaleFlow& flow, double tau, const CostFunction& cost,
                            const CoupledPair& pair) {
  flow.require_in_domain(tau, "time_derivative_cost");
  const double c = flow.scale(tau);
  return cost.eta_s(pair.d, tau) * (flow.scale_derivative(tau) / (2.0 * c)) * pair.d +
         cost.eta_tau(pair.d, tau);
}

double lemma_rhs(const ScaleFlow& flow, double tau, const CostFunction& cost,
                 const CoupledPair& pair) {
  return -cost.eta_tau(pair.d, tau) + flow.K() * cost.eta_s(pair.d, tau) * pair.d -
         std::min(4.0 * cost.eta_ss(pair.d, tau), 0.0);
}

double lemma_gap(const ScaleFlow& flow, double tau, const CostFunction& cost,
                 const CoupledPair& pair) {
  if (tau != pair.tau) throw InvalidArgument("lemma_gap: pair built at another tau");
  HessianOptions coarse;
  const BoundTerms t1 = coupled_hessian_terms(flow, cost, pair, coarse);
  HessianOptions fine;
  fine.step = 0.5 * t1.h;
  const BoundTerms t2 = coupled_hessian_terms(flow, cost, pair, fine);
  auto extrapolate = [](double a, double b) { return (4.0 * b - a) / 3.0; };
  BoundTerms r;
  r.tangential = extrapolate(t1.tangential, t2.tangential);
  r.along = extrapolate(t1.along, t2.along);
  r.opposed = extrapolate(t1.opposed, t2.opposed);
  const double lhs = -time_derivative_cost(flow, tau, cost, pair) - r.bound();
  return lhs - lemma_rhs(flow, tau, cost, pair);
}

}  // namespace ricciot
