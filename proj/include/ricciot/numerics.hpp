#pragma once

// Small numerical building blocks shared by the modules: quadrature rules,
// adaptive integration and a deterministic parallel loop.

#include <cstddef>
#include <functional>
#include <vector>

namespace ricciot::numerics {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// 5-point Gauss-Lobatto rule on [-1, 1] (exact for degree 7, endpoints included).
const QuadratureRule& gauss_lobatto5();

/// Adaptive Gauss-Kronrod integral of f over [a, b] to relative tolerance tol.
/// Returns 0 when a == b and a negated integral when b < a.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-13);

/// Chebyshev-Gauss-Lobatto nodes x_k = cos(pi k / m) mapped to [a, b],
/// ordered ascending (k = m .. 0).
std::vector<double> chebyshev_lobatto(int m, double a, double b);

/// Runs body(i) for i in [0, n) on a pool of worker threads. Each index is
/// processed exactly once; callers write into pre-sized outputs by index so
/// results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ricciot::numerics
