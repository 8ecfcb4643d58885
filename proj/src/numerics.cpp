#include "ricciot/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "ricciot/errors.hpp"

namespace ricciot::numerics {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
  // legendre_p_zeros returns the nonnegative zeros in ascending order.
  const std::vector<double> positive = boost::math::legendre_p_zeros<double>(n);
  QuadratureRule rule;
  rule.nodes.reserve(n);
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    if (*it != 0.0) rule.nodes.push_back(-*it);
  }
  for (double x : positive) rule.nodes.push_back(x);
  rule.weights.reserve(rule.nodes.size());
  for (double x : rule.nodes) {
    const double dp = boost::math::legendre_p_prime(n, x);
    rule.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return rule;
}

const QuadratureRule& gauss_lobatto5() {
  static const QuadratureRule rule = [] {
    const double a = std::sqrt(3.0 / 7.0);
    return QuadratureRule{{-1.0, -a, 0.0, a, 1.0},
                          {0.1, 49.0 / 90.0, 32.0 / 45.0, 49.0 / 90.0, 0.1}};
  }();
  return rule;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, tol);
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 12, tol, &error);
  return value;
}

std::vector<double> chebyshev_lobatto(int m, double a, double b) {
  std::vector<double> x(m + 1);
  for (int k = 0; k <= m; ++k) {
    const double t = -std::cos(std::numbers::pi * k / m);
    x[k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  x.front() = a;
  x.back() = b;
  return x;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ricciot::numerics
