#pragma once

#include <cstddef>
#include <vector>

namespace ricciot {

/// Probability weights over the points of a PointCloud (index i <-> point i).
/// Zero weights are allowed; the support is the set of positive entries.
struct DiscreteMeasure {
  std::vector<double> weights;
  /// |sum of clipped quadrature weights - spectral mass| before renormalization.
  double mass_defect = 0.0;
  /// Number of points whose density value was negative and clipped to zero.
  std::size_t clipped = 0;

  std::size_t size() const { return weights.size(); }
  std::vector<std::size_t> support() const;

  /// Throws InvalidArgument unless weights are nonnegative and sum to 1
  /// within tol.
  void validate(double tol = 1e-10) const;

  static DiscreteMeasure dirac(std::size_t n, std::size_t index);
  static DiscreteMeasure uniform(std::size_t n);
};

}  // namespace ricciot
