#include "ricciot/measure.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ricciot/errors.hpp"

namespace ricciot {

std::vector<std::size_t> DiscreteMeasure::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) out.push_back(i);
  }
  return out;
}

void DiscreteMeasure::validate(double tol) const {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("discrete measure has a negative or non-finite weight");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream msg;
    msg << "discrete measure weights sum to " << sum << ", not 1";
    throw InvalidArgument(msg.str());
  }
}

DiscreteMeasure DiscreteMeasure::dirac(std::size_t n, std::size_t index) {
  DiscreteMeasure m;
  m.weights.assign(n, 0.0);
  m.weights.at(index) = 1.0;
  return m;
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t n) {
  DiscreteMeasure m;
  m.weights.assign(n, 1.0 / static_cast<double>(n));
  return m;
}

}  // namespace ricciot
