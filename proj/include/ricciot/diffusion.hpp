#pragma once

// Spectral solutions of the conjugate heat equation on the model geometries and
// of the backward heat equation satisfied by Kantorovich potentials.
//
// Sphere fields are zonal: f(theta) = sum_l a_l P_l(cos theta), l = 0..L.
// Torus fields are trigonometric polynomials f(x) = Re sum_k a_k e^{2 pi i k.x}
// over the square band |k1|, |k2| <= L, stored with Hermitian symmetry.

#include <complex>
#include <vector>

#include "ricciot/geometry.hpp"
#include "ricciot/measure.hpp"

namespace ricciot {

inline constexpr int kDefaultSphereBand = 48;
inline constexpr int kDefaultTorusBand = 16;

struct SpectralField {
  Model model = Model::Sphere2;
  int band_limit = 0;
  /// The tau at which the coefficients are current.
  double clock = 0.0;
  std::vector<double> legendre;               // sphere: L + 1 entries
  std::vector<std::complex<double>> fourier;  // torus: (2L + 1)^2 entries

  static SpectralField zeros(Model model, int band_limit, double clock);

  std::size_t mode_count() const;
  /// Laplacian eigenvalue of the standard metric for mode index m.
  double mode_eigenvalue(std::size_t m) const;
  std::complex<double>& fourier_at(int k1, int k2);
  std::complex<double> fourier_at(int k1, int k2) const;

  double value(const SamplePoint& x) const;
  std::vector<double> values(const std::vector<SamplePoint>& xs) const;
  /// Zonal profile value at t = cos(colatitude) (sphere only).
  double zonal_value(double cos_colatitude) const;

  /// Integral over the standard metric (4 pi a_0 or Re a_0).
  double standard_integral() const;
  void validate() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator*=(double s);
  SpectralField& add_constant(double a);
};

/// Density u of a diffusion d mu = u dV_tau.
struct SpectralDensity : SpectralField {
  SpectralDensity() = default;
  explicit SpectralDensity(SpectralField f) : SpectralField(std::move(f)) {}
};

/// Potential phi or psi solving the backward heat equation.
struct ScalarField : SpectralField {
  ScalarField() = default;
  explicit ScalarField(SpectralField f) : SpectralField(std::move(f)) {}
};

/// One component of an initial-density mixture.
/// Sphere: zonal ring exp(-kappa (cos theta - cos theta0)^2) with
///   theta0 = center_p (center_q ignored).
/// Torus: periodized Gaussian centered at (center_p, center_q) with variance
///   1 / kappa per axis.
struct MixtureComponent {
  double center_p = 0.0;
  double center_q = 0.0;
  double concentration = 1.0;
  double weight = 1.0;
};

/// Unit-mass density (with respect to dV_tau) built from a mixture.
SpectralDensity density_from_mixture(const ScaleFlow& flow, double tau,
                                     const std::vector<MixtureComponent>& mixture,
                                     int band_limit);

/// Uniform probability density 1 / Vol_tau.
SpectralDensity uniform_density(const ScaleFlow& flow, double tau, int band_limit);

/// Total mass of u with respect to dV_tau at tau = u.clock.
double density_mass(const ScaleFlow& flow, const SpectralDensity& u);

SpectralDensity evolve_conjugate(const ScaleFlow& flow, const SpectralDensity& u,
                                 double tau_from, double tau_to);

ScalarField evolve_dual(const ScaleFlow& flow, const ScalarField& f, double tau_from,
                        double tau_to);

struct DensityValueOptions {
  double max_mass_defect = 1e-4;
};

/// Discretizes d mu = u dV_tau on a cloud: w_i = max(u(x_i), 0) c^{n/2} w_i,
/// renormalized to unit mass. Throws ResolutionError when the mass defect
/// exceeds options.max_mass_defect.
DiscreteMeasure density_values(const SpectralDensity& u, const PointCloud& cloud,
                               const ScaleFlow& flow, double tau,
                               const DensityValueOptions& options = {});

/// J(phi, psi) = int phi d mu + int psi d nu, computed from mode coefficients.
double duality_functional(const ScalarField& phi, const ScalarField& psi,
                          const SpectralDensity& mu, const SpectralDensity& nu,
                          const ScaleFlow& flow, double tau);

/// Discrete L2 projection of point values onto band-limited modes using the
/// cloud quadrature weights. Sphere values are treated as zonal samples.
ScalarField project_to_field(const PointCloud& cloud, const std::vector<double>& values,
                             int band_limit, double clock);

}  // namespace ricciot
