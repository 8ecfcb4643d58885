#include "ricciot/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ricciot/errors.hpp"
#include "ricciot/numerics.hpp"

namespace ricciot {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// P_0(t) .. P_L(t) by the three-term recurrence.
void legendre_table(int L, double t, std::vector<double>& out) {
  out.assign(L + 1, 0.0);
  out[0] = 1.0;
  if (L >= 1) out[1] = t;
  for (int l = 1; l < L; ++l) {
    out[l + 1] = ((2.0 * l + 1.0) * t * out[l] - l * out[l - 1]) / (l + 1.0);
  }
}

void fourier_powers(int L, double x, std::vector<std::complex<double>>& out) {
  out.assign(2 * L + 1, {1.0, 0.0});
  const std::complex<double> step = std::polar(1.0, kTwoPi * x);
  for (int k = 1; k <= L; ++k) {
    out[L + k] = out[L + k - 1] * step;
    out[L - k] = std::conj(out[L + k]);
  }
}

double volume_factor(const ScaleFlow& flow, double tau) {
  return std::pow(flow.scale(tau), kDim / 2.0);
}

void require_clock(const SpectralField& f, double tau, const char* where) {
  if (std::abs(f.clock - tau) > 1e-12 * (1.0 + std::abs(tau))) {
    std::ostringstream msg;
    msg << where << ": field clock " << f.clock << " does not match tau = " << tau;
    throw InvalidArgument(msg.str());
  }
}

void require_model(const SpectralField& f, const ScaleFlow& flow, const char* where) {
  if (f.model != flow.model()) {
    throw InvalidArgument(std::string(where) + ": field model does not match the flow");
  }
}

// Multiplies mode m by factor(eigenvalue_m).
template <class Factor>
void scale_modes(SpectralField& f, Factor factor) {
  if (f.model == Model::Sphere2) {
    for (int l = 0; l <= f.band_limit; ++l) f.legendre[l] *= factor(f.mode_eigenvalue(l));
  } else {
    for (std::size_t m = 0; m < f.fourier.size(); ++m) {
      f.fourier[m] *= factor(f.mode_eigenvalue(m));
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- SpectralField

SpectralField SpectralField::zeros(Model model, int band_limit, double clock) {
  if (band_limit < 0) throw InvalidArgument("band limit must be nonnegative");
  SpectralField f;
  f.model = model;
  f.band_limit = band_limit;
  f.clock = clock;
  if (model == Model::Sphere2) {
    f.legendre.assign(band_limit + 1, 0.0);
  } else {
    const std::size_t side = 2 * band_limit + 1;
    f.fourier.assign(side * side, {0.0, 0.0});
  }
  return f;
}

std::size_t SpectralField::mode_count() const {
  return model == Model::Sphere2 ? legendre.size() : fourier.size();
}

double SpectralField::mode_eigenvalue(std::size_t m) const {
  if (model == Model::Sphere2) {
    const double l = static_cast<double>(m);
    return l * (l + 1.0);
  }
  const int side = 2 * band_limit + 1;
  const int k1 = static_cast<int>(m) / side - band_limit;
  const int k2 = static_cast<int>(m) % side - band_limit;
  return 4.0 * kPi * kPi * (k1 * k1 + k2 * k2);
}

std::complex<double>& SpectralField::fourier_at(int k1, int k2) {
  const int side = 2 * band_limit + 1;
  return fourier[(k1 + band_limit) * side + (k2 + band_limit)];
}

std::complex<double> SpectralField::fourier_at(int k1, int k2) const {
  const int side = 2 * band_limit + 1;
  return fourier[(k1 + band_limit) * side + (k2 + band_limit)];
}

double SpectralField::zonal_value(double t) const {
  if (model != Model::Sphere2) throw InvalidArgument("zonal_value: sphere fields only");
  double p_prev = 1.0;
  double sum = legendre[0];
  if (band_limit == 0) return sum;
  double p = t;
  sum += legendre[1] * p;
  for (int l = 1; l < band_limit; ++l) {
    const double p_next = ((2.0 * l + 1.0) * t * p - l * p_prev) / (l + 1.0);
    p_prev = p;
    p = p_next;
    sum += legendre[l + 1] * p;
  }
  return sum;
}

double SpectralField::value(const SamplePoint& x) const {
  if (model == Model::Sphere2) return zonal_value(std::cos(x.p));
  std::vector<std::complex<double>> ex, ey;
  fourier_powers(band_limit, x.p, ex);
  fourier_powers(band_limit, x.q, ey);
  double sum = 0.0;
  const int side = 2 * band_limit + 1;
  for (int i = 0; i < side; ++i) {
    std::complex<double> row{0.0, 0.0};
    for (int j = 0; j < side; ++j) row += fourier[i * side + j] * ey[j];
    sum += (row * ex[i]).real();
  }
  return sum;
}

std::vector<double> SpectralField::values(const std::vector<SamplePoint>& xs) const {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = value(xs[i]);
  return out;
}

double SpectralField::standard_integral() const {
  if (model == Model::Sphere2) return 4.0 * kPi * legendre[0];
  return fourier_at(0, 0).real();
}

void SpectralField::validate() const {
  const std::size_t expected =
      model == Model::Sphere2 ? static_cast<std::size_t>(band_limit + 1)
                              : static_cast<std::size_t>((2 * band_limit + 1) * (2 * band_limit + 1));
  if (band_limit < 0 || mode_count() != expected) {
    throw InvalidArgument("spectral field: coefficient count does not match band limit");
  }
  const bool finite =
      model == Model::Sphere2
          ? std::all_of(legendre.begin(), legendre.end(), [](double a) { return std::isfinite(a); })
          : std::all_of(fourier.begin(), fourier.end(), [](std::complex<double> a) {
              return std::isfinite(a.real()) && std::isfinite(a.imag());
            });
  if (!finite) throw InvalidArgument("spectral field: non-finite coefficient");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.model != model || other.band_limit != band_limit) {
    throw InvalidArgument("spectral field sum: band limit mismatch");
  }
  for (std::size_t i = 0; i < legendre.size(); ++i) legendre[i] += other.legendre[i];
  for (std::size_t i = 0; i < fourier.size(); ++i) fourier[i] += other.fourier[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& a : legendre) a *= s;
  for (auto& a : fourier) a *= s;
  return *this;
}

SpectralField& SpectralField::add_constant(double a) {
  if (model == Model::Sphere2) {
    legendre[0] += a;
  } else {
    fourier_at(0, 0) += a;
  }
  return *this;
}

// ---------------------------------------------------------------- construction

SpectralDensity density_from_mixture(const ScaleFlow& flow, double tau,
                                     const std::vector<MixtureComponent>& mixture,
                                     int band_limit) {
  flow.require_in_domain(tau, "density_from_mixture");
  if (mixture.empty()) throw InvalidArgument("density mixture is empty");
  for (const auto& comp : mixture) {
    if (!(comp.weight > 0.0) || !(comp.concentration > 0.0)) {
      throw InvalidArgument("mixture weights and concentrations must be positive");
    }
  }
  SpectralField f = SpectralField::zeros(flow.model(), band_limit, tau);
  if (flow.model() == Model::Sphere2) {
    const auto rule = numerics::gauss_legendre(std::max(4 * band_limit, 256));
    std::vector<double> p;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = rule.nodes[i];
      double profile = 0.0;
      for (const auto& comp : mixture) {
        const double dt = t - std::cos(comp.center_p);
        profile += comp.weight * std::exp(-comp.concentration * dt * dt);
      }
      legendre_table(band_limit, t, p);
      for (int l = 0; l <= band_limit; ++l) {
        f.legendre[l] += 0.5 * (2.0 * l + 1.0) * rule.weights[i] * profile * p[l];
      }
    }
  } else {
    for (int k1 = -band_limit; k1 <= band_limit; ++k1) {
      for (int k2 = -band_limit; k2 <= band_limit; ++k2) {
        std::complex<double> a{0.0, 0.0};
        for (const auto& comp : mixture) {
          const double damp =
              std::exp(-2.0 * kPi * kPi * (k1 * k1 + k2 * k2) / comp.concentration);
          a += comp.weight * damp *
               std::polar(1.0, -kTwoPi * (k1 * comp.center_p + k2 * comp.center_q));
        }
        f.fourier_at(k1, k2) = a;
      }
    }
  }
  f *= 1.0 / (f.standard_integral() * volume_factor(flow, tau));
  return SpectralDensity(std::move(f));
}

SpectralDensity uniform_density(const ScaleFlow& flow, double tau, int band_limit) {
  SpectralField f = SpectralField::zeros(flow.model(), band_limit, tau);
  const double standard_volume = flow.model() == Model::Sphere2 ? 4.0 * kPi : 1.0;
  f.add_constant(1.0 / (standard_volume * volume_factor(flow, tau)));
  return SpectralDensity(std::move(f));
}

double density_mass(const ScaleFlow& flow, const SpectralDensity& u) {
  return u.standard_integral() * volume_factor(flow, u.clock);
}

// ---------------------------------------------------------------- evolution

SpectralDensity evolve_conjugate(const ScaleFlow& flow, const SpectralDensity& u,
                                 double tau_from, double tau_to) {
  require_model(u, flow, "evolve_conjugate");
  u.validate();
  flow.require_in_domain(tau_from, "evolve_conjugate");
  flow.require_in_domain(tau_to, "evolve_conjugate");
  require_clock(u, tau_from, "evolve_conjugate");
  if (tau_to < tau_from) {
    throw DomainError("evolve_conjugate: the conjugate heat equation runs forward in tau");
  }
  SpectralDensity out = u;
  out.clock = tau_to;
  if (tau_to == tau_from) return out;
  const double mass_factor = std::pow(flow.scale(tau_from) / flow.scale(tau_to), kDim / 2.0);
  const double integral = flow.inverse_scale_integral(tau_from, tau_to);
  scale_modes(out, [&](double lambda) { return mass_factor * std::exp(-lambda * integral); });
  return out;
}

ScalarField evolve_dual(const ScaleFlow& flow, const ScalarField& f, double tau_from,
                        double tau_to) {
  require_model(f, flow, "evolve_dual");
  f.validate();
  flow.require_in_domain(tau_from, "evolve_dual");
  flow.require_in_domain(tau_to, "evolve_dual");
  require_clock(f, tau_from, "evolve_dual");
  if (tau_to > tau_from) {
    throw DomainError(
        "evolve_dual: the backward heat equation is ill-posed towards larger tau");
  }
  ScalarField out = f;
  out.clock = tau_to;
  if (tau_to == tau_from) return out;
  const double integral = flow.inverse_scale_integral(tau_to, tau_from);
  scale_modes(out, [&](double lambda) { return std::exp(-lambda * integral); });
  return out;
}

// ---------------------------------------------------------------- discretization

DiscreteMeasure density_values(const SpectralDensity& u, const PointCloud& cloud,
                               const ScaleFlow& flow, double tau,
                               const DensityValueOptions& options) {
  require_model(u, flow, "density_values");
  require_clock(u, tau, "density_values");
  if (cloud.model != flow.model()) {
    throw InvalidArgument("density_values: cloud model does not match the flow");
  }
  const double factor = volume_factor(flow, tau);
  DiscreteMeasure measure;
  measure.weights.resize(cloud.size());
  double total = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double v = u.value(cloud.points[i]);
    if (v < 0.0) {
      v = 0.0;
      ++measure.clipped;
    }
    measure.weights[i] = v * factor * cloud.weights[i];
    total += measure.weights[i];
  }
  measure.mass_defect = std::abs(total - density_mass(flow, u));
  if (!(total > 0.0)) throw ResolutionError("density_values: density vanishes on the cloud");
  for (double& w : measure.weights) w /= total;
  if (measure.mass_defect > options.max_mass_defect) {
    std::ostringstream msg;
    msg << "density_values: mass defect " << measure.mass_defect << " exceeds "
        << options.max_mass_defect << " (" << measure.clipped
        << " clipped points); cloud or band limit under-resolved";
    throw ResolutionError(msg.str());
  }
  return measure;
}

double duality_functional(const ScalarField& phi, const ScalarField& psi,
                          const SpectralDensity& mu, const SpectralDensity& nu,
                          const ScaleFlow& flow, double tau) {
  for (const SpectralField* f : {static_cast<const SpectralField*>(&phi),
                                 static_cast<const SpectralField*>(&psi),
                                 static_cast<const SpectralField*>(&mu),
                                 static_cast<const SpectralField*>(&nu)}) {
    require_clock(*f, tau, "duality_functional");
    require_model(*f, flow, "duality_functional");
  }
  // Integral of f g over the standard metric from coefficients.
  auto pairing = [](const SpectralField& f, const SpectralField& g) {
    double sum = 0.0;
    if (f.model == Model::Sphere2) {
      const int L = std::min(f.band_limit, g.band_limit);
      for (int l = 0; l <= L; ++l) {
        sum += f.legendre[l] * g.legendre[l] * 4.0 * kPi / (2.0 * l + 1.0);
      }
    } else {
      const int L = std::min(f.band_limit, g.band_limit);
      for (int k1 = -L; k1 <= L; ++k1) {
        for (int k2 = -L; k2 <= L; ++k2) {
          sum += (f.fourier_at(k1, k2) * std::conj(g.fourier_at(k1, k2))).real();
        }
      }
    }
    return sum;
  };
  return volume_factor(flow, tau) * (pairing(phi, mu) + pairing(psi, nu));
}

ScalarField project_to_field(const PointCloud& cloud, const std::vector<double>& values,
                             int band_limit, double clock) {
  if (values.size() != cloud.size()) {
    throw InvalidArgument("project_to_field: one value per cloud point required");
  }
  SpectralField f = SpectralField::zeros(cloud.model, band_limit, clock);
  if (cloud.model == Model::Sphere2) {
    std::vector<double> p;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      legendre_table(band_limit, std::cos(cloud.points[i].p), p);
      for (int l = 0; l <= band_limit; ++l) {
        f.legendre[l] += (2.0 * l + 1.0) / (4.0 * kPi) * cloud.weights[i] * values[i] * p[l];
      }
    }
  } else {
    std::vector<std::complex<double>> ex, ey;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      fourier_powers(band_limit, cloud.points[i].p, ex);
      fourier_powers(band_limit, cloud.points[i].q, ey);
      const double w = cloud.weights[i] * values[i];
      for (int k1 = -band_limit; k1 <= band_limit; ++k1) {
        for (int k2 = -band_limit; k2 <= band_limit; ++k2) {
          f.fourier_at(k1, k2) += w * std::conj(ex[band_limit + k1] * ey[band_limit + k2]);
        }
      }
    }
  }
  return ScalarField(std::move(f));
}

}  // namespace ricciot
