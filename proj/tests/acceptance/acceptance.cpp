// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "ricciot/coupling.hpp"
#include "ricciot/diffusion.hpp"
#include "ricciot/errors.hpp"
#include "ricciot/harness.hpp"
#include "ricciot/lflow.hpp"
#include "ricciot/transport.hpp"

using namespace ricciot;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

std::string g_configs = "configs";
int g_failed = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failed;
  std::printf("[%s] %d %s | %s | %.1fs\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Monotonicity at the configured resolution with tol_mono from the half-resolution rerun.
Outcome monotone_run(const std::string& file, double runtime_target) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load_config(g_configs + "/" + file);
  const ConvergenceTable table = resolution_study(cfg);
  const auto grid = cfg.experiment == Experiment::ThetaMonotonicity ? cfg.s_grid.values() : cfg.tau_grid.values();
  bool pass = true;
  std::ostringstream d;
  for (std::size_t k = 0; k < table.series.back().size(); ++k) {
    const MonotonicityReport r = monotonicity(grid, table.series.back()[k], table.tol_mono[k]);
    pass = pass && r.pass;
    d << "series " << k << ": max increase " << fmt(r.max_increase) << " <= tol_mono " << fmt(r.tol_mono) << "; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  d << "N = " << cfg.N << ", runtime " << fmt(secs) << "s (target " << runtime_target << "s)";
  return {pass && secs < runtime_target, d.str()};
}

Outcome harness_run(const std::string& file) {
  const ExperimentConfig cfg = load_config(g_configs + "/" + file);
  const fs::path out = fs::temp_directory_path() / "ricciot_acceptance";
  const RunResult r = run(cfg, out.string());
  std::string summary = r.summary;
  std::replace(summary.begin(), summary.end(), '\n', ' ');
  return {r.exit_code == kExitPass && r.verdict == "PASS", r.verdict + ": " + summary};
}

SamplePoint sphere_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), a(0.0, 2 * pi);
  return {std::acos(u(rng)), a(rng)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_configs = argv[1];

  report(1, "e^{K tau} W_p nonincreasing on the backward Ricci sphere (p = 1, 2)",
         [] { return monotone_run("sphere_wp_monotonicity.yaml", 300.0); });

  report(2, "optimal cost for eta = sqrt(s) nonincreasing", [] { return monotone_run("sphere_sqrt_cost.yaml", 300.0); });

  report(3, "W_2 nonincreasing on the shrinking torus c = 1 - 0.3 tau",
         [] { return monotone_run("shrinking_torus_w2.yaml", 300.0); });

  report(4, "coupled Laplacian inequality sweep and equality case", [] {
    const Outcome sweep = harness_run("lemma_sweep.yaml");
    const ScaleFlow s = ScaleFlow::backward_ricci(Model::Sphere2, 1.0, 0.0, {0.0, 1.0});
    const CostFunction sq = power_cost(2.0, 0.0);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> tau(0.0, 1.0);
    double worst = 0.0;
    int n = 0;
    while (n < 200) {
      const SamplePoint x = sphere_point(rng), y = sphere_point(rng);
      const double ang = standard_distance(Model::Sphere2, x, y);
      if (ang < 0.05 || ang > pi - 0.1) continue;
      const double t = tau(rng);
      worst = std::max(worst, std::abs(lemma_gap(s, t, sq, make_pair(s, t, x, y))));
      ++n;
    }
    return Outcome{sweep.pass && worst <= 1e-8,
                   sweep.detail + " | equality case max |gap| = " + fmt(worst) + " over 200 pairs (<= 1e-8)"};
  });

  report(5, "Kantorovich duality and brute-force agreement", [] {
    std::mt19937_64 rng(2025);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_gap = 0.0, worst_viol = 0.0;
    const std::size_t sizes[] = {2, 5, 10, 25, 50, 100, 200, 300, 400};
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t m = sizes[trial % 9], n = sizes[(trial * 7 + 3) % 9];
      CostMatrix C(m, n);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) C(i, j) = trial % 2 ? u(rng) : std::floor(10 * u(rng));
      DiscreteMeasure a, b;
      for (std::size_t i = 0; i < m; ++i) a.weights.push_back(u(rng) < 0.1 ? 0.0 : u(rng) + 1e-3);
      for (std::size_t j = 0; j < n; ++j) b.weights.push_back(u(rng) < 0.1 ? 0.0 : u(rng) + 1e-3);
      a.weights[0] += 1e-3;
      b.weights[0] += 1e-3;
      const double sa = std::accumulate(a.weights.begin(), a.weights.end(), 0.0);
      const double sb = std::accumulate(b.weights.begin(), b.weights.end(), 0.0);
      for (double& w : a.weights) w /= sa;
      for (double& w : b.weights) w /= sb;
      const ExactSolution s = solve_exact(C, a, b);
      worst_gap = std::max(worst_gap, std::abs(duality_gap(C, s.plan, s.potentials, a, b)) / (1 + std::abs(s.value)));
      worst_viol = std::max(worst_viol, s.potentials.max_violation(C));
    }
    int mismatches = 0;
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 1 + trial % 6;
      CostMatrix C(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) C(i, j) = std::floor(20 * u(rng));
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      double best = 1e300;
      do {
        double c = 0;
        for (int i = 0; i < n; ++i) c += C(i, perm[i]);
        best = std::min(best, c);
      } while (std::next_permutation(perm.begin(), perm.end()));
      const auto uni = DiscreteMeasure::uniform(n);
      if (std::abs(solve_exact(C, uni, uni).value * n - best) > 1e-12 * (1 + best)) ++mismatches;
    }
    return Outcome{worst_gap <= 1e-9 && worst_viol <= 1e-9 && mismatches == 0,
                   "max relative gap " + fmt(worst_gap) + ", max dual violation " + fmt(worst_viol) +
                       " on 100 instances up to 400x400; brute-force mismatches " + std::to_string(mismatches) + "/60"};
  });

  report(6, "competitive pair preserved and J constant", [] { return harness_run("duality_preservation.yaml"); });

  report(7, "L-distance, geodesic, time-scaling, frame and summed-variation checks", [] {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ScaleFlow torus = ScaleFlow::backward_ricci(Model::Torus2, 1.0, 0.0, {0.0, 3.0});
    const ScaleFlow sphere = ScaleFlow::backward_ricci(Model::Sphere2, 1.0, 0.0, {0.0, 3.0});
    double flat = 0.0;
    for (int n = 0; n < 50;) {
      const SamplePoint x{u(rng), u(rng)}, y{u(rng), u(rng)};
      const double t1 = 0.05 + u(rng), t2 = t1 + 0.05 + 1.5 * u(rng);
      try {
        const double D = standard_distance(Model::Torus2, x, y);
        flat = std::max(flat, std::abs(l_distance(torus, x, t1, y, t2) - D * D / (2 * (std::sqrt(t2) - std::sqrt(t1)))));
        ++n;
      } catch (const CutLocusError&) {
      }
    }
    double residual = 0.0, frame = 0.0, slack = -1e300;
    int eq10 = 0, eq10_pass = 0;
    while (eq10 < 100) {
      const SamplePoint x = sphere_point(rng), y = sphere_point(rng);
      const double ang = standard_distance(Model::Sphere2, x, y);
      if (ang < 0.05 || ang > pi - 0.2) continue;
      const double t1 = 0.05 + u(rng), t2 = t1 + 0.05 + 1.5 * u(rng);
      const LPath g = l_geodesic(sphere, x, t1, y, t2);
      residual = std::max(residual, g.residual);
      frame = std::max(frame, frame_transport(sphere, g).invariant_error);
      const SummedVariationReport r = summed_variation_check(sphere, x, t1, y, t2, 1e-3);
      slack = std::max(slack, r.lhs - r.rhs);
      eq10_pass += r.pass;
      ++eq10;
    }
    double slope_lo = 1e300, slope_hi = -1e300;
    const SamplePoint xs[] = {{0.5, 0.2}, {0.3, 1.0}, {1.9, 0.4}};
    const SamplePoint ys[] = {{1.4, 1.0}, {1.2, 2.2}, {1.0, 1.5}};
    for (int k = 0; k < 3; ++k) {
      const double r1 = partL_residual(sphere, xs[k], 0.3 + 0.1 * k, ys[k], 1.3 + 0.2 * k, 1e-3);
      const double r2 = partL_residual(sphere, xs[k], 0.3 + 0.1 * k, ys[k], 1.3 + 0.2 * k, 5e-4);
      const double slope = std::log(r1 / r2) / std::log(2.0);
      slope_lo = std::min(slope_lo, slope);
      slope_hi = std::max(slope_hi, slope);
    }
    const bool pass = flat <= 1e-6 && residual <= 1e-6 && slope_lo >= 1.7 && slope_hi <= 2.3 && frame <= 1e-8 &&
                      eq10_pass == 100;
    return Outcome{pass, "flat Q error " + fmt(flat) + ", geodesic residual " + fmt(residual) + ", time-scaling slope [" +
                             fmt(slope_lo) + ", " + fmt(slope_hi) + "], frame invariant " + fmt(frame) +
                             ", summed variation " + std::to_string(eq10_pass) + "/100 (max lhs - rhs " + fmt(slack) +
                             ")"};
  });

  report(8, "Theta nonincreasing along the exponential clock", [] { return monotone_run("theta_sphere.yaml", 900.0); });

  report(9, "mass conservation and spectral closed forms", [] {
    const ScaleFlow s = ScaleFlow::backward_ricci(Model::Sphere2, 1.0, 0.0, {0.0, 2.0});
    const ScaleFlow t = ScaleFlow::backward_ricci(Model::Torus2, 1.0, 0.0, {0.0, 2.0});
    double mass = 0.0, modes = 0.0;
    const SpectralDensity us = density_from_mixture(s, 0.0, {{0.6, 0.0, 4.0, 1.0}, {2.3, 0.0, 9.0, 0.5}}, 48);
    const SpectralDensity ut = density_from_mixture(t, 0.0, {{0.3, 0.4, 50.0, 1.0}}, 16);
    for (double tau : {0.1, 0.5, 1.0, 2.0}) {
      const SpectralDensity vs = evolve_conjugate(s, us, 0.0, tau);
      const SpectralDensity vt = evolve_conjugate(t, ut, 0.0, tau);
      mass = std::max({mass, std::abs(density_mass(s, vs) - 1.0), std::abs(density_mass(t, vt) - 1.0)});
      const double c = s.scale(tau);
      for (int l = 0; l <= 48; ++l) {
        const double expected = us.legendre[l] * std::pow(1.0 / c, 1.0 + l * (l + 1) / 2.0);
        modes = std::max(modes, std::abs(vs.legendre[l] - expected));
      }
      for (int k1 = -16; k1 <= 16; ++k1) {
        for (int k2 = -16; k2 <= 16; ++k2) {
          const auto expected = ut.fourier_at(k1, k2) * std::exp(-4 * pi * pi * (k1 * k1 + k2 * k2) * tau);
          modes = std::max(modes, std::abs(vt.fourier_at(k1, k2) - expected));
        }
      }
    }
    return Outcome{mass <= 1e-10 && modes <= 1e-10,
                   "mass defect " + fmt(mass) + ", mode error vs closed form " + fmt(modes)};
  });

  std::printf("%d of 9 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
