#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "contmeas/core.hpp"
#include "contmeas/meter.hpp"
#include "contmeas/noise.hpp"

namespace contmeas {

struct ClassicalTrajectory {
  std::vector<double> t;
  std::vector<double> p;
  std::vector<double> q;
  std::uint64_t stream = 0;
};

/// Euler-Maruyama for dp = -(gamma p + dV/dq) dt + sqrt(2 m gamma kT) dw,
/// dq = p/m dt. Requires dt <= min(tau, 1/gamma)/50; throws SolverError with
/// the step index and state on overflow.
ClassicalTrajectory langevin_run(const PhysicalParams& params, const Potential& pot, double p0,
                                 double q0, double dt, std::size_t n_steps, NoiseSource& src);

/// Independent Gaussian initial distribution in (p, q); zero widths give a
/// point.
struct InitialGaussian {
  double mean_p = 0.0;
  double mean_q = 0.0;
  double sd_p = 0.0;
  double sd_q = 0.0;
};

/// Moment time series with Monte-Carlo standard errors.
struct MomentSeries {
  std::vector<double> t;
  std::vector<Moments> m;
  std::vector<Moments> se;  ///< standard errors of each entry of m
};

/// Runs n_paths Langevin trajectories on streams 0..n_paths-1 of `seed` and
/// records ensemble moments every `record_every` steps. Stream k draws its
/// initial condition first, then its increments.
MomentSeries langevin_ensemble(const PhysicalParams& params, const Potential& pot,
                               const InitialGaussian& init, double dt, std::size_t n_steps,
                               std::size_t n_paths, std::uint64_t seed, std::size_t record_every);

/// Integrates the system coupled to an explicit finite bath. The bath is
/// advanced with its exact rotation at fixed q, the system with a drift
/// step, in the symmetric order drift/bath/drift. Requires dt * Omega <= 0.1.
/// The bath state after the last step is written to `final_bath` if given.
ClassicalTrajectory finite_bath_run(const PhysicalParams& params, const Potential& pot, double p0,
                                    double q0, BathState bath, double dt, std::size_t n_steps,
                                    BathState* final_bath = nullptr);

/// Total energy H(p,q,t) + H_m for the coupled system.
double total_energy(const PhysicalParams& params, const Potential& pot, double p, double q,
                    const BathState& bath, double t);

/// Phase-space density on a (p, q) grid.
struct PhaseSpaceDensity : WignerGrid {
  double t = 0.0;
};

/// Samples f(p, q) on the given axes.
PhaseSpaceDensity make_density(const Axis& p, const Axis& q,
                               const std::function<double(double, double)>& f);

struct FokkerPlanckReport {
  double max_leakage = 0.0;       ///< largest mass seen in the boundary margin
  double clipped_mass = 0.0;      ///< total |negative| mass clipped below 1e-12
  double min_value = 0.0;         ///< most negative value seen (reported, not clipped)
  double mass_drift = 0.0;        ///< |mass(t) - mass(0)|
};

/// Strang splitting: streaming, force kick, exact Ornstein-Uhlenbeck step in
/// p, force kick, streaming. The observer (if set) sees the density after
/// every step. Throws SolverError if the margin mass exceeds 1e-4.
PhaseSpaceDensity fokker_planck_solve(
    const PhysicalParams& params, const Potential& pot, PhaseSpaceDensity W0, double dt,
    std::size_t n_steps, FokkerPlanckReport* report = nullptr,
    const std::function<void(const PhaseSpaceDensity&, std::size_t)>& observer = {});

/// Quadrature moments of a density.
Moments classical_moments(const WignerGrid& W);

/// Exact first and second moments of the Fokker-Planck equation for a linear
/// potential with force v1 (constant) and frequency omega0, from a Gaussian
/// initial state with the given covariance.
struct GaussianMoments {
  double mean_p = 0.0;
  double mean_q = 0.0;
  double var_p = 0.0;
  double var_q = 0.0;
  double cov_pq = 0.0;
};
GaussianMoments fp_moments_exact(const PhysicalParams& params, double omega0, double v1,
                                 const GaussianMoments& initial, double t);

}  // namespace contmeas
