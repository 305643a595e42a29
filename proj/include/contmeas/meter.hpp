#pragma once

#include <vector>

#include "contmeas/core.hpp"
#include "contmeas/noise.hpp"

namespace contmeas {

/// Finite set of meter oscillators. Each sampled mode stands for `weight`
/// physical oscillators of mass M moving together, so its lumped mass is
/// mode_mass = weight * M; sums over modes then reproduce integrals over the
/// continuous frequency density.
struct BathState {
  std::vector<double> omegas;
  std::vector<double> Q;  ///< absolute positions
  std::vector<double> P;
  std::vector<double> mode_mass;
  double M = 1.0;  ///< mass of one physical oscillator
  double q_ref = 0.0;
  double omega_min = 0.0;
  double omega_max = 0.0;

  std::size_t size() const { return omegas.size(); }
};

/// Number of physical oscillators with frequency in [omega_min, Omega] for
/// the density 2 m gamma / (pi M omega^2).
double bath_mode_count(const PhysicalParams& params, double omega_min);

/// Inverse-CDF samples of the 1/omega^2 law on [omega_min, Omega], with
/// Gibbs initial conditions conditioned on the system sitting at q_ref:
/// Q - q_ref ~ N(0, kT/(mode_mass omega^2)), P ~ N(0, mode_mass kT).
BathState sample_bath(const PhysicalParams& params, std::size_t n, double omega_min, double q_ref,
                      NoiseSource& src);

/// Physical oscillators (mass M each) with frequencies uniform in
/// [band_lo * Omega, Omega], Gibbs-sampled around q_ref. These are the
/// pointer oscillators.
BathState sample_band(const PhysicalParams& params, std::size_t n, double band_lo, double q_ref,
                      NoiseSource& src);

/// Pi(t) = sum_n mode_mass w^2 [(Q_n - q_ref) cos wt + P_n/(mode_mass w) sin wt].
std::vector<double> synthesize_noise(const BathState& bath, const std::vector<double>& times);

/// Pi(t0) times the integral of Pi(t0 + u) over |u| <= half_window, per mode
/// in closed form. Its Gibbs average is kT times the integrated kernel.
double noise_window_product(const BathState& bath, double t0, double half_window);

struct KernelValues {
  double gamma = 0.0;           ///< 2 m gamma sin(Omega t) / (pi t)
  double lambda_leading = 0.0;  ///< (kT/hbar^2) Gamma(t)
  double lambda_next = 0.0;     ///< -(1/(12 kT)) d^2 Gamma/dt^2
};
KernelValues kernels(const PhysicalParams& params, double t);

/// Integral of the continuum Gamma over |t| <= T: 2 m gamma (2/pi) Si(Omega T).
double integrated_kernel(const PhysicalParams& params, double half_window);
/// Sine integral.
double sine_integral(double x);

/// Resolution kT/(M Omega^2).
double resolution(const PhysicalParams& params);

struct PointerReadout {
  double lambda = 0.0;
  double ell2 = 0.0;
  std::vector<double> t;
  std::vector<double> R;  ///< band average of the exponentially filtered Q_n
  std::vector<double> S;  ///< band average of the exponentially filtered Q_n^2
};

/// Drives the pointer oscillators along the system path q(t) (samples at
/// `times`, linear in between) with the exact forced-oscillator solution and
/// applies the filter lambda exp(-lambda t). `substeps` splits each sample
/// interval so that substep * Omega stays small. Requires
/// Omega >= 10 lambda and lambda >= 10/tau.
PointerReadout pointer_run(const BathState& band, const std::vector<double>& times,
                           const std::vector<double>& q, const PhysicalParams& params,
                           double lambda);

/// Ensemble pointer statistics at each time: mean of R and the pointer
/// variance E[S] - E[R]^2, with Monte-Carlo standard errors.
struct PointerStats {
  std::vector<double> t;
  std::vector<double> mean_R;
  std::vector<double> se_mean_R;
  std::vector<double> var_R;
  std::vector<double> se_var_R;
};
PointerStats pointer_statistics(const std::vector<PointerReadout>& runs);

}  // namespace contmeas
