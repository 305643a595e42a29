#pragma once

#include "contmeas/core.hpp"

namespace contmeas {

/// Gaussian fixed point of the measured dynamics for a quadratic potential.
struct CoherentParams {
  double sigma_q2 = 0.0;   ///< position variance
  double sigma_pq2 = 0.0;  ///< symmetrized covariance
  double sigma_p2 = 0.0;   ///< momentum variance, (hbar^2/4 + sigma_pq2^2)/sigma_q2
  double epsilon = 0.0;    ///< zero-point energy
  Complex omega;           ///< complex frequency, Re > 0 and Im < 0
  double residual_c1 = 0.0;  ///< relative residual of the first defining equation
  double residual_c2 = 0.0;  ///< relative residual of the second (incl. its imaginary identity)

  // Inputs retained for the functions below.
  double m = 1.0;
  double hbar = 1.0;
  double gamma = 0.0;
  double kT = 0.0;
  double omega0 = 0.0;

  /// sigma_p^2 sigma_q^2 - sigma_pq^4 - hbar^2/4; zero for these states.
  double uncertainty_residual() const;
  /// Complex width parameter (1 - 2i sigma_pq2/hbar) / (4 sigma_q2).
  Complex width() const;
};

/// Throws DomainError when kB T/(hbar omega0) < 0.1, where the closed forms
/// stop being physical, or when a radicand turns negative.
CoherentParams coherent_params(const PhysicalParams& params, double omega0);

/// Small-hbar limits of the variances: sigma_q2, sigma_pq2, sigma_p2.
struct LeadingOrderVariances {
  double sigma_q2;
  double sigma_pq2;
  double sigma_p2;
};
LeadingOrderVariances coherent_leading_order(const PhysicalParams& params);

/// psi(q) = (2 pi sigma_q2)^(-1/4) exp[-w (q-q')^2 + i p'(q-q')/hbar].
/// Throws DomainError if q' +- 6 sigma_q leaves the grid.
WaveFunction coherent_wavefunction(const CoherentParams& cp, double p_prime, double q_prime,
                                   const Grid& grid);

/// <p1 q1 | p2 q2>.
Complex coherent_overlap(const CoherentParams& cp, double p1, double q1, double p2, double q2);
/// Exponent C of the overlap magnitude for label differences (dp, dq).
double overlap_exponent(const CoherentParams& cp, double dp, double dq);

/// Wigner function of |p' q'>; peak value 1/(pi hbar).
double coherent_wigner(const CoherentParams& cp, double p_prime, double q_prime, double p,
                       double q);

/// Action increment [eps + p^2/2m + V(q,t) + gamma p q/2] dt - p dq.
/// Throws UnsupportedError for non-linear potentials.
double action_increment(const CoherentParams& cp, double p, double q, double dp, double dq,
                        double dt, const Potential& pot, double t = 0.0);

}  // namespace contmeas
