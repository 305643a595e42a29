#pragma once

#include "contmeas/coherent.hpp"
#include "contmeas/core.hpp"

namespace contmeas {

/// Free-particle superposition N (|p1 q1> + |p2 q2>) prepared at t0.
struct CatSpec {
  double p1 = 0.0, q1 = 0.0, p2 = 0.0, q2 = 0.0;
  double t0 = 0.0;
  PhysicalParams params;
  CoherentParams cp;
};

/// Builds a CatSpec with the free-particle coherent parameters.
CatSpec make_cat_spec(const PhysicalParams& params, double p1, double q1, double p2, double q2,
                      double t0 = 0.0);

/// N = 1 / sqrt(2 (1 + exp(-C))) with C the overlap exponent of the label
/// differences. Exact only when (p1 + p2)(q1 - q2) = 0; otherwise the overlap
/// phase also enters the true norm.
double cat_normalization(const CatSpec& spec);

struct CatCoefficients {
  double Cxx = 0.0, Cxy = 0.0, Cyy = 0.0;
  double Cx = 0.0, Cy = 0.0;
  double D = 0.0;  ///< 4 Cxx Cyy - Cxy^2
  double Sigma = 0.0, Upsilon = 0.0, Phi = 0.0;
};

/// Coefficients at time t for labels (p', q'). With `classical` the hbar -> 0
/// forms of Cxx, Cxy, Cyy are used and the linear terms are left at zero.
/// Throws SolverError if D <= 0 (DomainError for the classical set at t = t0).
CatCoefficients cat_coefficients(const CatSpec& spec, double p_prime, double q_prime, double t,
                                 bool classical = false);

/// Evolved single-Gaussian kernel W_{p'q'}(p, q, t).
double cat_gaussian_component(const CatSpec& spec, double p_prime, double q_prime, double p,
                              double q, double t, bool classical = false);

/// Full evolved cat Wigner function: two Gaussians plus the damped interference term.
double cat_wigner(const CatSpec& spec, double p, double q, double t);

/// Initial Wigner function of the superposition.
double cat_initial_wigner(const CatSpec& spec, double p, double q);

/// hbar -> 0 limit: mean of the two classical Gaussians.
double cat_classical_limit(const CatSpec& spec, double p, double q, double t);

/// Long-time form: classical Gaussians plus the midpoint term with weight
/// exp(-C) and the frozen phase (p1 + p2)(q1 - q2)/(2 hbar).
double cat_long_time(const CatSpec& spec, double p, double q, double t);

/// -C + Sigma(t) for the label differences.
double interference_log_weight(const CatSpec& spec, double t);
/// exp(-C + Sigma(t)).
double interference_weight(const CatSpec& spec, double t);

/// N (psi_1 + psi_2) on the grid.
WaveFunction cat_wavefunction(const CatSpec& spec, const Grid& grid);

/// Samples a phase-space function on the given axes; rows index p.
WignerGrid sample_phase_space(const Axis& p, const Axis& q,
                              const std::function<double(double, double)>& f);

}  // namespace contmeas
