#pragma once

#include <functional>
#include <vector>

#include "contmeas/core.hpp"

namespace contmeas {

struct LindbladConfig {
  /// false selects the dissipationless model: Hamiltonian plus localization only.
  bool include_dissipation = true;
  double dt = 1e-3;
  std::size_t n_steps = 0;
  /// Positivity is checked every `eig_every` steps on a stride-`eig_stride` submatrix.
  std::size_t eig_every = 10;
  std::size_t eig_stride = 2;
};

struct LindbladReport {
  double max_trace_error = 0.0;
  double min_eigenvalue = 1.0;
  std::size_t eigen_checks = 0;
  double initial_purity = 0.0;
  double final_purity = 0.0;
  /// Set when purity grew by more than 1e-9 between checks.
  bool purity_increase = false;
};

/// Split-step propagator for the measurement master equation on rho(q1, q2).
/// Construction precomputes the dt-dependent operators; step() is const and
/// may be shared across threads.
class LindbladPropagator {
 public:
  LindbladPropagator(const PhysicalParams& params, const Potential& pot, const Grid& grid,
                     double dt, bool include_dissipation);
  /// Advances rho from t to t + dt in place and re-symmetrizes it.
  void step(DensityMatrix& rho, double t) const;
  double dt() const { return dt_; }

 private:
  void pointwise(Eigen::MatrixXcd& r, double t, double h) const;
  void kinetic(Eigen::MatrixXcd& r) const;
  void friction(Eigen::MatrixXcd& r) const;

  PhysicalParams params_;
  Potential pot_;
  Grid grid_;
  double dt_;
  bool dissipation_;
  Eigen::MatrixXcd kin_;     // multiplier in (P1, P2)
  Eigen::MatrixXcd loc_;     // localization for half a step
  Eigen::MatrixXd dilate_;   // r -> lambda r for half a step
  Eigen::VectorXd shift_;    // y-shift per r row
};

DensityMatrix lindblad_step(const DensityMatrix& rho, const PhysicalParams& params,
                            const Potential& pot, const LindbladConfig& cfg, double t = 0.0);

using LindbladObserver = std::function<void(double t, const DensityMatrix&)>;

/// Runs cfg.n_steps steps from t0. Throws SolverError if the trace drifts by
/// more than 1e-6 or a checked eigenvalue falls below -1e-4. The observer
/// sees the initial state and every step.
DensityMatrix lindblad_run(const DensityMatrix& rho0, const PhysicalParams& params,
                           const Potential& pot, const LindbladConfig& cfg,
                           LindbladReport* report = nullptr, const LindbladObserver& observer = {},
                           double t0 = 0.0);

struct VonNeumannPoint {
  double gamma = 0.0;
  double T = 0.0;
  double tau = 0.0;
  double expected = 0.0;  ///< kappa tau / 2
  double fitted = 0.0;
  double relative_error = 0.0;
  double mean_q_before = 0.0;
  double mean_q_after = 0.0;
  double max_diagonal_change = 0.0;
};

struct VonNeumannReport {
  std::vector<VonNeumannPoint> points;
};

/// Evolves rho0 for tau = 1/gamma at each (gamma, T) and fits
/// |rho(tau)/rho0| = exp(-c (q1 - q2)^2). Uses the dissipationless model
/// unless `include_dissipation` is set. params.gamma and params.T are
/// overridden by the sequence.
VonNeumannReport von_neumann_limit_check(const DensityMatrix& rho0, const PhysicalParams& params,
                                         const Potential& pot,
                                         const std::vector<std::pair<double, double>>& gamma_T,
                                         std::size_t substeps = 200,
                                         bool include_dissipation = false);

}  // namespace contmeas
