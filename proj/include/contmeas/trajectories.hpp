#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "contmeas/coherent.hpp"
#include "contmeas/core.hpp"
#include "contmeas/noise.hpp"

namespace contmeas {

/// Quadrature expectation values of a wavefunction. cov_pq is the
/// symmetrized covariance <{q - <q>, p - <p>}>/2; momenta are spectral.
struct Expectations {
  double mean_q = 0.0;
  double mean_p = 0.0;
  double var_q = 0.0;
  double cov_pq = 0.0;
  double var_p = 0.0;
  double mean_q2 = 0.0;   ///< <q^2>
  double mean_dv = 0.0;   ///< <dV/dq>, filled by the solver
};

Expectations expectations(const WaveFunction& psi, double hbar);

struct SseState {
  WaveFunction psi;
  double t = 0.0;
  Complex a;           ///< <A>, A = sqrt(kappa) q + i sqrt(gamma/(8 m kT)) p
  Expectations ex;
  double phi = 0.0;    ///< accumulated action (linear potentials only)
  double norm_change = 0.0;  ///< |psi|^2 - 1 before the last renormalization
  double max_norm_error = 0.0;  ///< largest |norm - 1| after renormalization

  explicit SseState(WaveFunction w) : psi(std::move(w)) {}
};

/// Builds a state and fills its caches.
SseState make_sse_state(WaveFunction psi, const PhysicalParams& params, const Potential& pot,
                        double t = 0.0);

enum class SseModel {
  Full,              ///< dissipative equation with friction and momentum noise
  Dissipationless,   ///< position localization only
};

/// Split-step integrator. Per step, with Qt = q - <q> frozen at the step start:
/// exp(-kappa Qt^2 dt/2), Strang splitting of the Hamiltonian part (the
/// friction anticommutator folded into a gauge-transformed kinetic step), the
/// unitary kick exp(i c_p (p - <p>) dw), then exp(-kappa Qt^2 dt/2 + sqrt(kappa)
/// Qt dw) and renormalization. Splitting the narrowing symmetrically keeps the
/// width fixed point and the noise coefficients of <q>, <p> second order in dt.
/// Throws SolverError if the norm change deviates from its Gaussian-state
/// expectation by more than 1e-3 relative in one step.
class SsePropagator {
 public:
  SsePropagator(const PhysicalParams& params, const Potential& pot, const Grid& grid,
                SseModel model = SseModel::Full);

  void step(SseState& s, double dt, double dw) const;
  /// Largest stable-and-accurate step for the current state:
  /// 1/(50 max(omega0, gamma, 4 kappa sigma_q^2)), capped by dt_max.
  double suggested_dt(const SseState& s, double dt_max) const;

  const PhysicalParams& params() const { return params_; }
  SseModel model() const { return model_; }

 private:
  PhysicalParams params_;
  Potential pot_;
  Grid grid_;
  SseModel model_;
  std::optional<CoherentParams> cp_;  ///< for the action bookkeeping
};

/// Single steps; each call builds a propagator, so prefer SsePropagator in loops.
SseState sse_step(SseState state, const PhysicalParams& params, const Potential& pot, double dt,
                  double dw);
SseState sse_dissipationless_step(SseState state, const PhysicalParams& params,
                                  const Potential& pot, double dt, double dw);

/// Recorded trajectory: expectations before every step and the increment used.
struct SseRecord {
  std::vector<double> t;
  std::vector<Expectations> ex;  ///< size = steps + 1
  std::vector<double> dt;        ///< size = steps
  std::vector<double> dw;        ///< size = steps
  std::vector<double> phi;       ///< size = steps + 1
  double max_norm_error = 0.0;
};

/// Runs n_steps with a fixed dt (or adaptive steps bounded by dt when
/// `adaptive`), drawing increments from src.
SseRecord sse_run(const SsePropagator& prop, SseState& state, double dt, std::size_t n_steps,
                  NoiseSource& src, bool adaptive = false, double t_end = -1.0);

struct SdeCheckReport {
  double rms_residual_p = 0.0;
  double rms_residual_q = 0.0;
  double normalized_residual = 0.0;  ///< residual RMS over increment RMS
  double max_dt = 0.0;
  bool scheme_bug = false;  ///< residual RMS > 10 dt
};

/// Compares realized increments of <p>, <q> with
///   d<p> = -(gamma <p> + <V'>) dt + 2 sqrt(kappa) sigma_pq^2 dw,
///   d<q> = <p>/m dt + (2 sqrt(kappa) sigma_q^2 - gamma/(2 sqrt(kappa))) dw.
/// For the dissipationless model gamma terms are dropped from the drift and
/// the momentum noise.
SdeCheckReport expectation_sde_check(const SseRecord& rec, const PhysicalParams& params,
                                     SseModel model = SseModel::Full);

/// Ensemble over streams 0..n_traj-1 of `seed`.
struct SseEnsembleResult {
  std::vector<double> t;
  std::vector<double> mean_q;     ///< average of <q>
  std::vector<double> se_mean_q;
  std::vector<double> delta_q2;   ///< average <q^2> minus (average <q>)^2
  std::vector<double> se_delta_q2;
  std::vector<double> mean_p;
  std::vector<double> se_mean_p;
  std::optional<DensityMatrix> rho;  ///< mean projector at the final time
  double max_norm_error = 0.0;
};

SseEnsembleResult sse_ensemble(const PhysicalParams& params, const Potential& pot,
                               const WaveFunction& psi0, double dt, std::size_t n_steps,
                               std::size_t n_traj, std::uint64_t seed, std::size_t record_every,
                               SseModel model = SseModel::Full, bool keep_density = true);

/// Mean of |psi><psi| over n_traj trajectories.
DensityMatrix ensemble_density(const PhysicalParams& params, const Potential& pot,
                               const WaveFunction& psi0, double dt, std::size_t n_steps,
                               std::size_t n_traj, std::uint64_t seed);

struct ConvergenceReport {
  std::vector<double> t;
  std::vector<double> gap_q;   ///< |sigma_q^2(t) - sigma_q^2(inf)|
  std::vector<double> gap_pq;  ///< |sigma_pq^2(t) - sigma_pq^2(inf)|
  std::vector<double> gap_width;  ///< |w(t) - w(inf)| / |w(inf)| for the complex width
  std::optional<double> fitted_rate;  ///< decay rate of gap_width
  double target_rate = 0.0;           ///< 2 |Im omega|
  /// Median gap over the last tenth of the record: the time-step floor.
  double floor = 0.0;
  bool flagged = false;  ///< fewer than 10 points in the fit window or no decay
};

/// Fits the decay of the complex-width gap from its first drop below rel_hi
/// down to max(rel_lo, 30 * floor).
ConvergenceReport convergence_diagnostics(const SseRecord& rec, const CoherentParams& cp,
                                          double rel_hi = 1e-1, double rel_lo = 1e-7);

}  // namespace contmeas
