#pragma once

#include <string>
#include <vector>

#include "contmeas/core.hpp"

namespace contmeas {

struct WignerReport {
  double imag_residue = 0.0;       ///< max |Im W| / max |Re W|
  double boundary_fraction = 0.0;  ///< max |W| on the outer p rows / max |W|
  bool aliasing = false;           ///< boundary_fraction > 1e-6
};

/// W(p, q) = (1/2 pi hbar) int dz exp(i p z / hbar) rho(q - z/2, q + z/2).
/// rho is upsampled by two with Fourier interpolation so that q -/+ z/2 land
/// on samples. The p axis has n points spaced 2 pi hbar / (n dq), centred on 0;
/// the q axis is the density-matrix grid.
WignerGrid wigner_transform(const DensityMatrix& rho, double hbar, WignerReport* report = nullptr);

Moments wigner_moments(const WignerGrid& w);

struct WignerRhsOptions {
  bool include_dissipation = true;
  /// Number of terms of the odd-derivative potential series to keep; -1 keeps all.
  int series_terms = -1;
  /// Drops every hbar-dependent term, leaving the classical Fokker-Planck operator.
  bool classical = false;
};

/// Right-hand side of the Wigner equation of motion with spectral derivatives:
/// -(p/m) dW/dq + sum_n (-hbar^2/4)^n / (2n+1)! V^(2n+1) d^(2n+1)W/dp^(2n+1)
/// + d/dp(gamma p W) + m gamma kT d^2W/dp^2 + (hbar^2 gamma / 16 m kT) d^2W/dq^2.
/// Friction and the last term are dropped without dissipation. Throws
/// UnsupportedError for potentials that are neither linear nor polynomial.
Eigen::MatrixXd wigner_rhs(const WignerGrid& w, const PhysicalParams& params, const Potential& pot,
                           double t, const WignerRhsOptions& opt = {});

struct WignerSnapshot {
  double t = 0.0;
  WignerGrid w;
};

struct EomResidual {
  /// max over interior snapshots of |dW/dt - RHS|_2 / |RHS|_2
  double relative = 0.0;
  std::vector<double> per_snapshot;
};

/// Central differences of the stored series against wigner_rhs. Needs at least
/// three snapshots on a common phase-space grid.
EomResidual wigner_eom_residual(const std::vector<WignerSnapshot>& series,
                                const PhysicalParams& params, const Potential& pot,
                                const WignerRhsOptions& opt = {});

}  // namespace contmeas
