#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace contmeas {

using Complex = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Input outside an operation's documented domain.
struct DomainError : Error {
  using Error::Error;
};
/// A user callable (e.g. a nonlinear potential) threw or returned garbage.
struct EvaluationError : Error {
  using Error::Error;
};
/// Numerical failure inside a solver: NaN, norm blow-up, leakage, ...
struct SolverError : Error {
  using Error::Error;
};
/// Requested combination is not supported by the operation.
struct UnsupportedError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Physical parameters

/// Parameters of the measured system and of the meter bath. kB defaults to 1
/// so all quantities are dimensionless; hbar is an ordinary parameter.
struct PhysicalParams {
  double m = 1.0;        ///< system mass
  double gamma = 0.5;    ///< relaxation rate
  double T = 10.0;       ///< meter temperature
  double kB = 1.0;       ///< Boltzmann constant
  double hbar = 1.0;     ///< Planck constant
  double M = 1.0;        ///< bath oscillator mass
  double Omega = 100.0;  ///< frequency cutoff of the bath
  double tau = 1.0;      ///< fastest timescale of the measured system

  double kT() const { return kB * T; }
  /// Localization rate 2 m gamma kB T / hbar^2.
  double kappa() const { return 2.0 * m * gamma * kB * T / (hbar * hbar); }

  /// Throws DomainError unless every field is finite and strictly positive.
  void validate() const;
};

struct RegimeReport {
  double hbar_omega_over_kT = 0.0;  ///< hbar*Omega/(kB T)
  double inv_omega_tau = 0.0;       ///< 1/(Omega tau)
  double hbar_over_kT_tau = 0.0;    ///< hbar/(kB T tau)
  bool hbar_omega_over_kT_ok = true;
  bool inv_omega_tau_ok = true;
  bool hbar_over_kT_tau_ok = true;

  static constexpr double kWarnThreshold = 0.1;

  bool all_pass() const { return hbar_omega_over_kT_ok && inv_omega_tau_ok && hbar_over_kT_tau_ok; }
  std::vector<std::string> warnings() const;
};

/// Reports how well hbar/(kB T) << 1/Omega << tau holds. Never throws on
/// regime violations: the limits of interest deliberately stress them.
RegimeReport validate_regime(const PhysicalParams& params);

// ---------------------------------------------------------------------------
// Potentials

/// V(q,t) = v0(t) + v1(t) q + m omega0^2 q^2 / 2.
struct LinearPotential {
  std::function<double(double)> v0;
  std::function<double(double)> v1;
  double omega0 = 0.0;
  double mass = 1.0;
};

/// General V(q,t) with its analytic derivative. When `poly` is set, V is the
/// time-independent polynomial sum_k poly[k] q^k and derivatives of every
/// order are available.
struct NonlinearPotential {
  std::function<double(double, double)> value;
  std::function<double(double, double)> derivative;
  std::optional<std::vector<double>> poly;
};

class Potential {
 public:
  using Kind = std::variant<LinearPotential, NonlinearPotential>;

  static Potential free_particle();
  static Potential harmonic(double mass, double omega0);
  static Potential linear(double mass, double omega0, double v0, double v1);
  static Potential linear(double mass, double omega0, std::function<double(double)> v0,
                          std::function<double(double)> v1);
  /// Validates `derivative` against central finite differences on a few probe
  /// points and throws DomainError if they disagree beyond 1e-6 relative.
  static Potential nonlinear(std::function<double(double, double)> value,
                             std::function<double(double, double)> derivative);
  static Potential polynomial(std::vector<double> coefficients);

  double value(double q, double t) const;
  /// dV/dq at (q, t).
  double force_gradient(double q, double t) const;
  /// d^n V / dq^n for linear and polynomial potentials.
  double derivative(int order, double q, double t) const;

  bool is_linear() const { return std::holds_alternative<LinearPotential>(kind_); }
  bool is_polynomial() const;
  /// Highest nonvanishing derivative order (polynomial degree); nullopt for
  /// general nonlinear potentials.
  std::optional<int> degree() const;
  double omega0() const;
  const Kind& kind() const { return kind_; }

  /// Max |analytic - finite difference| / max(1, |analytic|) over the probes.
  double derivative_mismatch(const std::vector<double>& probes, double t) const;

 private:
  explicit Potential(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// dV/dq; for the linear kind this is exactly v1(t) + m omega0^2 q.
double eval_force(const Potential& pot, double q, double t);

// ---------------------------------------------------------------------------
// Grids and states

/// Uniform periodic position grid; points q_min + i*dq, i < n.
class Grid {
 public:
  Grid(double q_min, double q_max, std::size_t n);

  double q_min() const { return q_min_; }
  double q_max() const { return q_max_; }
  std::size_t size() const { return n_; }
  double dq() const { return dq_; }
  double q(std::size_t i) const { return q_min_ + static_cast<double>(i) * dq_; }
  /// Signed wavenumber of FFT bin k (standard FFT ordering).
  double wavenumber(std::size_t k) const;
  double dk() const { return 2.0 * kPi / (static_cast<double>(n_) * dq_); }
  /// Conjugate momentum spacing 2 pi hbar / (n dq).
  double momentum_spacing(double hbar) const { return hbar * dk(); }
  /// Index of the grid point nearest q (clamped).
  std::size_t nearest_index(double q) const;

  bool operator==(const Grid& other) const = default;

 private:
  double q_min_;
  double q_max_;
  std::size_t n_;
  double dq_;
};

struct WaveFunction {
  Grid grid;
  Eigen::VectorXcd values;

  WaveFunction(Grid g, Eigen::VectorXcd v);
  double norm() const;  ///< sqrt(sum |psi|^2 dq)
  void normalize();
  Complex inner(const WaveFunction& other) const;  ///< <this|other>
};

struct DensityMatrix {
  Grid grid;
  Eigen::MatrixXcd values;  ///< rho(q1, q2), row index q1

  DensityMatrix(Grid g, Eigen::MatrixXcd v);
  static DensityMatrix projector(const WaveFunction& psi);

  Complex trace() const;
  double purity() const;
  /// max |rho - rho^dagger| / max |rho|.
  double hermiticity_residual() const;
  void symmetrize();
  /// Smallest eigenvalue of the operator (includes the dq measure). With
  /// `stride` > 1 a principal submatrix is used; by interlacing its smallest
  /// eigenvalue is an upper bound, so a negative result is conclusive.
  double min_eigenvalue(std::size_t stride = 1) const;
  double mean_q() const;
  double var_q() const;
};

/// Equally spaced axis.
struct Axis {
  double min = 0.0;
  double step = 1.0;
  std::size_t n = 0;

  double operator[](std::size_t i) const { return min + static_cast<double>(i) * step; }
  double max() const { return (*this)[n - 1]; }
  std::vector<double> values() const;
};

struct Moments {
  double mean_q = 0.0;
  double var_q = 0.0;
  double mean_p = 0.0;
  double var_p = 0.0;
};

/// Real phase-space function sampled on (p, q); rows index p.
struct WignerGrid {
  Axis p;
  Axis q;
  Eigen::MatrixXd values;

  double integral() const;
  /// Integral over p at each q.
  std::vector<double> q_marginal() const;
  std::vector<double> p_marginal() const;
};

/// Quadrature moments of a normalized phase-space density (the density is
/// renormalized by its integral first).
Moments phase_space_moments(const Axis& p, const Axis& q, const Eigen::MatrixXd& w);

bool is_power_of_two(std::size_t n);

}  // namespace contmeas
