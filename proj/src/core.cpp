#include "contmeas/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace contmeas {

void PhysicalParams::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"m", m}, {"gamma", gamma}, {"T", T}, {"kB", kB},
      {"hbar", hbar}, {"M", M}, {"Omega", Omega}, {"tau", tau}};
  for (const auto& [name, v] : fields) {
    if (!std::isfinite(v) || v <= 0.0) {
      std::ostringstream os;
      os << "PhysicalParams." << name << " must be finite and > 0 (got " << v << ")";
      throw DomainError(os.str());
    }
  }
}

std::vector<std::string> RegimeReport::warnings() const {
  std::vector<std::string> out;
  auto add = [&](bool ok, const char* what, double r) {
    if (!ok) {
      std::ostringstream os;
      os << what << " = " << r << " exceeds " << kWarnThreshold;
      out.push_back(os.str());
    }
  };
  add(hbar_omega_over_kT_ok, "hbar*Omega/(kB*T)", hbar_omega_over_kT);
  add(inv_omega_tau_ok, "1/(Omega*tau)", inv_omega_tau);
  add(hbar_over_kT_tau_ok, "hbar/(kB*T*tau)", hbar_over_kT_tau);
  return out;
}

RegimeReport validate_regime(const PhysicalParams& params) {
  RegimeReport r;
  r.hbar_omega_over_kT = params.hbar * params.Omega / params.kT();
  r.inv_omega_tau = 1.0 / (params.Omega * params.tau);
  r.hbar_over_kT_tau = params.hbar / (params.kT() * params.tau);
  // A relative slack keeps ratios that are 0.1 up to rounding on the pass side.
  const double limit = RegimeReport::kWarnThreshold * (1.0 + 1e-12);
  r.hbar_omega_over_kT_ok = r.hbar_omega_over_kT <= limit;
  r.inv_omega_tau_ok = r.inv_omega_tau <= limit;
  r.hbar_over_kT_tau_ok = r.hbar_over_kT_tau <= limit;
  return r;
}

// ---------------------------------------------------------------------------

Potential Potential::free_particle() { return linear(1.0, 0.0, 0.0, 0.0); }

Potential Potential::harmonic(double mass, double omega0) { return linear(mass, omega0, 0.0, 0.0); }

Potential Potential::linear(double mass, double omega0, double v0, double v1) {
  return linear(mass, omega0, [v0](double) { return v0; }, [v1](double) { return v1; });
}

Potential Potential::linear(double mass, double omega0, std::function<double(double)> v0,
                            std::function<double(double)> v1) {
  if (!(mass > 0.0)) throw DomainError("linear potential needs a positive mass");
  return Potential(LinearPotential{std::move(v0), std::move(v1), omega0, mass});
}

Potential Potential::nonlinear(std::function<double(double, double)> value,
                               std::function<double(double, double)> derivative) {
  Potential pot(NonlinearPotential{std::move(value), std::move(derivative), std::nullopt});
  const double mismatch = pot.derivative_mismatch({-1.3, -0.5, 0.25, 0.9, 2.1}, 0.0);
  if (!(mismatch <= 1e-6)) {
    std::ostringstream os;
    os << "nonlinear potential derivative disagrees with finite differences (" << mismatch << ")";
    throw DomainError(os.str());
  }
  return pot;
}

namespace {

double poly_derivative(const std::vector<double>& c, int order, double q) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > static_cast<std::size_t>(order);) {
    double falling = 1.0;
    for (int j = 0; j < order; ++j) falling *= static_cast<double>(k - j);
    acc = acc * q + c[k] * falling;
  }
  return acc;
}

template <class F>
double guarded(F&& f, const char* what) {
  double v;
  try {
    v = f();
  } catch (const std::exception& e) {
    throw EvaluationError(std::string(what) + " failed: " + e.what());
  }
  if (!std::isfinite(v)) throw EvaluationError(std::string(what) + " returned a non-finite value");
  return v;
}

}  // namespace

Potential Potential::polynomial(std::vector<double> coefficients) {
  auto c = coefficients;
  auto value = [c](double q, double) { return poly_derivative(c, 0, q); };
  auto deriv = [c](double q, double) { return poly_derivative(c, 1, q); };
  return Potential(NonlinearPotential{value, deriv, std::move(coefficients)});
}

double Potential::value(double q, double t) const {
  if (const auto* lin = std::get_if<LinearPotential>(&kind_)) {
    return lin->v0(t) + lin->v1(t) * q + 0.5 * lin->mass * lin->omega0 * lin->omega0 * q * q;
  }
  const auto& nl = std::get<NonlinearPotential>(kind_);
  return guarded([&] { return nl.value(q, t); }, "potential value");
}

double Potential::force_gradient(double q, double t) const {
  if (const auto* lin = std::get_if<LinearPotential>(&kind_)) {
    return lin->v1(t) + lin->mass * lin->omega0 * lin->omega0 * q;
  }
  const auto& nl = std::get<NonlinearPotential>(kind_);
  return guarded([&] { return nl.derivative(q, t); }, "potential derivative");
}

double Potential::derivative(int order, double q, double t) const {
  if (order == 0) return value(q, t);
  if (order == 1) return force_gradient(q, t);
  if (const auto* lin = std::get_if<LinearPotential>(&kind_)) {
    return order == 2 ? lin->mass * lin->omega0 * lin->omega0 : 0.0;
  }
  const auto& nl = std::get<NonlinearPotential>(kind_);
  if (!nl.poly) throw UnsupportedError("higher derivatives need a polynomial potential");
  return poly_derivative(*nl.poly, order, q);
}

bool Potential::is_polynomial() const {
  if (is_linear()) return true;
  return std::get<NonlinearPotential>(kind_).poly.has_value();
}

std::optional<int> Potential::degree() const {
  if (const auto* lin = std::get_if<LinearPotential>(&kind_)) {
    return lin->omega0 != 0.0 ? 2 : 1;
  }
  const auto& nl = std::get<NonlinearPotential>(kind_);
  if (!nl.poly) return std::nullopt;
  int deg = 0;
  for (std::size_t k = 0; k < nl.poly->size(); ++k)
    if ((*nl.poly)[k] != 0.0) deg = static_cast<int>(k);
  return deg;
}

double Potential::omega0() const {
  if (const auto* lin = std::get_if<LinearPotential>(&kind_)) return lin->omega0;
  throw UnsupportedError("omega0 is only defined for linear potentials");
}

double Potential::derivative_mismatch(const std::vector<double>& probes, double t) const {
  double worst = 0.0;
  for (double q : probes) {
    const double h = 1e-5 * std::max(1.0, std::abs(q));
    const double fd = (value(q + h, t) - value(q - h, t)) / (2.0 * h);
    const double an = force_gradient(q, t);
    worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
  }
  return worst;
}

double eval_force(const Potential& pot, double q, double t) { return pot.force_gradient(q, t); }

// ---------------------------------------------------------------------------

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Grid::Grid(double q_min, double q_max, std::size_t n) : q_min_(q_min), q_max_(q_max), n_(n) {
  if (n < 16 || !is_power_of_two(n)) throw DomainError("grid size must be a power of two >= 16");
  if (!(q_max > q_min)) throw DomainError("grid needs q_max > q_min");
  dq_ = (q_max - q_min) / static_cast<double>(n);
}

double Grid::wavenumber(std::size_t k) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  auto kk = static_cast<std::ptrdiff_t>(k);
  if (kk >= n / 2) kk -= n;
  return static_cast<double>(kk) * dk();
}

std::size_t Grid::nearest_index(double q) const {
  const double x = std::round((q - q_min_) / dq_);
  if (x <= 0.0) return 0;
  return std::min(n_ - 1, static_cast<std::size_t>(x));
}

WaveFunction::WaveFunction(Grid g, Eigen::VectorXcd v) : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != grid.size())
    throw DomainError("wavefunction size does not match grid");
}

double WaveFunction::norm() const { return std::sqrt(values.squaredNorm() * grid.dq()); }

void WaveFunction::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw SolverError("cannot normalize wavefunction");
  values /= n;
}

Complex WaveFunction::inner(const WaveFunction& other) const {
  return values.dot(other.values) * grid.dq();
}

DensityMatrix::DensityMatrix(Grid g, Eigen::MatrixXcd v) : grid(std::move(g)), values(std::move(v)) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (values.rows() != n || values.cols() != n)
    throw DomainError("density matrix size does not match grid");
}

DensityMatrix DensityMatrix::projector(const WaveFunction& psi) {
  return DensityMatrix(psi.grid, psi.values * psi.values.adjoint());
}

Complex DensityMatrix::trace() const { return values.trace() * grid.dq(); }

double DensityMatrix::purity() const {
  // Tr rho^2 = sum |rho_ij|^2 dq^2 for Hermitian rho.
  return values.squaredNorm() * grid.dq() * grid.dq();
}

double DensityMatrix::hermiticity_residual() const {
  const double scale = values.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (values - values.adjoint()).cwiseAbs().maxCoeff() / scale;
}

void DensityMatrix::symmetrize() {
  Eigen::MatrixXcd h = 0.5 * (values + values.adjoint());
  values = std::move(h);
}

double DensityMatrix::min_eigenvalue(std::size_t stride) const {
  stride = std::max<std::size_t>(1, stride);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index m = (n + static_cast<Eigen::Index>(stride) - 1) / static_cast<Eigen::Index>(stride);
  Eigen::MatrixXcd sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      sub(i, j) = values(i * static_cast<Eigen::Index>(stride), j * static_cast<Eigen::Index>(stride));
  Eigen::MatrixXcd h = 0.5 * (sub + sub.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() * grid.dq();
}

double DensityMatrix::mean_q() const {
  double acc = 0.0, tr = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    acc += grid.q(i) * d;
    tr += d;
  }
  return acc / tr;
}

double DensityMatrix::var_q() const {
  const double mu = mean_q();
  double acc = 0.0, tr = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    acc += (grid.q(i) - mu) * (grid.q(i) - mu) * d;
    tr += d;
  }
  return acc / tr;
}

std::vector<double> Axis::values() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (*this)[i];
  return out;
}

double WignerGrid::integral() const { return values.sum() * p.step * q.step; }

std::vector<double> WignerGrid::q_marginal() const {
  std::vector<double> out(q.n);
  for (std::size_t j = 0; j < q.n; ++j) out[j] = values.col(static_cast<Eigen::Index>(j)).sum() * p.step;
  return out;
}

std::vector<double> WignerGrid::p_marginal() const {
  std::vector<double> out(p.n);
  for (std::size_t i = 0; i < p.n; ++i) out[i] = values.row(static_cast<Eigen::Index>(i)).sum() * q.step;
  return out;
}

Moments phase_space_moments(const Axis& p, const Axis& q, const Eigen::MatrixXd& w) {
  double z = 0.0, sq = 0.0, sp = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < q.n; ++j) {
      const double v = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      z += v;
      sq += v * q[j];
      sp += v * p[i];
    }
  }
  Moments m;
  m.mean_q = sq / z;
  m.mean_p = sp / z;
  double vq = 0.0, vp = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < q.n; ++j) {
      const double v = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      vq += v * (q[j] - m.mean_q) * (q[j] - m.mean_q);
      vp += v * (p[i] - m.mean_p) * (p[i] - m.mean_p);
    }
  }
  m.var_q = vq / z;
  m.var_p = vp / z;
  return m;
}

}  // namespace contmeas
