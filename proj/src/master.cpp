#include "contmeas/master.hpp"

#include <cmath>
#include <sstream>

#include "contmeas/fft.hpp"
#include "contmeas/spectral.hpp"

namespace contmeas {

namespace {

using fft::Direction;

double signed_offset(std::size_t i, std::size_t n, double dq) {
  const auto s = static_cast<double>(i) - (i >= n / 2 ? static_cast<double>(n) : 0.0);
  return s * dq;
}

// g(i, j) = rho((i + j) mod n, j): row i then holds the offset r_i = x - y.
Eigen::MatrixXcd shear(const Eigen::MatrixXcd& rho) {
  const auto n = rho.rows();
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rho((i + j) % n, j);
  return g;
}

Eigen::MatrixXcd unshear(const Eigen::MatrixXcd& g) {
  const auto n = g.rows();
  Eigen::MatrixXcd rho(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) rho((i + j) % n, j) = g(i, j);
  return rho;
}

}  // namespace

LindbladPropagator::LindbladPropagator(const PhysicalParams& params, const Potential& pot,
                                       const Grid& grid, double dt, bool include_dissipation)
    : params_(params), pot_(pot), grid_(grid), dt_(dt), dissipation_(include_dissipation) {
  params_.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("lindblad step needs dt > 0");
  const std::size_t n = grid.size();
  const auto N = static_cast<Eigen::Index>(n);
  const double hbar = params.hbar, m = params.m, dq = grid.dq();
  const Eigen::VectorXd k = spectral::wavenumbers(n, dq);
  const double pdiff = dissipation_ ? params.gamma / (16.0 * m * params.kT()) : 0.0;
  kin_.resize(N, N);
  for (Eigen::Index b = 0; b < N; ++b) {
    const double p2 = hbar * k(b);
    for (Eigen::Index a = 0; a < N; ++a) {
      const double p1 = hbar * k(a);
      const double d = p1 - p2;
      kin_(a, b) = std::polar(std::exp(-pdiff * d * d * dt), -dt * (p1 * p1 - p2 * p2) / (2.0 * m * hbar));
    }
  }
  loc_.resize(N, N);
  const double kappa = params.kappa();
  for (Eigen::Index b = 0; b < N; ++b)
    for (Eigen::Index a = 0; a < N; ++a) {
      const double r = grid.q(static_cast<std::size_t>(a)) - grid.q(static_cast<std::size_t>(b));
      loc_(a, b) = std::exp(-0.5 * kappa * r * r * 0.5 * dt);
    }
  if (dissipation_) {
    const double lambda = std::exp(-params.gamma * 0.5 * dt);
    const double eps = -std::expm1(-params.gamma * 0.5 * dt);
    std::vector<double> targets(n);
    shift_.resize(N);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = signed_offset(i, n, dq);
      targets[i] = lambda * r;
      shift_(static_cast<Eigen::Index>(i)) = eps * r / (2.0 * lambda);
    }
    dilate_ = spectral::interpolation_matrix(n, 0.0, dq, targets, false);
  }
}

void LindbladPropagator::pointwise(Eigen::MatrixXcd& r, double t, double h) const {
  const auto n = r.rows();
  Eigen::VectorXcd ph(n);
  for (Eigen::Index i = 0; i < n; ++i)
    ph(i) = std::polar(1.0, -h * pot_.value(grid_.q(static_cast<std::size_t>(i)), t) / params_.hbar);
  for (Eigen::Index b = 0; b < n; ++b) {
    const Complex cb = std::conj(ph(b));
    for (Eigen::Index a = 0; a < n; ++a) r(a, b) *= ph(a) * cb * loc_(a, b);
  }
}

void LindbladPropagator::kinetic(Eigen::MatrixXcd& r) const {
  fft::transform_cols(r, Direction::Forward);
  fft::transform_rows(r, Direction::Inverse);
  r.array() *= kin_.array();
  fft::transform_cols(r, Direction::Inverse);
  fft::transform_rows(r, Direction::Forward);
}

// Friction term -gamma r d/dr in (R, r) coordinates: rho(R, r) -> rho(R, lambda r).
// In sheared coordinates (r, y) this is a y-shift by eps r / (2 lambda)
// followed by resampling the offset axis at lambda r.
void LindbladPropagator::friction(Eigen::MatrixXcd& r) const {
  Eigen::MatrixXcd g = shear(r);
  fft::transform_rows(g, Direction::Forward);
  const Eigen::VectorXd k = spectral::wavenumbers(grid_.size(), grid_.dq());
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) *= std::polar(1.0, k(j) * shift_(i));
  fft::transform_rows(g, Direction::Inverse);
  const Eigen::MatrixXd re = dilate_ * g.real();
  const Eigen::MatrixXd im = dilate_ * g.imag();
  g.real() = re;
  g.imag() = im;
  r = unshear(g);
}

void LindbladPropagator::step(DensityMatrix& rho, double t) const {
  if (rho.grid != grid_) throw DomainError("density matrix grid differs from the propagator grid");
  Eigen::MatrixXcd& r = rho.values;
  if (dissipation_) friction(r);
  pointwise(r, t + 0.25 * dt_, 0.5 * dt_);
  kinetic(r);
  pointwise(r, t + 0.75 * dt_, 0.5 * dt_);
  if (dissipation_) friction(r);
  rho.symmetrize();
}

DensityMatrix lindblad_step(const DensityMatrix& rho, const PhysicalParams& params,
                            const Potential& pot, const LindbladConfig& cfg, double t) {
  DensityMatrix out = rho;
  LindbladPropagator(params, pot, rho.grid, cfg.dt, cfg.include_dissipation).step(out, t);
  return out;
}

DensityMatrix lindblad_run(const DensityMatrix& rho0, const PhysicalParams& params,
                           const Potential& pot, const LindbladConfig& cfg, LindbladReport* report,
                           const LindbladObserver& observer, double t0) {
  const LindbladPropagator prop(params, pot, rho0.grid, cfg.dt, cfg.include_dissipation);
  DensityMatrix rho = rho0;
  LindbladReport rep;
  const double tr0 = rho.trace().real();
  rep.initial_purity = rho.purity();
  double last_purity = rep.initial_purity;
  const std::size_t every = std::max<std::size_t>(1, cfg.eig_every);
  double t = t0;
  if (observer) observer(t, rho);
  for (std::size_t s = 1; s <= cfg.n_steps; ++s) {
    prop.step(rho, t);
    t = t0 + static_cast<double>(s) * cfg.dt;
    const double terr = std::abs(rho.trace().real() - tr0);
    rep.max_trace_error = std::max(rep.max_trace_error, terr);
    if (!std::isfinite(terr) || terr > 1e-6) {
      std::ostringstream os;
      os << "trace drifted by " << terr << " at t=" << t;
      throw SolverError(os.str());
    }
    if (s % every == 0 || s == cfg.n_steps) {
      const double ev = rho.min_eigenvalue(cfg.eig_stride);
      rep.min_eigenvalue = std::min(rep.min_eigenvalue, ev);
      ++rep.eigen_checks;
      if (ev < -1e-4) {
        std::ostringstream os;
        os << "density matrix lost positivity (eigenvalue " << ev << ") at t=" << t
           << "; reduce dt (now " << cfg.dt << ")";
        throw SolverError(os.str());
      }
      const double pur = rho.purity();
      if (pur > last_purity + 1e-9) rep.purity_increase = true;
      last_purity = pur;
    }
    if (observer) observer(t, rho);
  }
  rep.final_purity = rho.purity();
  if (report) *report = rep;
  return rho;
}

VonNeumannReport von_neumann_limit_check(const DensityMatrix& rho0, const PhysicalParams& params,
                                         const Potential& pot,
                                         const std::vector<std::pair<double, double>>& gamma_T,
                                         std::size_t substeps, bool include_dissipation) {
  VonNeumannReport out;
  const Grid& g = rho0.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  const double max0 = rho0.values.cwiseAbs().maxCoeff();
  const double diag0 = rho0.values.diagonal().cwiseAbs().maxCoeff();
  for (const auto& [gamma, T] : gamma_T) {
    PhysicalParams p = params;
    p.gamma = gamma;
    p.T = T;
    p.tau = 1.0 / gamma;
    VonNeumannPoint pt;
    pt.gamma = gamma;
    pt.T = T;
    pt.tau = p.tau;
    pt.expected = 0.5 * p.kappa() * p.tau;
    LindbladConfig cfg;
    cfg.include_dissipation = include_dissipation;
    cfg.n_steps = std::max<std::size_t>(1, substeps);
    cfg.dt = p.tau / static_cast<double>(cfg.n_steps);
    cfg.eig_every = cfg.n_steps;
    const DensityMatrix rho = lindblad_run(rho0, p, pot, cfg);
    const double max1 = rho.values.cwiseAbs().maxCoeff();
    // Least squares through the origin of -log|ratio| against r^2, using
    // entries where both matrices are well above round-off.
    double sxy = 0.0, sxx = 0.0;
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index a = 0; a < n; ++a) {
        const double v0 = std::abs(rho0.values(a, b)), v1 = std::abs(rho.values(a, b));
        if (a == b || v0 < 1e-3 * max0 || v1 < 1e-8 * max1) continue;
        const double r = g.q(static_cast<std::size_t>(a)) - g.q(static_cast<std::size_t>(b));
        const double x = r * r, y = -std::log(v1 / v0);
        sxy += x * y;
        sxx += x * x;
      }
    pt.fitted = sxx > 0.0 ? sxy / sxx : 0.0;
    pt.relative_error = std::abs(pt.fitted - pt.expected) / pt.expected;
    pt.mean_q_before = rho0.mean_q();
    pt.mean_q_after = rho.mean_q();
    pt.max_diagonal_change =
        (rho.values.diagonal() - rho0.values.diagonal()).cwiseAbs().maxCoeff() / diag0;
    out.points.push_back(pt);
  }
  return out;
}

}  // namespace contmeas
