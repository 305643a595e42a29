#include "contmeas/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contmeas/fft.hpp"
#include "contmeas/parallel.hpp"
#include "contmeas/spectral.hpp"

namespace contmeas {

namespace {

[[noreturn]] void blowup(std::size_t step, double p, double q) {
  std::ostringstream os;
  os << "non-finite state at step " << step << " (p=" << p << ", q=" << q << ")";
  throw SolverError(os.str());
}

}  // namespace

ClassicalTrajectory langevin_run(const PhysicalParams& params, const Potential& pot, double p0,
                                 double q0, double dt, std::size_t n_steps, NoiseSource& src) {
  params.validate();
  const double limit = std::min(params.tau, 1.0 / params.gamma) / 50.0;
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "langevin_run needs 0 < dt <= min(tau, 1/gamma)/50 = " << limit << " (got " << dt << ")";
    throw DomainError(os.str());
  }
  ClassicalTrajectory tr;
  tr.stream = src.stream();
  tr.t.resize(n_steps + 1);
  tr.p.resize(n_steps + 1);
  tr.q.resize(n_steps + 1);
  const double amp = std::sqrt(2.0 * params.m * params.gamma * params.kT() * dt);
  double p = p0, q = q0;
  tr.t[0] = 0.0;
  tr.p[0] = p;
  tr.q[0] = q;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double f = pot.force_gradient(q, t);
    const double pn = p - (params.gamma * p + f) * dt + amp * src.normal();
    // Trapezoidal position update: from a sharp start the Euler form
    // underestimates Var(q) after k steps by 3/(2k), this one by 1/(4k^2).
    q += 0.5 * (p + pn) / params.m * dt;
    p = pn;
    if (!std::isfinite(p) || !std::isfinite(q)) blowup(k + 1, p, q);
    tr.t[k + 1] = static_cast<double>(k + 1) * dt;
    tr.p[k + 1] = p;
    tr.q[k + 1] = q;
  }
  return tr;
}

MomentSeries langevin_ensemble(const PhysicalParams& params, const Potential& pot,
                               const InitialGaussian& init, double dt, std::size_t n_steps,
                               std::size_t n_paths, std::uint64_t seed, std::size_t record_every) {
  if (n_paths < 2) throw DomainError("ensemble needs at least two paths");
  record_every = std::max<std::size_t>(1, record_every);
  const std::size_t n_rec = n_steps / record_every + 1;
  Eigen::MatrixXd P(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(n_rec));
  Eigen::MatrixXd Q(P.rows(), P.cols());
  parallel_for(n_paths, [&](std::size_t k) {
    NoiseSource src(seed, k);
    const double p0 = init.mean_p + init.sd_p * src.normal();
    const double q0 = init.mean_q + init.sd_q * src.normal();
    const auto tr = langevin_run(params, pot, p0, q0, dt, n_steps, src);
    for (std::size_t r = 0; r < n_rec; ++r) {
      P(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) = tr.p[r * record_every];
      Q(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) = tr.q[r * record_every];
    }
  });
  MomentSeries out;
  const double n = static_cast<double>(n_paths);
  for (std::size_t r = 0; r < n_rec; ++r) {
    const auto col_p = P.col(static_cast<Eigen::Index>(r));
    const auto col_q = Q.col(static_cast<Eigen::Index>(r));
    Moments m, se;
    m.mean_p = col_p.mean();
    m.mean_q = col_q.mean();
    const Eigen::ArrayXd dp = col_p.array() - m.mean_p;
    const Eigen::ArrayXd dq = col_q.array() - m.mean_q;
    m.var_p = dp.square().sum() / (n - 1.0);
    m.var_q = dq.square().sum() / (n - 1.0);
    se.mean_p = std::sqrt(m.var_p / n);
    se.mean_q = std::sqrt(m.var_q / n);
    // Standard error of a sample variance from the fourth central moment.
    se.var_p = std::sqrt(std::max(0.0, (dp.pow(4).mean() - m.var_p * m.var_p) / n));
    se.var_q = std::sqrt(std::max(0.0, (dq.pow(4).mean() - m.var_q * m.var_q) / n));
    out.t.push_back(static_cast<double>(r * record_every) * dt);
    out.m.push_back(m);
    out.se.push_back(se);
  }
  return out;
}

ClassicalTrajectory finite_bath_run(const PhysicalParams& params, const Potential& pot, double p0,
                                    double q0, BathState bath, double dt, std::size_t n_steps,
                                    BathState* final_bath) {
  params.validate();
  const double wmax = bath.size() ? *std::max_element(bath.omegas.begin(), bath.omegas.end()) : 0.0;
  if (bath.size() && dt * wmax > 0.1 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "finite_bath_run needs dt * Omega <= 0.1; use dt <= " << 0.1 / wmax;
    throw DomainError(os.str());
  }
  const std::size_t n = bath.size();
  // Per-mode rotation coefficients for the fixed step.
  std::vector<double> c(n), s(n), imp_x(n), imp_p(n), mw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = bath.omegas[i];
    c[i] = std::cos(w * dt);
    s[i] = std::sin(w * dt);
    mw[i] = bath.mode_mass[i] * w;
    imp_x[i] = mw[i] * s[i];  // impulse per unit X
    imp_p[i] = 1.0 - c[i];    // impulse per unit P
  }
  // Relative coordinates X = Q - q.
  std::vector<double> X(n), P = bath.P;
  for (std::size_t i = 0; i < n; ++i) X[i] = bath.Q[i] - q0;

  ClassicalTrajectory tr;
  tr.t.resize(n_steps + 1);
  tr.p.resize(n_steps + 1);
  tr.q.resize(n_steps + 1);
  double p = p0, q = q0;
  tr.t[0] = 0.0;
  tr.p[0] = p;
  tr.q[0] = q;
  const double h2 = 0.5 * dt / params.m;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    // Drift: q moves, oscillators stay put, so X shifts.
    double shift = p * h2;
    q += shift;
    for (std::size_t i = 0; i < n; ++i) X[i] -= shift;
    // Bath rotation about fixed q plus the integrated coupling impulse.
    double impulse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = X[i], pp = P[i];
      impulse += imp_x[i] * x + imp_p[i] * pp;
      X[i] = x * c[i] + pp / mw[i] * s[i];
      P[i] = -x * mw[i] * s[i] + pp * c[i];
    }
    p += impulse - pot.force_gradient(q, t + 0.5 * dt) * dt;
    shift = p * h2;
    q += shift;
    for (std::size_t i = 0; i < n; ++i) X[i] -= shift;
    if (!std::isfinite(p) || !std::isfinite(q)) blowup(k + 1, p, q);
    tr.t[k + 1] = static_cast<double>(k + 1) * dt;
    tr.p[k + 1] = p;
    tr.q[k + 1] = q;
  }
  if (final_bath) {
    *final_bath = bath;
    for (std::size_t i = 0; i < n; ++i) {
      final_bath->Q[i] = X[i] + q;
      final_bath->P[i] = P[i];
    }
  }
  return tr;
}

double total_energy(const PhysicalParams& params, const Potential& pot, double p, double q,
                    const BathState& bath, double t) {
  double e = p * p / (2.0 * params.m) + pot.value(q, t);
  for (std::size_t i = 0; i < bath.size(); ++i) {
    const double x = bath.Q[i] - q, w = bath.omegas[i], mm = bath.mode_mass[i];
    e += bath.P[i] * bath.P[i] / (2.0 * mm) + 0.5 * mm * w * w * x * x;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Fokker-Planck

PhaseSpaceDensity make_density(const Axis& p, const Axis& q,
                               const std::function<double(double, double)>& f) {
  PhaseSpaceDensity W;
  W.p = p;
  W.q = q;
  W.values.resize(static_cast<Eigen::Index>(p.n), static_cast<Eigen::Index>(q.n));
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t j = 0; j < q.n; ++j)
      W.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f(p[i], q[j]);
  return W;
}

Moments classical_moments(const WignerGrid& W) { return phase_space_moments(W.p, W.q, W.values); }

namespace {

class FokkerPlanckStepper {
 public:
  FokkerPlanckStepper(const PhysicalParams& params, const Potential& pot, const Axis& p,
                      const Axis& q, double dt)
      : params_(params), pot_(pot), p_(p), q_(q), dt_(dt) {
    kq_ = spectral::wavenumbers(q.n, q.step);
    kp_ = spectral::wavenumbers(p.n, p.step);
    // Exact OU step in p: contraction p -> c p, then Gaussian spreading.
    const double c = std::exp(-params.gamma * dt);
    const double s = std::sqrt(params.m * params.kT() * (1.0 - c * c));
    std::vector<double> targets(p.n);
    for (std::size_t i = 0; i < p.n; ++i) targets[i] = p[i] / c;
    Eigen::MatrixXd D = spectral::interpolation_matrix(p.n, p.min, p.step, targets, true) / c;
    Eigen::MatrixXd G = spectral::gaussian_smoothing_matrix(p.n, p.step, s);
    ou_ = G * D;
  }

  void step(Eigen::MatrixXd& W, double t) {
    advect(W, 0.5 * dt_);
    kick(W, 0.5 * dt_, t + 0.25 * dt_);
    W = ou_ * W;
    kick(W, 0.5 * dt_, t + 0.75 * dt_);
    advect(W, 0.5 * dt_);
  }

 private:
  // W(p, q) <- W(p, q - p h / m), one spectral shift per p row.
  void advect(Eigen::MatrixXd& W, double h) {
    Eigen::MatrixXcd A = W.cast<Complex>();
    fft::transform_rows(A, fft::Direction::Forward);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double shift = p_[static_cast<std::size_t>(i)] * h / params_.m;
      for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) *= std::polar(1.0, -kq_(j) * shift);
    }
    fft::transform_rows(A, fft::Direction::Inverse);
    W = A.real();
  }

  // W(p, q) <- W(p + V'(q) h, q), one spectral shift per q column.
  void kick(Eigen::MatrixXd& W, double h, double t) {
    if (pot_.is_linear()) {
      const auto& lin = std::get<LinearPotential>(pot_.kind());
      if (lin.omega0 == 0.0 && lin.v1(t) == 0.0) return;
    }
    Eigen::MatrixXcd A = W.cast<Complex>();
    fft::transform_cols(A, fft::Direction::Forward);
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      const double a = pot_.force_gradient(q_[static_cast<std::size_t>(j)], t) * h;
      for (Eigen::Index i = 0; i < A.rows(); ++i) A(i, j) *= std::polar(1.0, kp_(i) * a);
    }
    fft::transform_cols(A, fft::Direction::Inverse);
    W = A.real();
  }

  const PhysicalParams& params_;
  const Potential& pot_;
  Axis p_, q_;
  double dt_;
  Eigen::VectorXd kq_, kp_;
  Eigen::MatrixXd ou_;
};

double margin_mass(const Eigen::MatrixXd& W, std::size_t margin, double cell) {
  const Eigen::Index np = W.rows(), nq = W.cols(), m = static_cast<Eigen::Index>(margin);
  double total = W.cwiseAbs().sum();
  double inner = W.block(m, m, np - 2 * m, nq - 2 * m).cwiseAbs().sum();
  return (total - inner) * cell;
}

}  // namespace

PhaseSpaceDensity fokker_planck_solve(
    const PhysicalParams& params, const Potential& pot, PhaseSpaceDensity W, double dt,
    std::size_t n_steps, FokkerPlanckReport* report,
    const std::function<void(const PhaseSpaceDensity&, std::size_t)>& observer) {
  params.validate();
  if (!(dt > 0.0)) throw DomainError("fokker_planck_solve needs dt > 0");
  if (W.p.n < 16 || W.q.n < 16) throw DomainError("phase-space grid needs at least 16 points per axis");
  const double cell = W.p.step * W.q.step;
  const double mass0 = W.values.sum() * cell;
  if (std::abs(mass0 - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "initial density must be normalized (integral = " << mass0 << ")";
    throw DomainError(os.str());
  }
  FokkerPlanckStepper stepper(params, pot, W.p, W.q, dt);
  FokkerPlanckReport rep;
  const std::size_t margin = std::max<std::size_t>(2, std::min(W.p.n, W.q.n) / 32);
  for (std::size_t k = 0; k < n_steps; ++k) {
    stepper.step(W.values, W.t);
    W.t += dt;
    for (Eigen::Index i = 0; i < W.values.size(); ++i) {
      double& v = W.values.data()[i];
      if (v < 0.0) {
        rep.min_value = std::min(rep.min_value, v);
        if (v > -1e-12) {
          rep.clipped_mass += -v * cell;
          v = 0.0;
        }
      }
    }
    const double leak = margin_mass(W.values, margin, cell);
    rep.max_leakage = std::max(rep.max_leakage, leak);
    if (leak > 1e-4) {
      std::ostringstream os;
      os << "boundary leakage " << leak << " at t=" << W.t
         << " exceeds 1e-4; expand the phase-space window";
      throw SolverError(os.str());
    }
    if (observer) observer(W, k + 1);
  }
  rep.mass_drift = std::abs(W.values.sum() * cell - mass0);
  if (report) *report = rep;
  return W;
}

GaussianMoments fp_moments_exact(const PhysicalParams& params, double omega0, double v1,
                                 const GaussianMoments& init, double t) {
  // d/dt (q, p) = A (q, p) + b with A = [[0, 1/m], [-m w^2, -gamma]];
  // covariance obeys S' = A S + S A^T + diag(0, 2 m gamma kT).
  const double m = params.m, g = params.gamma, w2 = omega0 * omega0;
  const double D = 2.0 * m * g * params.kT();
  using V = Eigen::Matrix<double, 5, 1>;  // mq, mp, Sqq, Sqp, Spp
  auto rhs = [&](const V& y) {
    V d;
    d(0) = y(1) / m;
    d(1) = -m * w2 * y(0) - g * y(1) - v1;
    d(2) = 2.0 * y(3) / m;
    d(3) = y(4) / m - m * w2 * y(2) - g * y(3);
    d(4) = -2.0 * m * w2 * y(3) - 2.0 * g * y(4) + D;
    return d;
  };
  V y;
  y << init.mean_q, init.mean_p, init.var_q, init.cov_pq, init.var_p;
  const double rate = std::max({g, omega0, 1.0 / std::max(t, 1e-300)});
  const auto steps = static_cast<std::size_t>(std::ceil(t * rate * 2000.0));
  const double h = steps ? t / static_cast<double>(steps) : 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const V k1 = rhs(y), k2 = rhs(y + 0.5 * h * k1), k3 = rhs(y + 0.5 * h * k2), k4 = rhs(y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  GaussianMoments out;
  out.mean_q = y(0);
  out.mean_p = y(1);
  out.var_q = y(2);
  out.cov_pq = y(3);
  out.var_p = y(4);
  return out;
}

}  // namespace contmeas
