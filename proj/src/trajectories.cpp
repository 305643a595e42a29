#include "contmeas/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contmeas/fft.hpp"
#include "contmeas/parallel.hpp"
#include "contmeas/spectral.hpp"

namespace contmeas {

namespace {

using fft::Direction;

double mean_force(const WaveFunction& psi, const Potential& pot, double t) {
  double acc = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < psi.grid.size(); ++i) {
    const double w = std::norm(psi.values(static_cast<Eigen::Index>(i)));
    acc += w * pot.force_gradient(psi.grid.q(i), t);
    norm += w;
  }
  return acc / norm;
}

}  // namespace

Expectations expectations(const WaveFunction& psi, double hbar) {
  const Grid& g = psi.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  Expectations ex;
  double norm = 0.0, sq = 0.0, sq2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = std::norm(psi.values(i));
    const double q = g.q(static_cast<std::size_t>(i));
    norm += w;
    sq += w * q;
    sq2 += w * q * q;
  }
  ex.mean_q = sq / norm;
  ex.mean_q2 = sq2 / norm;
  ex.var_q = ex.mean_q2 - ex.mean_q * ex.mean_q;

  Eigen::VectorXcd f = psi.values;
  fft::transform(f, Direction::Forward);
  // The band follows the state so a fast packet is not aliased.
  const long center = spectral::spectral_center(f);
  const Eigen::VectorXd k = spectral::wavenumbers_around(g.size(), g.dq(), center);
  const Eigen::Index edge = ((center + n / 2) % n + n) % n;
  double fn = 0.0, sp = 0.0, sp2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = std::norm(f(i));
    fn += w;
    sp += w * hbar * k(i);
    sp2 += w * hbar * hbar * k(i) * k(i);
  }
  ex.mean_p = sp / fn;
  ex.var_p = sp2 / fn - ex.mean_p * ex.mean_p;

  // <(q - <q>) p> with p psi = -i hbar dpsi/dq; the Nyquist mode has no
  // well-defined derivative and is dropped.
  for (Eigen::Index i = 0; i < n; ++i) f(i) *= (i == edge) ? Complex(0.0) : Complex(0.0, k(i));
  fft::transform(f, Direction::Inverse);
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dq = g.q(static_cast<std::size_t>(i)) - ex.mean_q;
    acc += std::conj(psi.values(i)) * dq * Complex(0.0, -hbar) * f(i);
  }
  ex.cov_pq = acc.real() / norm;
  return ex;
}

namespace {

void refresh(SseState& s, const PhysicalParams& params, const Potential& pot) {
  s.ex = expectations(s.psi, params.hbar);
  s.ex.mean_dv = mean_force(s.psi, pot, s.t);
  const double cq = std::sqrt(params.kappa());
  const double cp = std::sqrt(params.gamma / (8.0 * params.m * params.kT()));
  s.a = Complex(cq * s.ex.mean_q, cp * s.ex.mean_p);
}

}  // namespace

SseState make_sse_state(WaveFunction psi, const PhysicalParams& params, const Potential& pot,
                        double t) {
  params.validate();
  SseState s(std::move(psi));
  s.psi.normalize();
  s.t = t;
  refresh(s, params, pot);
  return s;
}

SsePropagator::SsePropagator(const PhysicalParams& params, const Potential& pot, const Grid& grid,
                             SseModel model)
    : params_(params), pot_(pot), grid_(grid), model_(model) {
  params_.validate();
  if (pot.is_linear()) {
    try {
      cp_ = coherent_params(params_, pot.omega0());
    } catch (const DomainError&) {
      // Outside the coherent-state regime the action is simply not tracked.
    }
  }
}

double SsePropagator::suggested_dt(const SseState& s, double dt_max) const {
  double rate = std::max(params_.gamma, 4.0 * params_.kappa() * s.ex.var_q);
  if (pot_.is_linear()) rate = std::max(rate, pot_.omega0());
  return std::min(dt_max, 1.0 / (50.0 * rate));
}

void SsePropagator::step(SseState& s, double dt, double dw) const {
  if (s.psi.grid != grid_) throw DomainError("state grid differs from the propagator grid");
  if (!std::isfinite(dw) || !(dt > 0.0)) throw DomainError("sse step needs dt > 0 and finite dw");
  const auto n = static_cast<Eigen::Index>(grid_.size());
  const double hbar = params_.hbar, m = params_.m, gamma = params_.gamma;
  const double kappa = params_.kappa();
  const bool full = model_ == SseModel::Full;
  const double q0 = s.ex.mean_q, p0 = s.ex.mean_p;
  const double tm = s.t + 0.5 * dt;
  const double sk = std::sqrt(kappa);
  Eigen::VectorXcd& psi = s.psi.values;
  const double dk = grid_.dk();
  const Eigen::VectorXd k_ =
      spectral::wavenumbers_around(grid_.size(), grid_.dq(), std::lround(p0 / (hbar * dk)));

  // Gaussian average of exp(qa Qt^2 + qb Qt) for a state whose Qt has mean mu
  // and variance v: the norm change each localization factor should cause.
  const auto gauss_avg = [](double qa, double qb, double mu, double v) {
    const double den = 1.0 - 2.0 * qa * v;
    return std::exp((qa * mu * mu + qb * mu + 0.5 * qb * qb * v) / den) / std::sqrt(den);
  };

  // The deterministic half of the localization narrowing is split evenly
  // around the unitary part so the width dynamics is second order in dt.
  const double norm0 = psi.squaredNorm() * grid_.dq();
  const double pred_first = gauss_avg(-kappa * dt, 0.0, 0.0, s.ex.var_q);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double qt = grid_.q(static_cast<std::size_t>(i)) - q0;
    psi(i) *= std::exp(-0.5 * kappa * qt * qt * dt);
  }

  // Half potential step. The full model carries -m gamma^2 Qt^2/2 from
  // completing the square in the friction term.
  Eigen::VectorXcd half(n), gauge(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q = grid_.q(static_cast<std::size_t>(i));
    const double qt = q - q0;
    double v = pot_.value(q, tm);
    if (full) v -= 0.5 * m * gamma * gamma * qt * qt;
    half(i) = std::polar(1.0, -0.5 * v * dt / hbar);
    gauge(i) = full ? std::polar(1.0, 0.5 * m * gamma * qt * qt / hbar) : Complex(1.0);
  }
  psi = psi.cwiseProduct(half).cwiseProduct(gauge);
  fft::transform(psi, Direction::Forward);
  for (Eigen::Index i = 0; i < n; ++i) psi(i) *= std::polar(1.0, -0.5 * hbar * k_(i) * k_(i) * dt / m);
  fft::transform(psi, Direction::Inverse);
  psi = psi.cwiseProduct(gauge.conjugate()).cwiseProduct(half);

  if (full) {
    // Constant phase from the mean-field part plus the unitary momentum kick.
    const double cp = std::sqrt(gamma / (8.0 * m * params_.kT()));
    const double c0 = -0.5 * gamma * q0 * p0 * dt / hbar - cp * p0 * dw;
    fft::transform(psi, Direction::Forward);
    for (Eigen::Index i = 0; i < n; ++i) psi(i) *= std::polar(1.0, c0 + cp * hbar * k_(i) * dw);
    fft::transform(psi, Direction::Inverse);
  }

  // Second localization half centred on the current mean, then the noise, as
  // in the continuous equation. Centring on q0 would pull back the unitary
  // displacement; noise before the narrowing would see the wider mid-step
  // packet. Moments before the factor give the expected norm change.
  double m1 = 0.0, m2 = 0.0, m0 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double qt = grid_.q(static_cast<std::size_t>(i)) - q0;
    const double w = std::norm(psi(i));
    m0 += w;
    m1 += w * qt;
    m2 += w * qt * qt;
  }
  m1 /= m0;
  const double v = std::max(0.0, m2 / m0 - m1 * m1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double qt = grid_.q(static_cast<std::size_t>(i)) - q0;
    const double qs = qt - m1;
    psi(i) *= std::exp(sk * qt * dw - 0.5 * kappa * qs * qs * dt);
  }
  const double predicted = pred_first * std::exp(-kappa * dt * m1 * m1) *
                           gauss_avg(-kappa * dt, 2.0 * kappa * dt * m1 + 2.0 * sk * dw, m1, v);
  const double norm2 = psi.squaredNorm() * grid_.dq() / norm0;
  if (!std::isfinite(norm2) || norm2 <= 0.0) {
    std::ostringstream os;
    os << "wavefunction norm became " << norm2 << " at t=" << s.t;
    throw SolverError(os.str());
  }
  if (std::abs(norm2 / predicted - 1.0) > 1e-3) {
    std::ostringstream os;
    os << "norm change " << norm2 - 1.0 << " deviates from its expected value " << predicted - 1.0
       << " by more than 1e-3 at t=" << s.t << "; reduce dt (now " << dt << ")";
    throw SolverError(os.str());
  }
  psi /= std::sqrt(psi.squaredNorm() * grid_.dq());
  s.norm_change = norm2 - 1.0;
  s.max_norm_error = std::max(s.max_norm_error, std::abs(psi.squaredNorm() * grid_.dq() - 1.0));

  const Expectations before = s.ex;
  s.t += dt;
  refresh(s, params_, pot_);
  if (full && cp_) {
    s.phi += action_increment(*cp_, before.mean_p, before.mean_q, s.ex.mean_p - before.mean_p,
                              s.ex.mean_q - before.mean_q, dt, pot_, s.t - dt);
  }
}

SseState sse_step(SseState state, const PhysicalParams& params, const Potential& pot, double dt,
                  double dw) {
  SsePropagator(params, pot, state.psi.grid, SseModel::Full).step(state, dt, dw);
  return state;
}

SseState sse_dissipationless_step(SseState state, const PhysicalParams& params,
                                  const Potential& pot, double dt, double dw) {
  SsePropagator(params, pot, state.psi.grid, SseModel::Dissipationless).step(state, dt, dw);
  return state;
}

SseRecord sse_run(const SsePropagator& prop, SseState& state, double dt, std::size_t n_steps,
                  NoiseSource& src, bool adaptive, double t_end) {
  SseRecord rec;
  rec.t.push_back(state.t);
  rec.ex.push_back(state.ex);
  rec.phi.push_back(state.phi);
  const bool until = t_end > state.t;
  for (std::size_t k = 0; k < n_steps; ++k) {
    double h = adaptive ? prop.suggested_dt(state, dt) : dt;
    if (until) {
      const double left = t_end - state.t;
      if (left <= 1e-12 * std::max(1.0, t_end)) break;
      h = std::min(h, left);
    }
    const double dw = std::sqrt(h) * src.normal();
    prop.step(state, h, dw);
    rec.dt.push_back(h);
    rec.dw.push_back(dw);
    rec.t.push_back(state.t);
    rec.ex.push_back(state.ex);
    rec.phi.push_back(state.phi);
  }
  rec.max_norm_error = state.max_norm_error;
  return rec;
}

SdeCheckReport expectation_sde_check(const SseRecord& rec, const PhysicalParams& params,
                                     SseModel model) {
  SdeCheckReport r;
  if (rec.dw.empty()) return r;
  const double sk = std::sqrt(params.kappa());
  const bool full = model == SseModel::Full;
  const double g = full ? params.gamma : 0.0;
  double rp = 0.0, rq = 0.0, incp = 0.0, incq = 0.0;
  for (std::size_t k = 0; k < rec.dw.size(); ++k) {
    const auto& a = rec.ex[k];
    const auto& b = rec.ex[k + 1];
    const double dt = rec.dt[k], dw = rec.dw[k];
    const double pred_p = -(g * a.mean_p + a.mean_dv) * dt + (full ? 2.0 * sk * a.cov_pq * dw : 0.0);
    const double pred_q = a.mean_p / params.m * dt + (2.0 * sk * a.var_q - (full ? params.gamma / (2.0 * sk) : 0.0)) * dw;
    const double dp = b.mean_p - a.mean_p, dq = b.mean_q - a.mean_q;
    rp += (dp - pred_p) * (dp - pred_p);
    rq += (dq - pred_q) * (dq - pred_q);
    incp += dp * dp;
    incq += dq * dq;
    r.max_dt = std::max(r.max_dt, dt);
  }
  const double n = static_cast<double>(rec.dw.size());
  r.rms_residual_p = std::sqrt(rp / n);
  r.rms_residual_q = std::sqrt(rq / n);
  r.normalized_residual = std::sqrt((rp + rq) / std::max(incp + incq, 1e-300));
  r.scheme_bug = std::max(r.rms_residual_p, r.rms_residual_q) > 10.0 * r.max_dt;
  return r;
}

SseEnsembleResult sse_ensemble(const PhysicalParams& params, const Potential& pot,
                               const WaveFunction& psi0, double dt, std::size_t n_steps,
                               std::size_t n_traj, std::uint64_t seed, std::size_t record_every,
                               SseModel model, bool keep_density) {
  if (n_traj < 1) throw DomainError("ensemble needs at least one trajectory");
  record_every = std::max<std::size_t>(1, record_every);
  const std::size_t n_rec = n_steps / record_every + 1;
  const SsePropagator prop(params, pot, psi0.grid, model);
  Eigen::MatrixXd mq(static_cast<Eigen::Index>(n_traj), static_cast<Eigen::Index>(n_rec));
  Eigen::MatrixXd mq2(mq.rows(), mq.cols()), mp(mq.rows(), mq.cols());
  std::vector<Eigen::VectorXcd> finals(keep_density ? n_traj : 0);
  std::vector<double> norm_err(n_traj, 0.0);
  parallel_for(n_traj, [&](std::size_t j) {
    NoiseSource src(seed, j);
    SseState s = make_sse_state(psi0, params, pot);
    const auto J = static_cast<Eigen::Index>(j);
    for (std::size_t k = 0; k <= n_steps; ++k) {
      if (k % record_every == 0) {
        const auto r = static_cast<Eigen::Index>(k / record_every);
        mq(J, r) = s.ex.mean_q;
        mq2(J, r) = s.ex.mean_q2;
        mp(J, r) = s.ex.mean_p;
      }
      if (k == n_steps) break;
      prop.step(s, dt, std::sqrt(dt) * src.normal());
    }
    norm_err[j] = s.max_norm_error;
    if (keep_density) finals[j] = s.psi.values;
  });
  SseEnsembleResult out;
  const double nt = static_cast<double>(n_traj);
  const double denom = std::max(1.0, nt - 1.0);
  for (std::size_t r = 0; r < n_rec; ++r) {
    const auto R = static_cast<Eigen::Index>(r);
    const double a = mq.col(R).mean(), a2 = mq2.col(R).mean(), ap = mp.col(R).mean();
    const Eigen::ArrayXd dq = mq.col(R).array() - a;
    const Eigen::ArrayXd z = (mq2.col(R).array() - a2) - 2.0 * a * dq;
    const Eigen::ArrayXd dp = mp.col(R).array() - ap;
    out.t.push_back(static_cast<double>(r * record_every) * dt);
    out.mean_q.push_back(a);
    out.se_mean_q.push_back(std::sqrt(dq.square().sum() / denom / nt));
    out.delta_q2.push_back(a2 - a * a);
    out.se_delta_q2.push_back(std::sqrt(z.square().sum() / denom / nt));
    out.mean_p.push_back(ap);
    out.se_mean_p.push_back(std::sqrt(dp.square().sum() / denom / nt));
  }
  out.max_norm_error = *std::max_element(norm_err.begin(), norm_err.end());
  if (keep_density) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(psi0.values.size(), psi0.values.size());
    for (const auto& v : finals) rho.noalias() += v * v.adjoint();
    rho /= nt;
    out.rho = DensityMatrix(psi0.grid, std::move(rho));
  }
  return out;
}

DensityMatrix ensemble_density(const PhysicalParams& params, const Potential& pot,
                               const WaveFunction& psi0, double dt, std::size_t n_steps,
                               std::size_t n_traj, std::uint64_t seed) {
  return *sse_ensemble(params, pot, psi0, dt, n_steps, n_traj, seed, std::max<std::size_t>(1, n_steps),
                       SseModel::Full, true)
              .rho;
}

ConvergenceReport convergence_diagnostics(const SseRecord& rec, const CoherentParams& cp,
                                          double rel_hi, double rel_lo) {
  ConvergenceReport r;
  r.target_rate = 2.0 * std::abs(cp.omega.imag());
  const Complex w_inf = cp.width();
  for (std::size_t k = 0; k < rec.ex.size(); ++k) {
    const auto& e = rec.ex[k];
    const Complex w = Complex(1.0, -2.0 * e.cov_pq / cp.hbar) / (4.0 * e.var_q);
    r.t.push_back(rec.t[k]);
    r.gap_q.push_back(std::abs(e.var_q - cp.sigma_q2));
    r.gap_pq.push_back(std::abs(e.cov_pq - cp.sigma_pq2));
    r.gap_width.push_back(std::abs(w - w_inf) / std::abs(w_inf));
  }
  std::vector<double> tail(r.gap_width.end() - static_cast<std::ptrdiff_t>(r.gap_width.size() / 10 + 1),
                           r.gap_width.end());
  std::nth_element(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2), tail.end());
  r.floor = tail[tail.size() / 2];
  rel_lo = std::max(rel_lo, 30.0 * r.floor);
  std::size_t lo = r.t.size(), hi = r.t.size();
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    if (lo == r.t.size() && r.gap_width[k] < rel_hi) lo = k;
    if (lo != r.t.size() && r.gap_width[k] < rel_lo) {
      hi = k;
      break;
    }
  }
  if (lo + 10 > hi) {
    r.flagged = true;
    return r;
  }
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double n = static_cast<double>(hi - lo);
  for (std::size_t k = lo; k < hi; ++k) {
    const double y = std::log(r.gap_width[k]);
    st += r.t[k];
    sy += y;
    stt += r.t[k] * r.t[k];
    sty += r.t[k] * y;
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  if (!(slope < 0.0)) {
    r.flagged = true;
    return r;
  }
  r.fitted_rate = -slope;
  return r;
}

}  // namespace contmeas
