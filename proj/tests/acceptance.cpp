// Acceptance suite: one PASS/FAIL line per criterion. Run a subset by passing
// criterion numbers as arguments.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "contmeas/cat.hpp"
#include "contmeas/classical.hpp"
#include "contmeas/coherent.hpp"
#include "contmeas/experiment.hpp"
#include "contmeas/master.hpp"
#include "contmeas/meter.hpp"
#include "contmeas/parallel.hpp"
#include "contmeas/trajectories.hpp"
#include "contmeas/wigner.hpp"

using namespace contmeas;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Invariants collected across every run for the final criterion.
struct Invariants {
  double max_trace_error = 0.0;
  double min_eigenvalue = 1.0;
  double max_norm_error = 0.0;
  std::size_t lindblad_runs = 0;
  std::size_t sse_runs = 0;
  std::vector<std::string> violations;

  void lindblad(const LindbladReport& r) {
    ++lindblad_runs;
    max_trace_error = std::max(max_trace_error, r.max_trace_error);
    min_eigenvalue = std::min(min_eigenvalue, r.min_eigenvalue);
  }
  void sse(double norm_error, std::size_t n = 1) {
    sse_runs += n;
    max_norm_error = std::max(max_norm_error, norm_error);
  }
} inv;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PhysicalParams desk(double gamma, double kT) {
  PhysicalParams p;
  p.m = 1.0;
  p.hbar = 1.0;
  p.gamma = gamma;
  p.T = kT;
  return p;
}

DensityMatrix run_lindblad(const DensityMatrix& rho0, const PhysicalParams& p, const Potential& v,
                           double dt, std::size_t steps, const LindbladObserver& obs = {},
                           bool dissipation = true) {
  LindbladConfig cfg;
  cfg.dt = dt;
  cfg.n_steps = steps;
  cfg.include_dissipation = dissipation;
  LindbladReport rep;
  try {
    DensityMatrix out = lindblad_run(rho0, p, v, cfg, &rep, obs);
    inv.lindblad(rep);
    return out;
  } catch (const SolverError& e) {
    inv.violations.push_back(e.what());
    throw;
  }
}

// 1. Ensemble of conditioned trajectories against the master equation.
Outcome selective_vs_nonselective() {
  const PhysicalParams p = desk(0.5, 10.0);
  const Potential v = Potential::harmonic(p.m, 1.0);
  const Grid g(-20.0, 20.0, 256);
  const CoherentParams cp = coherent_params(p, 1.0);
  const WaveFunction psi0 = coherent_wavefunction(cp, 0.0, 3.0, g);
  const double t_end = 10.0 / p.gamma;
  const std::size_t checkpoints = 20;

  const double dt_sse = 0.005;
  const auto sse_steps = static_cast<std::size_t>(std::llround(t_end / dt_sse));
  const SseEnsembleResult ens =
      sse_ensemble(p, v, psi0, dt_sse, sse_steps, 500, 101, sse_steps / checkpoints, SseModel::Full, false);
  inv.sse(ens.max_norm_error, 500);

  const double dt_l = 0.01;
  const auto l_steps = static_cast<std::size_t>(std::llround(t_end / dt_l));
  std::vector<double> lq, lv;
  std::size_t k = 0;
  run_lindblad(DensityMatrix::projector(psi0), p, v, dt_l, l_steps, [&](double, const DensityMatrix& r) {
    if (k++ % (l_steps / checkpoints) == 0) {
      lq.push_back(r.mean_q());
      lv.push_back(r.var_q());
    }
  });

  double zq = 0.0, zv = 0.0;
  bool ok = ens.t.size() == checkpoints + 1 && lq.size() == checkpoints + 1;
  for (std::size_t i = 1; ok && i <= checkpoints; ++i) {
    zq = std::max(zq, std::abs(ens.mean_q[i] - lq[i]) / ens.se_mean_q[i]);
    zv = std::max(zv, std::abs(ens.delta_q2[i] - lv[i]) / ens.se_delta_q2[i]);
  }
  ok = ok && zq <= 3.0 && zv <= 3.0;
  return {ok, fmt("500 trajectories, %zu checkpoints to t=%g: max |z| <q> %.2f, dq^2 %.2f (limit 3)",
                  checkpoints, t_end, zq, zv)};
}

// 2. A coherent state stays at the fixed point.
Outcome coherent_fixed_point() {
  const PhysicalParams p = desk(0.5, 10.0);
  std::string detail;
  bool ok = true;
  for (double w0 : {0.0, 1.0}) {
    const Potential v = Potential::harmonic(p.m, w0);
    const CoherentParams cp = coherent_params(p, w0);
    const Grid g(-25.0, 25.0, 512);
    const SsePropagator prop(p, v, g);
    SseState s = make_sse_state(coherent_wavefunction(cp, 0.5, 1.0, g), p, v);
    NoiseSource src(202, static_cast<std::uint64_t>(w0));
    const double dt = 0.002;
    const SseRecord rec = sse_run(prop, s, dt, static_cast<std::size_t>(std::llround(5.0 / p.gamma / dt)), src);
    inv.sse(rec.max_norm_error);
    double dq = 0.0, dpq = 0.0;
    for (const auto& e : rec.ex) {
      dq = std::max(dq, std::abs(e.var_q / cp.sigma_q2 - 1.0));
      dpq = std::max(dpq, std::abs(e.cov_pq / cp.sigma_pq2 - 1.0));
    }
    ok = ok && dq < 0.01 && dpq < 0.01;
    detail += fmt("omega0=%g: max rel dev sigma_q^2 %.2e, sigma_pq^2 %.2e; ", w0, dq, dpq);
  }
  return {ok, detail + "limit 1e-2 over 5/gamma"};
}

// 3. Localization rate from a broad Gaussian.
Outcome convergence_rate() {
  const PhysicalParams p = desk(0.5, 10.0);
  std::string detail;
  bool ok = true;
  struct Case {
    double w0, L;
    std::size_t n;
  };
  for (const Case c : {Case{0.0, 100.0, 1024}, Case{1.0, 50.0, 512}}) {
    const Potential v = Potential::harmonic(p.m, c.w0);
    const Grid g(-c.L / 2, c.L / 2, c.n);
    Eigen::VectorXcd w(static_cast<Eigen::Index>(c.n));
    for (std::size_t i = 0; i < c.n; ++i) w(static_cast<Eigen::Index>(i)) = std::exp(-g.q(i) * g.q(i) / 16.0);
    WaveFunction psi(g, w);
    psi.normalize();
    const SsePropagator prop(p, v, g);
    SseState s = make_sse_state(psi, p, v);
    NoiseSource src(303, static_cast<std::uint64_t>(c.w0));
    const SseRecord rec = sse_run(prop, s, 0.002, 1500, src);
    inv.sse(rec.max_norm_error);
    const ConvergenceReport r = convergence_diagnostics(rec, coherent_params(p, c.w0));
    const double fitted = r.fitted_rate.value_or(0.0);
    const double err = std::abs(fitted / r.target_rate - 1.0);
    ok = ok && !r.flagged && r.fitted_rate && err < 0.1;
    detail += fmt("omega0=%g: fitted %.4f vs 2|Im w| %.4f (%.2f%%); ", c.w0, fitted, r.target_rate, 100 * err);
  }
  return {ok, detail + "limit 10%"};
}

// 4. Master equation + Wigner transform against the closed-form cat.
Outcome cat_oracle() {
  const PhysicalParams p = desk(0.5, 1.0);
  const Grid g(-24.0, 24.0, 256);
  const CatSpec spec = make_cat_spec(p, 0.5, -2.0, -0.5, 2.0);
  const double dt = 0.01;
  std::vector<double> checks;
  for (double f : {0.5, 1.0, 2.0}) checks.push_back(f / p.gamma);
  std::vector<double> errs;
  std::size_t k = 0;
  auto obs = [&](double t, const DensityMatrix& r) {
    const std::size_t step = k++;
    for (double tc : checks) {
      if (step != static_cast<std::size_t>(std::llround(tc / dt))) continue;
      const WignerGrid w = wigner_transform(r, p.hbar);
      double e = 0.0;
      for (std::size_t i = 0; i < w.p.n; ++i)
        for (std::size_t j = 0; j < w.q.n; ++j)
          e = std::max(e, std::abs(w.values(i, j) - cat_wigner(spec, w.p[i], w.q[j], t)));
      errs.push_back(e);
    }
  };
  run_lindblad(DensityMatrix::projector(cat_wavefunction(spec, g)), p, Potential::free_particle(), dt,
               static_cast<std::size_t>(std::llround(checks.back() / dt)), obs);
  const double worst = errs.empty() ? INFINITY : *std::max_element(errs.begin(), errs.end());
  const bool ok = errs.size() == checks.size() && worst < 1e-3;
  std::string d = "256x256 L-inf:";
  for (std::size_t i = 0; i < errs.size(); ++i) d += fmt(" t=%g %.2e", checks[i], errs[i]);
  return {ok, d + " (limit 1e-3)"};
}

// 5. Langevin ensemble against Fokker-Planck moments; stationary OU variance.
Outcome classical_correspondence() {
  const PhysicalParams p = desk(0.5, 1.0);
  const Potential v = Potential::harmonic(p.m, 1.0);
  const InitialGaussian init{1.0, 0.5, 0.4, 0.3};
  const double dt = 0.005;
  const std::size_t steps = 2000, every = 200;
  const MomentSeries ms = langevin_ensemble(p, v, init, dt, steps, 10000, 505, every);

  const Axis pa{-7.0, 14.0 / 128, 128}, qa{-7.0, 14.0 / 128, 128};
  PhaseSpaceDensity w0 = make_density(pa, qa, [&](double pp, double qq) {
    const double x = qq - init.mean_q, y = pp - init.mean_p;
    return std::exp(-x * x / (2 * init.sd_q * init.sd_q) - y * y / (2 * init.sd_p * init.sd_p));
  });
  w0.values /= w0.integral();
  std::vector<Moments> fp;
  fokker_planck_solve(p, v, w0, dt, steps, nullptr, [&](const PhaseSpaceDensity& w, std::size_t s) {
    if (s % every == 0) fp.push_back(classical_moments(w));
  });
  fp.insert(fp.begin(), classical_moments(w0));

  std::vector<Series> sim, num, exact;
  const char* names[4] = {"mean_q", "var_q", "mean_p", "var_p"};
  auto pick = [](const Moments& m, int i) {
    return i == 0 ? m.mean_q : i == 1 ? m.var_q : i == 2 ? m.mean_p : m.var_p;
  };
  for (int i = 0; i < 4; ++i) {
    Series a{names[i], ms.t, {}, {}}, b{names[i], ms.t, {}, {}}, c{names[i], ms.t, {}, {}};
    for (std::size_t k = 0; k < ms.t.size(); ++k) {
      a.value.push_back(pick(ms.m[k], i));
      a.se.push_back(pick(ms.se[k], i));
      b.value.push_back(pick(fp[k], i));
      const GaussianMoments g = fp_moments_exact(
          p, 1.0, 0.0, {init.mean_p, init.mean_q, init.sd_p * init.sd_p, init.sd_q * init.sd_q, 0.0}, ms.t[k]);
      const double gv[4] = {g.mean_q, g.var_q, g.mean_p, g.var_p};
      c.value.push_back(gv[i]);
    }
    sim.push_back(a);
    num.push_back(b);
    exact.push_back(c);
  }
  const ComparisonReport vs_num = compare(sim, num), vs_exact = compare(sim, exact);
  double z_num = 0.0, z_exact = 0.0;
  for (const auto& r : vs_num.rows) z_num = std::max(z_num, r.max_z);
  for (const auto& r : vs_exact.rows) z_exact = std::max(z_exact, r.max_z);

  // Stationary OU momentum variance, averaged over well-separated times.
  const MomentSeries ou = langevin_ensemble(p, Potential::free_particle(), {0.0, 0.0, 0.0, 0.0}, 0.01, 6000,
                                            10000, 506, 400);
  double var_p = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < ou.t.size(); ++k)
    if (ou.t[k] >= 10.0 / p.gamma - 1e-9) {
      var_p += ou.m[k].var_p;
      ++n;
    }
  var_p /= static_cast<double>(n);
  const double ou_err = std::abs(var_p / (p.m * p.kT()) - 1.0);
  const bool ok = vs_num.pass() && vs_exact.pass() && ou_err < 0.03;
  return {ok, fmt("10^4 paths, max |z| vs FP solver %.2f, vs exact FP moments %.2f (limit 3); "
                  "stationary Var(p)/m kT - 1 = %.2f%% (limit 3%%)",
                  z_num, z_exact, 100 * (var_p / (p.m * p.kT()) - 1.0))};
}

// 6. Explicit oscillator bath reproduces the Langevin momentum variance.
Outcome bath_reduction() {
  PhysicalParams p = desk(0.5, 10.0);
  // The finite cutoff lowers Var(p) by about 2 chi^2/(1 - chi^2) * 2 gamma/(pi Omega)
  // relative, chi = exp(-gamma t): 0.7% at t = 1 for Omega = 50.
  p.Omega = 50.0;
  const double dt = 0.1 / p.Omega;
  const std::vector<double> checks = {1.0, 2.0, 3.0, 4.0};
  const std::size_t steps = static_cast<std::size_t>(std::llround(checks.back() / dt));
  const std::size_t runs = 16000;
  std::vector<std::vector<double>> pv(runs, std::vector<double>(checks.size()));
  parallel_for(runs, [&](std::size_t k) {
    NoiseSource src(606, k);
    // Below omega_min the bath has no zero-frequency friction, so a free
    // particle keeps a momentum memory 1/(1 + 2 gamma/(pi omega_min)); 0.01
    // makes it 0.3% of the response.
    const BathState b = sample_bath(p, 4096, 0.01, 0.0, src);
    const ClassicalTrajectory tr = finite_bath_run(p, Potential::free_particle(), 0.0, 0.0, b, dt, steps);
    for (std::size_t c = 0; c < checks.size(); ++c) pv[k][c] = tr.p[static_cast<std::size_t>(std::llround(checks[c] / dt))];
  });
  bool ok = true;
  std::string d = fmt("%zu realizations of 4096 modes:", runs);
  for (std::size_t c = 0; c < checks.size(); ++c) {
    double m = 0.0, s = 0.0;
    for (const auto& r : pv) m += r[c];
    m /= static_cast<double>(runs);
    for (const auto& r : pv) s += (r[c] - m) * (r[c] - m);
    s /= static_cast<double>(runs - 1);
    const double ref = fp_moments_exact(p, 0.0, 0.0, {}, checks[c]).var_p;
    const double rel = s / ref - 1.0;
    ok = ok && std::abs(rel) < 0.05;
    d += fmt(" t=%g %+.2f%%", checks[c], 100 * rel);
  }
  return {ok, d + " (limit 5%)"};
}

// 7. Integrated noise autocovariance.
Outcome fluctuation_dissipation() {
  const PhysicalParams p = desk(0.5, 10.0);
  const std::size_t baths = 1000, origins = 256;
  const double half = 20.0 / p.Omega;
  std::vector<double> est(baths);
  parallel_for(baths, [&](std::size_t k) {
    NoiseSource src(707, k);
    const BathState b = sample_bath(p, 4096, 0.05, 0.0, src);
    double a = 0.0;
    for (std::size_t o = 0; o < origins; ++o) a += noise_window_product(b, 7.3 * static_cast<double>(o) / p.Omega, half);
    est[k] = a / static_cast<double>(origins);
  });
  double m = 0.0, s = 0.0;
  for (double e : est) m += e;
  m /= static_cast<double>(baths);
  for (double e : est) s += (e - m) * (e - m);
  const double se = std::sqrt(s / static_cast<double>(baths - 1) / static_cast<double>(baths));
  const double target = 2.0 * p.m * p.gamma * p.kT();
  const double rel = m / target - 1.0;
  return {std::abs(rel) < 0.05,
          fmt("%zu baths: %.4f +- %.4f vs 2 m gamma kT = %.4f (%+.2f%%, window |u| <= 20/Omega "
              "expects %+.2f%%; limit 5%%)",
              baths, m, se, target, 100 * rel, 100 * (integrated_kernel(p, half) / (2 * p.m * p.gamma) - 1))};
}

// 8. Pointer reading of a static source.
Outcome pointer() {
  const PhysicalParams p = desk(0.5, 10.0);
  const double q0 = 1.5, lambda = 10.0;
  const std::size_t runs = 400, n = 201;
  std::vector<double> times(n), q(n, q0);
  for (std::size_t i = 0; i < n; ++i) times[i] = 0.01 * static_cast<double>(i);
  std::vector<PointerReadout> out(runs);
  parallel_for(runs, [&](std::size_t k) {
    NoiseSource src(808, k);
    const BathState band = sample_band(p, 256, 0.95, q0, src);
    out[k] = pointer_run(band, times, q, p, lambda);
  });
  const PointerStats st = pointer_statistics(out);
  const std::size_t last = st.t.size() - 1;
  const double z = std::abs(st.mean_R[last] - q0) / st.se_mean_R[last];
  const double ell2 = resolution(p);
  const double rel = st.var_R[last] / ell2 - 1.0;
  return {z <= 3.0 && std::abs(rel) < 0.1,
          fmt("<R> - q0 = %.2e (|z| %.2f, limit 3); Var R / ell^2 - 1 = %+.2f%% (limit 10%%)",
              st.mean_R[last] - q0, z, 100 * rel)};
}

// 9. Impulsive measurement limit.
Outcome von_neumann() {
  const PhysicalParams base = desk(1.0, 1.0);
  const Grid g(-12.0, 12.0, 128);
  Eigen::VectorXcd w(128);
  for (std::size_t i = 0; i < 128; ++i) w(static_cast<Eigen::Index>(i)) = std::exp(-(g.q(i) - 0.5) * (g.q(i) - 0.5) / 16.0);
  WaveFunction psi(g, w);
  psi.normalize();
  const DensityMatrix rho0 = DensityMatrix::projector(psi);
  const double ratio = 0.1;  // T / gamma held fixed
  const std::vector<std::pair<double, double>> seq = {{0.5, 0.5 * ratio}, {2.0, 2.0 * ratio}, {8.0, 8.0 * ratio}};
  const VonNeumannReport rep = von_neumann_limit_check(rho0, base, Potential::free_particle(), seq);
  const VonNeumannPoint& top = rep.points.back();

  // Noise-averaged position from conditioned trajectories at the largest gamma.
  PhysicalParams p = base;
  p.gamma = top.gamma;
  p.T = top.T;
  const double tau = 1.0 / p.gamma;
  const std::size_t steps = 1000, traj = 200;
  const SseEnsembleResult ens = sse_ensemble(p, Potential::free_particle(), psi, tau / steps, steps, traj, 909,
                                             steps, SseModel::Dissipationless, false);
  inv.sse(ens.max_norm_error, traj);
  const double z = std::abs(ens.mean_q.back() - rho0.mean_q()) / ens.se_mean_q.back();

  std::string d;
  for (const auto& pt : rep.points) d += fmt("gamma=%g: fit %.4f vs kappa tau/2 %.4f (%.2f%%); ", pt.gamma, pt.fitted, pt.expected, 100 * pt.relative_error);
  d += fmt("<q> %.4f -> %.4f (|z| %.2f)", rho0.mean_q(), ens.mean_q.back(), z);
  return {top.relative_error < 0.05 && z <= 3.0, d};
}

// 10. hbar -> 0 correspondence.
Outcome hbar_correspondence() {
  const std::vector<double> hs = {1.0, 0.5, 0.25, 0.125};
  const double t_end = 2.0, dt = 0.01;
  std::vector<double> dev, weight, resid;
  for (double h : hs) {
    PhysicalParams p = desk(0.5, 1.0);
    p.hbar = h;
    const Potential v = Potential::harmonic(p.m, 1.0);
    const CoherentParams cp = coherent_params(p, 1.0);
    const Grid g(-8.0, 8.0, 256);
    const DensityMatrix rho = run_lindblad(DensityMatrix::projector(coherent_wavefunction(cp, 0.5, 1.0, g)), p,
                                           v, dt, static_cast<std::size_t>(std::llround(t_end / dt)));
    const Moments m = wigner_moments(wigner_transform(rho, h));
    const GaussianMoments c = fp_moments_exact(p, 1.0, 0.0, {0.5, 1.0, cp.sigma_p2, cp.sigma_q2, cp.sigma_pq2}, t_end);
    dev.push_back(std::max({std::abs(m.mean_q - c.mean_q), std::abs(m.var_q - c.var_q),
                            std::abs(m.mean_p - c.mean_p), std::abs(m.var_p - c.var_p)}));

    weight.push_back(interference_weight(make_cat_spec(p, 0.0, -1.0, 0.0, 1.0), 1.0));

    const Axis ax{-6.0, 12.0 / 96, 96};
    const WignerGrid w = sample_phase_space(ax, ax, [](double pp, double qq) {
      return std::exp(-(pp - 0.3) * (pp - 0.3) / 2.0 - qq * qq / 1.5);
    });
    WignerRhsOptions cl;
    cl.classical = true;
    const Eigen::MatrixXd rq = wigner_rhs(w, p, v, 0.0), rc = wigner_rhs(w, p, v, 0.0, cl);
    resid.push_back((rq - rc).norm() / rc.norm());
  }
  bool mono_dev = true, mono_w = true, mono_r = true;
  for (std::size_t i = 1; i < hs.size(); ++i) {
    mono_dev = mono_dev && dev[i] < dev[i - 1];
    mono_w = mono_w && weight[i] < weight[i - 1];
    mono_r = mono_r && resid[i] < resid[i - 1];
  }
  const double order = std::log(resid.front() / resid.back()) / std::log(hs.front() / hs.back());
  std::string d = "hbar";
  for (double h : hs) d += fmt(" %g", h);
  d += ": Wigner-vs-FP dev";
  for (double x : dev) d += fmt(" %.2e", x);
  d += "; cat weight";
  for (double x : weight) d += fmt(" %.2e", x);
  d += "; RHS residual";
  for (double x : resid) d += fmt(" %.2e", x);
  d += fmt(" (order %.2f, need >= 1)", order);
  return {mono_dev && mono_w && mono_r && order >= 1.0 - 1e-9, d};
}

// 11. Invariants over every run above.
Outcome invariants() {
  const bool ok = inv.violations.empty() && inv.max_trace_error <= 1e-6 && inv.min_eigenvalue >= -1e-4 &&
                  inv.max_norm_error <= 1e-6 && inv.lindblad_runs > 0 && inv.sse_runs > 0;
  std::string d = fmt("%zu master-equation runs: max trace error %.1e, min eigenvalue %.1e; %zu trajectories: "
                      "max norm error %.1e",
                      inv.lindblad_runs, inv.max_trace_error, inv.min_eigenvalue, inv.sse_runs, inv.max_norm_error);
  for (const auto& v : inv.violations) d += "; " + v;
  return {ok, d};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0 = none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "selective/nonselective equivalence", 600, selective_vs_nonselective},
      {2, "coherent fixed point", 0, coherent_fixed_point},
      {3, "convergence rate", 300, convergence_rate},
      {4, "cat oracle", 900, cat_oracle},
      {5, "classical correspondence", 0, classical_correspondence},
      {6, "bath reduction", 0, bath_reduction},
      {7, "fluctuation-dissipation", 0, fluctuation_dissipation},
      {8, "pointer", 0, pointer},
      {9, "von Neumann limit", 0, von_neumann},
      {10, "hbar -> 0 correspondence", 0, hbar_correspondence},
      {11, "positivity/trace/norm", 0, invariants},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt("; runtime %.0f s exceeds %.0f s", secs, c.budget_s);
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
