#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "contmeas/coherent.hpp"
#include "contmeas/master.hpp"
#include "contmeas/trajectories.hpp"
#include "contmeas/wigner.hpp"

using namespace contmeas;

namespace {

PhysicalParams desk() {
  PhysicalParams p;
  p.gamma = 0.5;
  p.T = 10.0;
  return p;
}

}  // namespace

TEST(Sse, CoherentStateStaysAtFixedPoint) {
  const PhysicalParams p = desk();
  const Potential v = Potential::harmonic(p.m, 1.0);
  const CoherentParams cp = coherent_params(p, 1.0);
  const Grid g(-12.0, 12.0, 256);
  const SsePropagator prop(p, v, g);
  SseState s = make_sse_state(coherent_wavefunction(cp, 0.5, 1.0, g), p, v);
  NoiseSource src(21, 0);
  const SseRecord rec = sse_run(prop, s, 0.002, 500, src);
  for (const auto& e : rec.ex) {
    EXPECT_NEAR(e.var_q / cp.sigma_q2, 1.0, 1e-2);
    EXPECT_NEAR(e.cov_pq, cp.sigma_pq2, 1e-2 * std::abs(cp.sigma_pq2) + 1e-4);
  }
  EXPECT_LT(rec.max_norm_error, 1e-6);
  EXPECT_FALSE(expectation_sde_check(rec, p).scheme_bug);
}

TEST(Sse, SameSeedSameTrajectory) {
  const PhysicalParams p = desk();
  const Potential v = Potential::free_particle();
  const CoherentParams cp = coherent_params(p, 0.0);
  const Grid g(-12.0, 12.0, 128);
  const SsePropagator prop(p, v, g);
  SseState a = make_sse_state(coherent_wavefunction(cp, 0.0, 0.0, g), p, v);
  SseState b = a;
  NoiseSource sa(3, 1), sb(3, 1);
  const SseRecord ra = sse_run(prop, a, 0.005, 50, sa);
  const SseRecord rb = sse_run(prop, b, 0.005, 50, sb);
  EXPECT_EQ(ra.dw, rb.dw);
  EXPECT_EQ(ra.ex.back().mean_q, rb.ex.back().mean_q);
}

TEST(Sse, BroadStateLocalizes) {
  const PhysicalParams p = desk();
  const Potential v = Potential::free_particle();
  const Grid g(-25.0, 25.0, 512);
  Eigen::VectorXcd w(512);
  for (std::size_t i = 0; i < 512; ++i) w(i) = std::exp(-g.q(i) * g.q(i) / 16.0);
  WaveFunction psi(g, w);
  psi.normalize();
  const SsePropagator prop(p, v, g);
  SseState s = make_sse_state(psi, p, v);
  NoiseSource src(5, 0);
  const SseRecord rec = sse_run(prop, s, 0.002, 1000, src);
  const CoherentParams cp = coherent_params(p, 0.0);
  EXPECT_NEAR(rec.ex.back().var_q / cp.sigma_q2, 1.0, 1e-3);
}

// One step moves the means of a fixed-point Gaussian by the continuous-time
// gain times dw and by the free drift, with no pull back toward the old mean.
TEST(Sse, StepMeanResponseMatchesContinuousGain) {
  const PhysicalParams p = desk();
  const Potential v = Potential::harmonic(p.m, 1.0);
  const CoherentParams cp = coherent_params(p, 1.0);
  const Grid g(-20.0, 20.0, 256);
  const SsePropagator prop(p, v, g);
  const double dt = 0.005, e = 0.02, sk = std::sqrt(p.kappa());
  auto moved = [&](double q, double pp, double dw) {
    SseState s = make_sse_state(coherent_wavefunction(cp, pp, q, g), p, v);
    prop.step(s, dt, dw);
    return std::array<double, 2>{s.ex.mean_q - q, s.ex.mean_p - pp};
  };
  const SseState s0 = make_sse_state(coherent_wavefunction(cp, 0.0, 0.0, g), p, v);
  const double gq = 2.0 * sk * s0.ex.var_q - p.gamma / (2.0 * sk);
  const double gp = 2.0 * sk * s0.ex.cov_pq;
  const auto up = moved(0.0, 0.0, e), down = moved(0.0, 0.0, -e);
  EXPECT_NEAR((up[0] - down[0]) / (2.0 * e) / gq, 1.0, 1e-4);
  EXPECT_NEAR((up[1] - down[1]) / (2.0 * e) / gp, 1.0, 1e-4);
  const auto drift = moved(0.0, 2.0, 0.0);
  EXPECT_NEAR(drift[0] / (2.0 * dt), 1.0, 5e-3);
}

// A packet moving at 60% of the zero-centred Nyquist momentum keeps its
// momentum moments; a fixed band would alias its upper tail.
TEST(Sse, FastPacketIsNotAliased) {
  const PhysicalParams p = desk();
  const Potential v = Potential::free_particle();
  const CoherentParams cp = coherent_params(p, 0.0);
  const Grid g(-20.0, 20.0, 256);
  const double p_fast = 0.6 * kPi * p.hbar / g.dq();
  SseState s = make_sse_state(coherent_wavefunction(cp, p_fast, 0.0, g), p, v);
  const double var_p0 = s.ex.var_p;
  EXPECT_NEAR(s.ex.mean_p, p_fast, 1e-9);
  const SsePropagator prop(p, v, g);
  NoiseSource src(8, 0);
  const SseRecord rec = sse_run(prop, s, 0.005, 200, src);
  EXPECT_NEAR(rec.ex.back().var_p / var_p0, 1.0, 5e-2);
  EXPECT_LT(rec.max_norm_error, 1e-6);
}

TEST(Lindblad, PreservesTraceAndPositivity) {
  const PhysicalParams p = desk();
  const Potential v = Potential::harmonic(p.m, 1.0);
  const CoherentParams cp = coherent_params(p, 1.0);
  const Grid g(-12.0, 12.0, 128);
  const DensityMatrix rho0 = DensityMatrix::projector(coherent_wavefunction(cp, 1.0, 0.0, g));
  LindbladConfig cfg;
  cfg.dt = 0.01;
  cfg.n_steps = 100;
  LindbladReport rep;
  const DensityMatrix rho = lindblad_run(rho0, p, v, cfg, &rep);
  EXPECT_LT(rep.max_trace_error, 1e-6);
  EXPECT_GT(rep.min_eigenvalue, -1e-4);
  EXPECT_LT(rep.final_purity, rep.initial_purity);
  EXPECT_LT(rho.hermiticity_residual(), 1e-12);
}

TEST(Lindblad, UnitaryLimitKeepsPurity) {
  PhysicalParams p = desk();
  p.gamma = 1e-9;
  const Potential v = Potential::harmonic(p.m, 1.0);
  const Grid g(-10.0, 10.0, 128);
  Eigen::VectorXcd w(128);
  for (std::size_t i = 0; i < 128; ++i) w(i) = std::exp(-(g.q(i) - 2.0) * (g.q(i) - 2.0) / 2.0);
  WaveFunction psi(g, w);
  psi.normalize();
  LindbladConfig cfg;
  cfg.dt = 0.01;
  cfg.n_steps = 157;  // about a quarter period
  const DensityMatrix rho = lindblad_run(DensityMatrix::projector(psi), p, v, cfg);
  EXPECT_NEAR(rho.purity(), 1.0, 1e-6);
  EXPECT_NEAR(rho.mean_q(), 2.0 * std::cos(1.57), 1e-3);
}

TEST(Lindblad, MatchesSseEnsembleAverage) {
  const PhysicalParams p = desk();
  const Potential v = Potential::harmonic(p.m, 1.0);
  const CoherentParams cp = coherent_params(p, 1.0);
  const Grid g(-12.0, 12.0, 128);
  const WaveFunction psi0 = coherent_wavefunction(cp, 0.0, 1.0, g);
  LindbladConfig cfg;
  cfg.dt = 0.01;
  cfg.n_steps = 100;
  const DensityMatrix rho = lindblad_run(DensityMatrix::projector(psi0), p, v, cfg);
  const SseEnsembleResult ens = sse_ensemble(p, v, psi0, 0.005, 200, 200, 17, 200, SseModel::Full, false);
  EXPECT_NEAR(ens.mean_q.back(), rho.mean_q(), 4.0 * ens.se_mean_q.back());
  EXPECT_NEAR(ens.delta_q2.back(), rho.var_q(), 4.0 * ens.se_delta_q2.back());
}

TEST(Wigner, RhsOfClassicalLimitIsFokkerPlanck) {
  PhysicalParams p = desk();
  const Potential v = Potential::harmonic(p.m, 1.0);
  const Axis pa{-8.0, 16.0 / 64, 64}, qa{-8.0, 16.0 / 64, 64};
  WignerGrid w{pa, qa, Eigen::MatrixXd(64, 64)};
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) w.values(i, j) = std::exp(-pa[i] * pa[i] / 2.0 - qa[j] * qa[j] / 2.0);
  WignerRhsOptions o;
  o.classical = true;
  const Eigen::MatrixXd r = wigner_rhs(w, p, v, 0.0, o);
  // Hand-evaluated FP operator on the Gaussian.
  double err = 0.0, scale = 0.0;
  const double g = p.gamma, D = p.m * p.gamma * p.kT();
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) {
      const double pp = pa[i], qq = qa[j], f = w.values(i, j);
      const double expect = -(pp / p.m) * (-qq) * f + qq * (-pp) * f + g * f + g * pp * (-pp) * f +
                            D * (pp * pp - 1.0) * f;
      err = std::max(err, std::abs(r(i, j) - expect));
      scale = std::max(scale, std::abs(expect));
    }
  EXPECT_LT(err, 1e-8 * scale);
}

TEST(Wigner, RejectsGeneralPotential) {
  const Potential v = Potential::nonlinear([](double q, double) { return std::cos(q); },
                                           [](double q, double) { return -std::sin(q); });
  const Axis a{-1.0, 0.125, 16};
  WignerGrid w{a, a, Eigen::MatrixXd::Zero(16, 16)};
  EXPECT_THROW(wigner_rhs(w, desk(), v, 0.0), UnsupportedError);
}
