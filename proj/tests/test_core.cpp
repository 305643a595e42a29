#include <gtest/gtest.h>

#include <cmath>

#include "contmeas/core.hpp"
#include "contmeas/noise.hpp"

using namespace contmeas;

TEST(Params, KappaAndValidation) {
  PhysicalParams p;
  p.m = 2.0;
  p.gamma = 0.25;
  p.T = 3.0;
  p.hbar = 0.5;
  EXPECT_DOUBLE_EQ(p.kappa(), 2.0 * 2.0 * 0.25 * 3.0 / 0.25);
  p.validate();
  p.T = 0.0;
  EXPECT_THROW(p.validate(), DomainError);
  p.T = std::nan("");
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(Params, RegimeWarnsButDoesNotThrow) {
  PhysicalParams p;
  p.Omega = 1.0;  // 1/(Omega tau) = 1
  const RegimeReport r = validate_regime(p);
  EXPECT_FALSE(r.inv_omega_tau_ok);
  EXPECT_FALSE(r.warnings().empty());
  PhysicalParams q;
  q.T = 1e4;
  q.Omega = 100.0;
  EXPECT_TRUE(validate_regime(q).all_pass());
}

TEST(Potential, LinearForceIsExact) {
  const Potential v = Potential::linear(2.0, 3.0, 1.0, -0.5);
  EXPECT_TRUE(v.is_linear());
  EXPECT_DOUBLE_EQ(eval_force(v, 0.7, 0.0), -0.5 + 2.0 * 9.0 * 0.7);
  EXPECT_DOUBLE_EQ(v.derivative(2, 0.7, 0.0), 18.0);
  EXPECT_DOUBLE_EQ(v.derivative(3, 0.7, 0.0), 0.0);
}

TEST(Potential, PolynomialDerivatives) {
  const Potential v = Potential::polynomial({0.0, 0.0, -1.0, 0.0, 0.25});
  EXPECT_TRUE(v.is_polynomial());
  EXPECT_EQ(v.degree().value(), 4);
  EXPECT_NEAR(v.force_gradient(1.5, 0.0), -3.0 + 1.5 * 1.5 * 1.5, 1e-12);
  EXPECT_NEAR(v.derivative(3, 1.5, 0.0), 6.0 * 1.5, 1e-12);
}

TEST(Potential, NonlinearRejectsWrongDerivative) {
  auto val = [](double q, double) { return std::cos(q); };
  EXPECT_NO_THROW(Potential::nonlinear(val, [](double q, double) { return -std::sin(q); }));
  EXPECT_THROW(Potential::nonlinear(val, [](double q, double) { return std::sin(q); }), DomainError);
}

TEST(Grid, SpacingAndWavenumbers) {
  const Grid g(-10.0, 10.0, 64);
  EXPECT_DOUBLE_EQ(g.dq(), 20.0 / 64.0);
  EXPECT_DOUBLE_EQ(g.wavenumber(1), g.dk());
  EXPECT_DOUBLE_EQ(g.wavenumber(63), -g.dk());
  EXPECT_EQ(g.nearest_index(100.0), 63u);
  EXPECT_DOUBLE_EQ(g.momentum_spacing(0.5), 0.5 * 2.0 * kPi / 20.0);
}

TEST(States, ProjectorHasUnitTraceAndPurity) {
  const Grid g(-10.0, 10.0, 128);
  Eigen::VectorXcd v(128);
  for (std::size_t i = 0; i < 128; ++i) v(i) = std::exp(-0.5 * (g.q(i) - 1.0) * (g.q(i) - 1.0));
  WaveFunction psi(g, v);
  psi.normalize();
  EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
  const DensityMatrix rho = DensityMatrix::projector(psi);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
  EXPECT_NEAR(rho.purity(), 1.0, 1e-12);
  EXPECT_NEAR(rho.mean_q(), 1.0, 1e-10);
  EXPECT_NEAR(rho.var_q(), 0.5, 1e-10);
  EXPECT_LT(rho.hermiticity_residual(), 1e-15);
  EXPECT_GT(rho.min_eigenvalue(), -1e-10);
}

TEST(Noise, PhiloxKnownAnswers) {
  using A2 = std::array<std::uint32_t, 2>;
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(NoiseSource::philox(A2{0, 0}, A4{0, 0, 0, 0}),
            (A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(NoiseSource::philox(A2{0xffffffffu, 0xffffffffu},
                                A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}),
            (A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(NoiseSource::philox(A2{0xa4093822u, 0x299f31d0u},
                                A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}),
            (A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Noise, StreamsAreReproducibleAndDistinct) {
  NoiseSource a(7, 3), b(7, 3), c(7, 4);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    differ = differ || x != c.normal();
  }
  EXPECT_TRUE(differ);
}

TEST(Noise, IncrementMoments) {
  NoiseSource s(1, 0);
  const std::size_t n = 200000;
  const auto dw = wiener_increments(s, n, 0.01);
  double m = 0.0, v = 0.0, k = 0.0;
  for (double x : dw) m += x;
  m /= n;
  for (double x : dw) {
    v += (x - m) * (x - m);
    k += std::pow(x - m, 4);
  }
  v /= n;
  k /= n;
  EXPECT_NEAR(m, 0.0, 5.0 * std::sqrt(0.01 / n));
  EXPECT_NEAR(v / 0.01, 1.0, 0.02);
  EXPECT_NEAR(k / (v * v), 3.0, 0.1);
  EXPECT_THROW(wiener_increments(s, 3, 0.0), DomainError);
}
