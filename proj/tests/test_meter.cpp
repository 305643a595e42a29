#include <gtest/gtest.h>

#include <cmath>

#include "contmeas/meter.hpp"

using namespace contmeas;

TEST(Meter, SineIntegral) {
  EXPECT_NEAR(sine_integral(0.0), 0.0, 1e-15);
  EXPECT_NEAR(sine_integral(1.0), 0.946083070367183, 1e-12);
  EXPECT_NEAR(sine_integral(10.0), 1.658347594218874, 1e-12);
  EXPECT_NEAR(sine_integral(100.0), 1.562225466889056, 1e-12);
  EXPECT_NEAR(sine_integral(-2.0), -sine_integral(2.0), 1e-15);
}

TEST(Meter, ModeCountAndResolution) {
  PhysicalParams p;
  p.m = 1.0;
  p.gamma = 0.5;
  p.M = 2.0;
  p.Omega = 100.0;
  p.T = 10.0;
  EXPECT_NEAR(bath_mode_count(p, 0.05), 2.0 * 0.5 / (kPi * 2.0) * (1.0 / 0.05 - 1.0 / 100.0), 1e-12);
  EXPECT_DOUBLE_EQ(resolution(p), 10.0 / (2.0 * 1e4));
}

TEST(Meter, KernelAtOrigin) {
  PhysicalParams p;
  const KernelValues k = kernels(p, 0.0);
  EXPECT_NEAR(k.gamma, 2.0 * p.m * p.gamma * p.Omega / kPi, 1e-9);
  EXPECT_NEAR(integrated_kernel(p, 1e6), 2.0 * p.m * p.gamma, 1e-5);
}

TEST(Meter, BathSamplesStayInBand) {
  PhysicalParams p;
  NoiseSource s(3, 0);
  const BathState b = sample_bath(p, 2000, 0.05, 1.5, s);
  ASSERT_EQ(b.size(), 2000u);
  double sum_mass = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_GE(b.omegas[i], 0.05);
    EXPECT_LE(b.omegas[i], p.Omega);
    sum_mass += b.mode_mass[i] / b.M;
  }
  EXPECT_NEAR(sum_mass, bath_mode_count(p, 0.05), 1e-6 * sum_mass);
  EXPECT_DOUBLE_EQ(b.q_ref, 1.5);
}

TEST(Meter, NoiseMatchesSynthesisAtOrigin) {
  PhysicalParams p;
  NoiseSource s(5, 0);
  const BathState b = sample_bath(p, 64, 0.05, 0.0, s);
  const auto pi = synthesize_noise(b, {0.0});
  double direct = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) direct += b.mode_mass[i] * b.omegas[i] * b.omegas[i] * b.Q[i];
  EXPECT_NEAR(pi[0], direct, 1e-9 * std::abs(direct) + 1e-12);
}
