#include <gtest/gtest.h>

#include <cmath>

#include "contmeas/cat.hpp"
#include "contmeas/wigner.hpp"

using namespace contmeas;

namespace {

PhysicalParams desk() {
  PhysicalParams p;
  p.gamma = 0.5;
  p.T = 1.0;
  return p;
}

}  // namespace

TEST(Cat, IdentitiesAtPreparationTime) {
  const CatSpec s = make_cat_spec(desk(), 0.5, -2.0, -0.5, 2.0);
  const double pp = 0.7, qp = -1.3;
  const CatCoefficients c = cat_coefficients(s, pp, qp, s.t0);
  EXPECT_NEAR(c.Sigma, overlap_exponent(s.cp, pp, qp), 1e-12);
  EXPECT_NEAR(c.Upsilon, qp / s.params.hbar, 1e-12);
  EXPECT_NEAR(c.Phi, -pp / s.params.hbar, 1e-12);
  EXPECT_GT(c.D, 0.0);
}

TEST(Cat, InitialWignerMatchesTransform) {
  const PhysicalParams p = desk();
  const CatSpec s = make_cat_spec(p, 0.0, -3.0, 0.0, 3.0);
  const Grid g(-16.0, 16.0, 256);
  const WaveFunction psi = cat_wavefunction(s, g);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-10);
  const WignerGrid w = wigner_transform(DensityMatrix::projector(psi), p.hbar);
  double err = 0.0;
  for (std::size_t i = 0; i < w.p.n; ++i)
    for (std::size_t j = 0; j < w.q.n; ++j)
      err = std::max(err, std::abs(w.values(i, j) - cat_initial_wigner(s, w.p[i], w.q[j])));
  EXPECT_LT(err, 1e-9);
  EXPECT_NEAR(cat_wigner(s, 0.3, 0.1, 1e-9), cat_initial_wigner(s, 0.3, 0.1), 1e-6);
}

TEST(Cat, InterferenceDecaysTowardLongTimeWeight) {
  const CatSpec s = make_cat_spec(desk(), 0.0, -2.0, 0.0, 2.0);
  double prev = interference_log_weight(s, 0.01);
  for (double t : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    const double lw = interference_log_weight(s, t);
    EXPECT_LT(lw, prev);
    prev = lw;
  }
  const double C = overlap_exponent(s.cp, 0.0, 4.0);
  EXPECT_NEAR(interference_log_weight(s, 1e-9), 0.0, 1e-6);
  // Sigma vanishes with a 1/t tail once C_yy grows linearly.
  const double s60 = interference_log_weight(s, 60.0) + C;
  const double s600 = interference_log_weight(s, 600.0) + C;
  EXPECT_GT(s60, 0.0);
  EXPECT_NEAR(s600 / s60, 0.1, 0.01);
  // The long-time form drops the O(hbar gamma / kT) quantum corrections of
  // the Gaussians, so agreement improves with t but stops at that level.
  auto rel = [&](double t) {
    return std::abs(cat_wigner(s, 0.2, 0.4, t) / cat_long_time(s, 0.2, 0.4, t) - 1.0);
  };
  EXPECT_LT(rel(600.0), rel(6.0));
  EXPECT_LT(rel(6000.0), 1e-2);
}

TEST(Cat, ClassicalLimitIsNormalized) {
  const CatSpec s = make_cat_spec(desk(), 0.0, -2.0, 0.0, 2.0);
  const Axis pa{-10.0, 0.05, 400}, qa{-15.0, 0.075, 400};
  const WignerGrid w = sample_phase_space(pa, qa, [&](double p, double q) { return cat_classical_limit(s, p, q, 1.0); });
  EXPECT_NEAR(w.integral(), 1.0, 1e-6);
  EXPECT_THROW(cat_coefficients(s, 0.0, 0.0, s.t0, true), DomainError);
}

TEST(Cat, NormalizationExactWhenPhaseVanishes) {
  const CatSpec s = make_cat_spec(desk(), 0.0, -1.0, 0.0, 1.0);
  const Grid g(-12.0, 12.0, 256);
  const WignerGrid w = wigner_transform(DensityMatrix::projector(cat_wavefunction(s, g)), s.params.hbar);
  const Axis pa = w.p, qa = w.q;
  const WignerGrid f = sample_phase_space(pa, qa, [&](double p, double q) { return cat_wigner(s, p, q, 0.5); });
  EXPECT_NEAR(f.integral(), 1.0, 1e-8);
}
