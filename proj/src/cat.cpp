#include "contmeas/cat.hpp"

#include <cmath>
#include <sstream>

namespace contmeas {

namespace {

// gamma s - 3/2 + 2 e^{-gamma s} - e^{-2 gamma s}/2, cancellation-free near 0.
double drift_bracket(double x) {
  if (x < 1e-2) return x * x * x * (1.0 / 3.0 - x * (0.25 - x * 7.0 / 60.0));
  return x - 1.5 + 2.0 * std::exp(-x) - 0.5 * std::exp(-2.0 * x);
}

double gaussian_exponent(const CatCoefficients& c, double X, double Y) {
  return (-c.Cxx * X * X + c.Cxy * X * Y - c.Cyy * Y * Y) / c.D;
}

struct Drift {
  double X, Y;
};

Drift drift(const CatSpec& spec, double p_prime, double q_prime, double p, double q, double t) {
  const double g = spec.params.gamma, s = t - spec.t0;
  const double om = -std::expm1(-g * s);
  return {q - q_prime - p_prime * om / (spec.params.m * g), p - p_prime * std::exp(-g * s)};
}

}  // namespace

CatSpec make_cat_spec(const PhysicalParams& params, double p1, double q1, double p2, double q2,
                      double t0) {
  params.validate();
  CatSpec s;
  s.p1 = p1;
  s.q1 = q1;
  s.p2 = p2;
  s.q2 = q2;
  s.t0 = t0;
  s.params = params;
  s.cp = coherent_params(params, 0.0);
  return s;
}

double cat_normalization(const CatSpec& spec) {
  const double c = overlap_exponent(spec.cp, spec.p1 - spec.p2, spec.q1 - spec.q2);
  return 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-c)));
}

CatCoefficients cat_coefficients(const CatSpec& spec, double pp, double qp, double t,
                                 bool classical) {
  const double s = t - spec.t0;
  if (s < 0.0) throw DomainError("cat oracle needs t >= t0");
  const auto& P = spec.params;
  const double m = P.m, g = P.gamma, kT = P.kT(), hbar = P.hbar;
  const double sq2 = spec.cp.sigma_q2, spq2 = spec.cp.sigma_pq2;
  const double x = g * s;
  const double e1 = std::exp(-x), e2 = e1 * e1;
  const double om = -std::expm1(-x), om2 = -std::expm1(-2.0 * x);
  CatCoefficients c;
  if (classical) {
    if (s <= 0.0) throw DomainError("classical cat kernel is a delta function at t = t0");
    c.Cxx = 0.5 * m * kT * om2;
    c.Cxy = kT / g * om * om;
    c.Cyy = kT / (m * g * g) * drift_bracket(x);
  } else {
    const double A = hbar / (m * g * sq2) * (0.25 + spq2 * spq2 / (hbar * hbar));
    c.Cxx = 0.5 * hbar * m * g * A * e2 + 0.5 * m * kT * om2;
    c.Cxy = hbar * (A * om * e1 + spq2 / hbar * e1) + kT / g * om * om;
    const double b = 1.0 + spq2 / (m * g * sq2) * om;
    c.Cyy = 0.5 * sq2 * b * b + hbar * hbar / (8.0 * m * m * g * g * sq2) * om * om +
            kT / (m * g * g) * drift_bracket(x) + hbar * hbar / (16.0 * m * kT) * x;
    // Overall sign chosen so that Upsilon(t0) = q'/hbar and Phi(t0) = -p'/hbar,
    // which makes the interference phase continuous with the initial state.
    const double sp2h = (0.25 * hbar * hbar + spq2 * spq2) / (hbar * sq2);
    c.Cx = -(pp * spq2 / hbar - qp * sp2h) * e1;
    c.Cy = -(pp * sq2 / hbar * b - qp * (A * om + spq2 / hbar));
  }
  c.D = 4.0 * c.Cxx * c.Cyy - c.Cxy * c.Cxy;
  if (!(c.D > 0.0)) {
    std::ostringstream os;
    os << "cat coefficient determinant " << c.D << " is not positive at t=" << t;
    throw SolverError(os.str());
  }
  if (!classical) {
    c.Sigma = (c.Cxx * c.Cy * c.Cy - c.Cxy * c.Cx * c.Cy + c.Cyy * c.Cx * c.Cx) / c.D;
    c.Upsilon = (2.0 * c.Cyy * c.Cx - c.Cxy * c.Cy) / c.D;
    c.Phi = (2.0 * c.Cxx * c.Cy - c.Cxy * c.Cx) / c.D;
  }
  return c;
}

double cat_gaussian_component(const CatSpec& spec, double pp, double qp, double p, double q,
                              double t, bool classical) {
  const CatCoefficients c = cat_coefficients(spec, pp, qp, t, classical);
  const Drift d = drift(spec, pp, qp, p, q, t);
  return std::exp(gaussian_exponent(c, d.X, d.Y)) / (2.0 * kPi * std::sqrt(c.D));
}

double interference_log_weight(const CatSpec& spec, double t) {
  const double dp = spec.p1 - spec.p2, dq = spec.q1 - spec.q2;
  return -overlap_exponent(spec.cp, dp, dq) + cat_coefficients(spec, dp, dq, t).Sigma;
}

double interference_weight(const CatSpec& spec, double t) {
  return std::exp(interference_log_weight(spec, t));
}

double cat_wigner(const CatSpec& spec, double p, double q, double t) {
  const double n = cat_normalization(spec);
  const double hbar = spec.params.hbar;
  const double pm = 0.5 * (spec.p1 + spec.p2), qm = 0.5 * (spec.q1 + spec.q2);
  const double dp = spec.p1 - spec.p2, dq = spec.q1 - spec.q2;
  const double w1 = cat_gaussian_component(spec, spec.p1, spec.q1, p, q, t);
  const double w2 = cat_gaussian_component(spec, spec.p2, spec.q2, p, q, t);
  const CatCoefficients mid = cat_coefficients(spec, pm, qm, t);
  const CatCoefficients dif = cat_coefficients(spec, dp, dq, t);
  const Drift d = drift(spec, pm, qm, p, q, t);
  // Everything multiplying the cosine is combined in log space.
  const double log_amp = gaussian_exponent(mid, d.X, d.Y) - std::log(2.0 * kPi * std::sqrt(mid.D)) -
                         overlap_exponent(spec.cp, dp, dq) + dif.Sigma;
  const double phase = 2.0 * pm * dq / (2.0 * hbar) + dif.Upsilon * d.Y + dif.Phi * d.X;
  return n * n * (w1 + w2 + 2.0 * std::exp(log_amp) * std::cos(phase));
}

double cat_initial_wigner(const CatSpec& spec, double p, double q) {
  const double n = cat_normalization(spec);
  const double hbar = spec.params.hbar;
  const double pm = 0.5 * (spec.p1 + spec.p2), qm = 0.5 * (spec.q1 + spec.q2);
  const double w1 = coherent_wigner(spec.cp, spec.p1, spec.q1, p, q);
  const double w2 = coherent_wigner(spec.cp, spec.p2, spec.q2, p, q);
  const double wm = coherent_wigner(spec.cp, pm, qm, p, q);
  const double phase = p / hbar * (spec.q1 - spec.q2) - (spec.p1 - spec.p2) / hbar * (q - qm);
  return n * n * (w1 + w2 + 2.0 * wm * std::cos(phase));
}

double cat_classical_limit(const CatSpec& spec, double p, double q, double t) {
  return 0.5 * (cat_gaussian_component(spec, spec.p1, spec.q1, p, q, t, true) +
                cat_gaussian_component(spec, spec.p2, spec.q2, p, q, t, true));
}

double cat_long_time(const CatSpec& spec, double p, double q, double t) {
  const double n = cat_normalization(spec);
  const double pm = 0.5 * (spec.p1 + spec.p2), qm = 0.5 * (spec.q1 + spec.q2);
  const double dp = spec.p1 - spec.p2, dq = spec.q1 - spec.q2;
  const double w1 = cat_gaussian_component(spec, spec.p1, spec.q1, p, q, t, true);
  const double w2 = cat_gaussian_component(spec, spec.p2, spec.q2, p, q, t, true);
  const double wm = cat_gaussian_component(spec, pm, qm, p, q, t, true);
  const double weight = std::exp(-overlap_exponent(spec.cp, dp, dq));
  return n * n * (w1 + w2 + 2.0 * wm * weight * std::cos(pm * dq / spec.params.hbar));
}

WaveFunction cat_wavefunction(const CatSpec& spec, const Grid& grid) {
  WaveFunction a = coherent_wavefunction(spec.cp, spec.p1, spec.q1, grid);
  const WaveFunction b = coherent_wavefunction(spec.cp, spec.p2, spec.q2, grid);
  a.values = cat_normalization(spec) * (a.values + b.values);
  return a;
}

WignerGrid sample_phase_space(const Axis& p, const Axis& q,
                              const std::function<double(double, double)>& f) {
  WignerGrid w;
  w.p = p;
  w.q = q;
  w.values.resize(static_cast<Eigen::Index>(p.n), static_cast<Eigen::Index>(q.n));
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t j = 0; j < q.n; ++j)
      w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f(p[i], q[j]);
  return w;
}

}  // namespace contmeas
