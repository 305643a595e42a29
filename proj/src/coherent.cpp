#include "contmeas/coherent.hpp"

#include <cmath>
#include <sstream>

namespace contmeas {

double CoherentParams::uncertainty_residual() const {
  return sigma_p2 * sigma_q2 - sigma_pq2 * sigma_pq2 - 0.25 * hbar * hbar;
}

Complex CoherentParams::width() const {
  return Complex(1.0, -2.0 * sigma_pq2 / hbar) / (4.0 * sigma_q2);
}

CoherentParams coherent_params(const PhysicalParams& params, double omega0) {
  params.validate();
  if (!(omega0 >= 0.0)) throw DomainError("omega0 must be >= 0");
  const double m = params.m, hbar = params.hbar, gamma = params.gamma, kT = params.kT();
  if (omega0 > 0.0 && kT / (hbar * omega0) < 0.1) {
    std::ostringstream os;
    os << "kB T/(hbar omega0) = " << kT / (hbar * omega0)
       << " < 0.1: the measured-state variances are outside their range of validity";
    throw DomainError(os.str());
  }
  const double kappa = params.kappa();
  const double a = gamma * gamma - omega0 * omega0;
  const double b = 2.0 * hbar * kappa / m;
  const double root = std::hypot(a, b);
  // a + |(a, b)| cancels for a << 0; use the conjugate form there.
  const double num = a >= 0.0 ? a + root : b * b / (root - a);

  CoherentParams cp;
  cp.m = m;
  cp.hbar = hbar;
  cp.gamma = gamma;
  cp.kT = kT;
  cp.omega0 = omega0;
  cp.sigma_q2 = std::sqrt(num / (8.0 * kappa * kappa));

  const double rad = m * m * a * cp.sigma_q2 * cp.sigma_q2 + 0.25 * hbar * hbar;
  if (rad < 0.0) throw DomainError("negative radicand in sigma_pq^2: parameters outside validity");
  cp.sigma_pq2 = std::sqrt(rad) - m * gamma * cp.sigma_q2;
  cp.sigma_p2 = (0.25 * hbar * hbar + cp.sigma_pq2 * cp.sigma_pq2) / cp.sigma_q2;
  cp.epsilon = hbar * hbar / (4.0 * m * cp.sigma_q2) - 2.0 * kappa * cp.sigma_q2 * cp.sigma_pq2;

  const double re = hbar / (2.0 * m * cp.sigma_q2);
  const double im2 = a + re * re;
  if (im2 < 0.0) throw DomainError("complex frequency has no real imaginary part here");
  cp.omega = Complex(re, -std::sqrt(im2));

  // Self-check against the defining complex equations.
  const Complex I(0.0, 1.0);
  const Complex z = (1.0 - 2.0 * I * cp.sigma_pq2 / hbar) / cp.sigma_q2;
  const Complex t1 = -hbar * hbar / (2.0 * m) * (0.5 * z) * (0.5 * z);
  const double t2 = 0.5 * m * omega0 * omega0;
  const Complex t3 = 0.5 * I * hbar * gamma * z;
  const Complex t4 = -I * hbar * kappa;
  cp.residual_c1 = std::abs(t1 + t2 + t3 + t4) /
                   std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)});
  const Complex u1 = hbar * hbar / (2.0 * m) * 0.5 * z;
  const Complex u2 = -0.5 * I * hbar * gamma;
  const double u3 = -2.0 * kappa * cp.sigma_q2 * cp.sigma_pq2;
  const Complex u4 = I * hbar * kappa * cp.sigma_q2;
  cp.residual_c2 = std::abs(u1 + u2 + u3 + u4 - cp.epsilon) /
                   std::max({std::abs(u1), std::abs(u2), std::abs(u3), std::abs(u4)});
  return cp;
}

LeadingOrderVariances coherent_leading_order(const PhysicalParams& params) {
  const double m = params.m, hbar = params.hbar, gamma = params.gamma, kT = params.kT();
  LeadingOrderVariances lo;
  lo.sigma_q2 = std::sqrt(hbar * hbar * hbar / (8.0 * m * m * gamma * kT));
  lo.sigma_pq2 = 0.5 * hbar;
  lo.sigma_p2 = std::sqrt(2.0 * m * m * hbar * gamma * kT);
  return lo;
}

WaveFunction coherent_wavefunction(const CoherentParams& cp, double p_prime, double q_prime,
                                   const Grid& grid) {
  const double s = std::sqrt(cp.sigma_q2);
  if (q_prime - 6.0 * s < grid.q_min() || q_prime + 6.0 * s > grid.q_max()) {
    std::ostringstream os;
    os << "coherent state at q'=" << q_prime << " with sigma_q=" << s
       << " is clipped by the grid [" << grid.q_min() << ", " << grid.q_max() << ")";
    throw DomainError(os.str());
  }
  const Complex w = cp.width();
  const double pref = std::pow(2.0 * kPi * cp.sigma_q2, -0.25);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.q(i) - q_prime;
    v(static_cast<Eigen::Index>(i)) = pref * std::exp(-w * x * x + Complex(0.0, p_prime * x / cp.hbar));
  }
  return WaveFunction(grid, std::move(v));
}

double overlap_exponent(const CoherentParams& cp, double dp, double dq) {
  const double u = dp - cp.sigma_pq2 / cp.sigma_q2 * dq;
  return cp.sigma_q2 / (2.0 * cp.hbar * cp.hbar) * u * u + dq * dq / (8.0 * cp.sigma_q2);
}

Complex coherent_overlap(const CoherentParams& cp, double p1, double q1, double p2, double q2) {
  const double c = overlap_exponent(cp, p1 - p2, q1 - q2);
  const double phase = 0.5 * (p1 + p2) * (q1 - q2) / cp.hbar;
  return std::exp(Complex(-c, phase));
}

double coherent_wigner(const CoherentParams& cp, double p_prime, double q_prime, double p,
                       double q) {
  const double dq = q - q_prime;
  const double u = (p - p_prime) - cp.sigma_pq2 / cp.sigma_q2 * dq;
  const double h2 = cp.hbar * cp.hbar;
  return std::exp(-2.0 * cp.sigma_q2 / h2 * u * u - dq * dq / (2.0 * cp.sigma_q2)) / (kPi * cp.hbar);
}

double action_increment(const CoherentParams& cp, double p, double q, double /*dp*/, double dq,
                        double dt, const Potential& pot, double t) {
  if (!pot.is_linear()) throw UnsupportedError("action increment needs a linear potential");
  return (cp.epsilon + p * p / (2.0 * cp.m) + pot.value(q, t) + 0.5 * cp.gamma * p * q) * dt - p * dq;
}

}  // namespace contmeas
