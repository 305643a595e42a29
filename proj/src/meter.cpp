#include "contmeas/meter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace contmeas {

double bath_mode_count(const PhysicalParams& params, double omega_min) {
  return 2.0 * params.m * params.gamma / (kPi * params.M) * (1.0 / omega_min - 1.0 / params.Omega);
}

namespace {

void gibbs_fill(BathState& b, double kT, NoiseSource& src) {
  const std::size_t n = b.size();
  b.Q.resize(n);
  b.P.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = b.omegas[i];
    const double mm = b.mode_mass[i];
    b.Q[i] = b.q_ref + std::sqrt(kT / (mm * w * w)) * src.normal();
    b.P[i] = std::sqrt(mm * kT) * src.normal();
  }
}

}  // namespace

BathState sample_bath(const PhysicalParams& params, std::size_t n, double omega_min, double q_ref,
                      NoiseSource& src) {
  params.validate();
  if (!(omega_min > 0.0)) throw DomainError("omega_min must be > 0: the 1/omega^2 density is not normalizable at 0");
  if (!(omega_min < params.Omega)) throw DomainError("omega_min must be below Omega");
  BathState b;
  b.M = params.M;
  b.q_ref = q_ref;
  b.omega_min = omega_min;
  b.omega_max = params.Omega;
  b.omegas.resize(n);
  const double weight = n ? bath_mode_count(params, omega_min) / static_cast<double>(n) : 0.0;
  b.mode_mass.assign(n, weight * params.M);
  // CDF of 1/w^2 on [a, b]: F(w) = (1/a - 1/w)/(1/a - 1/b).
  const double ia = 1.0 / omega_min, ib = 1.0 / params.Omega;
  for (std::size_t i = 0; i < n; ++i) b.omegas[i] = 1.0 / (ia - src.uniform() * (ia - ib));
  gibbs_fill(b, params.kT(), src);
  return b;
}

BathState sample_band(const PhysicalParams& params, std::size_t n, double band_lo, double q_ref,
                      NoiseSource& src) {
  params.validate();
  if (n == 0) throw DomainError("pointer band is empty; widen the band or raise the mode count");
  if (!(band_lo > 0.0 && band_lo < 1.0)) throw DomainError("band_lo must lie in (0, 1)");
  BathState b;
  b.M = params.M;
  b.q_ref = q_ref;
  b.omega_min = band_lo * params.Omega;
  b.omega_max = params.Omega;
  b.omegas.resize(n);
  b.mode_mass.assign(n, params.M);
  for (std::size_t i = 0; i < n; ++i)
    b.omegas[i] = b.omega_min + (b.omega_max - b.omega_min) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  gibbs_fill(b, params.kT(), src);
  return b;
}

std::vector<double> synthesize_noise(const BathState& bath, const std::vector<double>& times) {
  std::vector<double> out(times.size(), 0.0);
  for (std::size_t n = 0; n < bath.size(); ++n) {
    const double w = bath.omegas[n];
    const double a = bath.mode_mass[n] * w * w * (bath.Q[n] - bath.q_ref);
    const double b = w * bath.P[n];
    for (std::size_t k = 0; k < times.size(); ++k) {
      out[k] += a * std::cos(w * times[k]) + b * std::sin(w * times[k]);
    }
  }
  return out;
}

double noise_window_product(const BathState& bath, double t0, double half_window) {
  double pi0 = 0.0, integral = 0.0;
  for (std::size_t n = 0; n < bath.size(); ++n) {
    const double w = bath.omegas[n];
    const double a = bath.mode_mass[n] * w * w * (bath.Q[n] - bath.q_ref);
    const double b = w * bath.P[n];
    const double c = std::cos(w * t0), s = std::sin(w * t0);
    pi0 += a * c + b * s;
    integral += (a * c + b * s) * 2.0 * std::sin(w * half_window) / w;
  }
  return pi0 * integral;
}

double sine_integral(double x) {
  if (x < 0.0) return -sine_integral(-x);
  if (x <= 4.0) {
    // Power series converges quickly here.
    double term = x, sum = x;
    for (int k = 1; k < 40; ++k) {
      term *= -x * x / ((2.0 * k) * (2.0 * k + 1.0));
      const double add = term / (2.0 * k + 1.0);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  // Large x: E1(i x) by its Lentz continued fraction.
  const std::complex<double> z(0.0, x);
  std::complex<double> b = z + 1.0;
  std::complex<double> c = 1.0 / 1e-300;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  const std::complex<double> e1 = h * std::exp(-z);
  // E1(ix) = -Ci(x) + i (Si(x) - pi/2).
  return e1.imag() + 0.5 * kPi;
}

double integrated_kernel(const PhysicalParams& params, double half_window) {
  return 2.0 * params.m * params.gamma * (2.0 / kPi) * sine_integral(params.Omega * half_window);
}

KernelValues kernels(const PhysicalParams& params, double t) {
  const double W = params.Omega;
  const double pref = 2.0 * params.m * params.gamma / kPi;
  const double x = W * t;
  double f, f2;  // sin(W t)/t and its second derivative
  if (std::abs(x) < 0.5) {
    // Series in x = W t; p runs over (-1)^k x^{2k} / (2k+1)!.
    const double x2 = x * x;
    double a0 = 0.0, a2 = 0.0, p = 1.0, p1 = 0.0;
    for (int k = 0; k < 12; ++k) {
      a0 += p;
      // Second derivative of x^{2k} is 2k(2k-1) x^{2k-2}; p1 carries the shifted power.
      if (k == 1) p1 = -1.0 / 6.0;
      if (k >= 1) a2 += p1 * (2.0 * k) * (2.0 * k - 1.0);
      if (k >= 1) p1 *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
      p *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    f = W * a0;
    f2 = W * W * W * a2;
  } else {
    const double s = std::sin(x), c = std::cos(x);
    f = s / t;
    f2 = -W * W * s / t - 2.0 * W * c / (t * t) + 2.0 * s / (t * t * t);
  }
  KernelValues k;
  k.gamma = pref * f;
  k.lambda_leading = params.kT() / (params.hbar * params.hbar) * k.gamma;
  k.lambda_next = -pref * f2 / (12.0 * params.kT());
  return k;
}

double resolution(const PhysicalParams& params) {
  return params.kT() / (params.M * params.Omega * params.Omega);
}

PointerReadout pointer_run(const BathState& band, const std::vector<double>& times,
                           const std::vector<double>& q, const PhysicalParams& params,
                           double lambda) {
  if (band.size() == 0) throw DomainError("pointer band is empty; widen the band or raise the mode count");
  if (times.size() != q.size() || times.size() < 2) throw DomainError("pointer_run needs matching time and position samples");
  if (params.Omega < 10.0 * lambda || lambda < 10.0 / params.tau) {
    std::ostringstream os;
    os << "pointer needs Omega >= 10 lambda >= 100/tau (Omega=" << params.Omega << ", lambda=" << lambda
       << ", tau=" << params.tau << ")";
    throw DomainError(os.str());
  }
  const std::size_t n = band.size();
  // Relative coordinates Y = Q - q, V = dY/dt; q is piecewise linear so dq/dt
  // jumps at the samples and V jumps by the opposite amount.
  std::vector<double> Y(n), V(n), R(n), S(n);
  const double v0 = (q[1] - q[0]) / (times[1] - times[0]);
  for (std::size_t i = 0; i < n; ++i) {
    Y[i] = band.Q[i] - q[0];
    V[i] = band.P[i] / band.mode_mass[i] - v0;
    R[i] = band.Q[i];
    S[i] = band.Q[i] * band.Q[i];
  }
  PointerReadout out;
  out.lambda = lambda;
  out.ell2 = resolution(params);
  auto record = [&](double t) {
    double r = 0.0, s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r += R[i];
      s += S[i];
    }
    out.t.push_back(t);
    out.R.push_back(r / static_cast<double>(n));
    out.S.push_back(s / static_cast<double>(n));
  };
  record(times[0]);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double T = times[k + 1] - times[k];
    const double v = (q[k + 1] - q[k]) / T;
    if (k > 0) {
      const double vprev = (q[k] - q[k - 1]) / (times[k] - times[k - 1]);
      for (std::size_t i = 0; i < n; ++i) V[i] -= (v - vprev);
    }
    const int sub = std::max(1, static_cast<int>(std::ceil(T * band.omega_max / 0.05)));
    const double h = T / sub;
    // First-order-hold exponential filter weights over one substep.
    const double e = std::exp(-lambda * h);
    const double w1 = (1.0 - e) / (lambda * h) - e;   // weight of the start value
    const double w2 = 1.0 - (1.0 - e) / (lambda * h); // weight of the end value
    for (std::size_t i = 0; i < n; ++i) {
      const double w = band.omegas[i];
      const double c = std::cos(w * h), s = std::sin(w * h);
      double y = Y[i], vy = V[i], r = R[i], ss = S[i];
      double qq = q[k];
      double Qa = qq + y;
      for (int j = 0; j < sub; ++j) {
        const double yn = y * c + vy / w * s;
        vy = -y * w * s + vy * c;
        y = yn;
        qq += v * h;
        const double Qb = qq + y;
        r = e * r + w1 * Qa + w2 * Qb;
        ss = e * ss + w1 * Qa * Qa + w2 * Qb * Qb;
        Qa = Qb;
      }
      Y[i] = y;
      V[i] = vy;
      R[i] = r;
      S[i] = ss;
    }
    record(times[k + 1]);
  }
  return out;
}

PointerStats pointer_statistics(const std::vector<PointerReadout>& runs) {
  if (runs.empty()) throw DomainError("pointer_statistics needs at least one run");
  const std::size_t nt = runs.front().t.size();
  const double nr = static_cast<double>(runs.size());
  PointerStats st;
  st.t = runs.front().t;
  for (std::size_t k = 0; k < nt; ++k) {
    double mr = 0.0, ms = 0.0;
    for (const auto& r : runs) {
      mr += r.R[k];
      ms += r.S[k];
    }
    mr /= nr;
    ms /= nr;
    double vr = 0.0, vz = 0.0;
    for (const auto& r : runs) {
      vr += (r.R[k] - mr) * (r.R[k] - mr);
      // Linearized estimator S - 2 mean(R) R for the standard error.
      const double z = (r.S[k] - ms) - 2.0 * mr * (r.R[k] - mr);
      vz += z * z;
    }
    const double denom = std::max(1.0, nr - 1.0);
    st.mean_R.push_back(mr);
    st.se_mean_R.push_back(std::sqrt(vr / denom / nr));
    st.var_R.push_back(ms - mr * mr);
    st.se_var_R.push_back(std::sqrt(vz / denom / nr));
  }
  return st;
}

}  // namespace contmeas
