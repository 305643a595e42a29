#include "contmeas/spectral.hpp"

#include <cmath>

#include "contmeas/core.hpp"

namespace contmeas::spectral {

namespace {

// Periodic interpolation kernel for even n at phase theta = 2 pi d / L:
// (1/n) [sin((n/2 - 1/2) theta) / sin(theta/2) + cos(n theta / 2)].
double dirichlet(std::size_t n, double theta) {
  const double half = 0.5 * static_cast<double>(n);
  const double s = std::sin(0.5 * theta);
  double core;
  if (std::abs(s) < 1e-12) {
    // theta is a multiple of 2 pi; sign follows cos((half - 1/2) theta) / cos(theta/2).
    core = (2.0 * half - 1.0) * std::cos((half - 0.5) * theta) / std::cos(0.5 * theta);
  } else {
    core = std::sin((half - 0.5) * theta) / s;
  }
  return (core + std::cos(half * theta)) / static_cast<double>(n);
}

}  // namespace

Eigen::MatrixXd interpolation_matrix(std::size_t n, double x0, double dx,
                                     const std::vector<double>& targets, bool zero_outside) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(targets.size()),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < targets.size(); ++r) {
    const double x = targets[r];
    if (zero_outside && (x < x0 - 1e-12 * dx || x > x0 + (static_cast<double>(n) - 1.0) * dx + 1e-12 * dx))
      continue;
    const double u = (x - x0) / dx;
    const double nearest = std::round(u);
    if (std::abs(u - nearest) < 1e-13) {
      long j = static_cast<long>(nearest) % static_cast<long>(n);
      if (j < 0) j += static_cast<long>(n);
      m(static_cast<Eigen::Index>(r), j) = 1.0;
      continue;
    }
    // Split u - j into a wrapped integer part and the small fraction so that
    // theta near a multiple of 2 pi does not lose digits.
    const double frac = u - nearest;
    const long base = static_cast<long>(nearest);
    const long nl = static_cast<long>(n);
    for (std::size_t j = 0; j < n; ++j) {
      long k = (base - static_cast<long>(j)) % nl;
      if (k < -nl / 2) k += nl;
      if (k >= nl / 2) k -= nl;
      const double theta = 2.0 * kPi * (static_cast<double>(k) + frac) / static_cast<double>(n);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = dirichlet(n, theta);
    }
  }
  return m;
}

Eigen::VectorXd wavenumbers(std::size_t n, double dx) {
  Eigen::VectorXd k(static_cast<Eigen::Index>(n));
  const double dk = 2.0 * kPi / (static_cast<double>(n) * dx);
  for (std::size_t i = 0; i < n; ++i) {
    long kk = static_cast<long>(i);
    if (kk >= static_cast<long>(n / 2)) kk -= static_cast<long>(n);
    k(static_cast<Eigen::Index>(i)) = static_cast<double>(kk) * dk;
  }
  return k;
}

Eigen::VectorXd wavenumbers_around(std::size_t n, double dx, long center) {
  Eigen::VectorXd k(static_cast<Eigen::Index>(n));
  const double dk = 2.0 * kPi / (static_cast<double>(n) * dx);
  const long nl = static_cast<long>(n);
  for (long i = 0; i < nl; ++i) {
    long d = (i - center) % nl;
    if (d < -nl / 2) d += nl;
    if (d >= nl / 2) d -= nl;
    k(i) = static_cast<double>(center + d) * dk;
  }
  return k;
}

long spectral_center(const Eigen::VectorXcd& f) {
  const auto n = f.size();
  std::complex<double> acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    acc += std::norm(f(i)) * std::polar(1.0, 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
  if (std::abs(acc) == 0.0) return 0;
  return std::lround(std::arg(acc) * static_cast<double>(n) / (2.0 * kPi));
}

Eigen::MatrixXd gaussian_smoothing_matrix(std::size_t n, double dx, double s) {
  const double L = static_cast<double>(n) * dx;
  const double dk = 2.0 * kPi / L;
  // First column of the circulant: inverse DFT of the multiplier. The
  // Nyquist mode enters as a cosine, keeping the matrix real and symmetric.
  Eigen::VectorXd c(static_cast<Eigen::Index>(n));
  const std::size_t half = n / 2;
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 1.0;
    for (std::size_t k = 1; k < half; ++k) {
      const double kk = static_cast<double>(k) * dk;
      acc += 2.0 * std::exp(-0.5 * s * s * kk * kk) * std::cos(kk * static_cast<double>(j) * dx);
    }
    const double kn = static_cast<double>(half) * dk;
    acc += std::exp(-0.5 * s * s * kn * kn) * std::cos(kn * static_cast<double>(j) * dx);
    c(static_cast<Eigen::Index>(j)) = acc / static_cast<double>(n);
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c(static_cast<Eigen::Index>((i + n - j) % n));
  return m;
}

}  // namespace contmeas::spectral
