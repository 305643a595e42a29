#include "contmeas/wigner.hpp"

#include <cmath>

#include "contmeas/fft.hpp"
#include "contmeas/spectral.hpp"

namespace contmeas {

namespace {

using fft::Direction;

// Doubles the column length by zero padding in Fourier space. The Nyquist bin
// is split evenly between +n/2 and -n/2.
Eigen::MatrixXcd upsample_cols(Eigen::MatrixXcd a) {
  const auto n = a.rows();
  fft::transform_cols(a, Direction::Forward);
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(2 * n, a.cols());
  b.topRows(n / 2) = a.topRows(n / 2);
  b.bottomRows(n / 2 - 1) = a.bottomRows(n / 2 - 1);
  b.row(n / 2) = 0.5 * a.row(n / 2);
  b.row(2 * n - n / 2) = 0.5 * a.row(n / 2);
  fft::transform_cols(b, Direction::Inverse);
  return 2.0 * b;
}

// Spectral derivative of the given order along rows (axis 0, i.e. p) or
// columns (axis 1, i.e. q).
Eigen::MatrixXd derivative(const Eigen::MatrixXd& w, int order, int axis, double step) {
  Eigen::MatrixXcd c = w.cast<Complex>();
  const std::size_t n = static_cast<std::size_t>(axis == 0 ? w.rows() : w.cols());
  const Eigen::VectorXd k = spectral::wavenumbers(n, step);
  Eigen::VectorXcd mult(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const bool nyq = i == n / 2;
    mult(static_cast<Eigen::Index>(i)) = (nyq && order % 2 == 1) ? Complex(0.0) : std::pow(Complex(0.0, k(static_cast<Eigen::Index>(i))), order);
  }
  if (axis == 0) {
    fft::transform_cols(c, Direction::Forward);
    c = mult.asDiagonal() * c;
    fft::transform_cols(c, Direction::Inverse);
  } else {
    fft::transform_rows(c, Direction::Forward);
    c = c * mult.asDiagonal();
    fft::transform_rows(c, Direction::Inverse);
  }
  return c.real();
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

WignerGrid wigner_transform(const DensityMatrix& rho, double hbar, WignerReport* report) {
  if (!(hbar > 0.0)) throw DomainError("wigner_transform needs hbar > 0");
  const Grid& g = rho.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  const double dq = g.dq();
  const Eigen::MatrixXcd up = upsample_cols(upsample_cols(rho.values).transpose()).transpose();
  const Eigen::Index n2 = 2 * n;

  // Column i: samples over the offset index m in FFT order.
  Eigen::MatrixXcd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index m = j < n / 2 ? j : j - n;
      const Eigen::Index a = ((2 * i - m) % n2 + n2) % n2;
      const Eigen::Index b = ((2 * i + m) % n2 + n2) % n2;
      s(j, i) = up(a, b);
    }
  fft::transform_cols(s, Direction::Inverse);
  s *= static_cast<double>(n) * dq / (2.0 * kPi * hbar);

  WignerGrid w;
  w.q = Axis{g.q_min(), dq, g.size()};
  const double dp = g.momentum_spacing(hbar);
  w.p = Axis{-static_cast<double>(n / 2) * dp, dp, g.size()};
  w.values.resize(n, n);
  double max_im = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index k = (r - n / 2 + n) % n;
    for (Eigen::Index i = 0; i < n; ++i) {
      w.values(r, i) = s(k, i).real();
      max_im = std::max(max_im, std::abs(s(k, i).imag()));
    }
  }
  const double max_re = std::max(w.values.cwiseAbs().maxCoeff(), 1e-300);
  WignerReport rep;
  rep.imag_residue = max_im / max_re;
  rep.boundary_fraction = std::max(w.values.row(0).cwiseAbs().maxCoeff(),
                                   w.values.row(n - 1).cwiseAbs().maxCoeff()) /
                          max_re;
  rep.aliasing = rep.boundary_fraction > 1e-6;
  if (rep.imag_residue > 1e-6)
    throw DomainError("wigner_transform input is not Hermitian (imaginary residue " +
                      std::to_string(rep.imag_residue) + ")");
  if (report) *report = rep;
  return w;
}

Moments wigner_moments(const WignerGrid& w) { return phase_space_moments(w.p, w.q, w.values); }

Eigen::MatrixXd wigner_rhs(const WignerGrid& w, const PhysicalParams& params, const Potential& pot,
                           double t, const WignerRhsOptions& opt) {
  params.validate();
  int max_order = 1;
  if (pot.is_linear()) {
    max_order = 1;
  } else if (auto d = pot.degree()) {
    max_order = *d;
  } else {
    throw UnsupportedError("the Wigner equation of motion needs a linear or polynomial potential");
  }
  const double m = params.m, hbar = params.hbar, gamma = params.gamma, kT = params.kT();
  const auto np = w.values.rows(), nq = w.values.cols();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(np, nq);

  const Eigen::MatrixXd wq = derivative(w.values, 1, 1, w.q.step);
  for (Eigen::Index r = 0; r < np; ++r) rhs.row(r) -= (w.p[static_cast<std::size_t>(r)] / m) * wq.row(r);

  int terms = 0;
  for (int n = 0; 2 * n + 1 <= max_order; ++n) {
    if (opt.series_terms >= 0 && terms >= opt.series_terms) break;
    if (n > 0 && opt.classical) break;
    ++terms;
    const int order = 2 * n + 1;
    const double coef = std::pow(-0.25 * hbar * hbar, n) / factorial(order);
    const Eigen::MatrixXd wp = derivative(w.values, order, 0, w.p.step);
    for (Eigen::Index c = 0; c < nq; ++c) {
      const double v = pot.derivative(order, w.q[static_cast<std::size_t>(c)], t);
      rhs.col(c) += coef * v * wp.col(c);
    }
  }

  rhs += m * gamma * kT * derivative(w.values, 2, 0, w.p.step);
  if (opt.include_dissipation) {
    Eigen::MatrixXd pw = w.values;
    for (Eigen::Index r = 0; r < np; ++r) pw.row(r) *= w.p[static_cast<std::size_t>(r)];
    rhs += gamma * derivative(pw, 1, 0, w.p.step);
    if (!opt.classical)
      rhs += hbar * hbar * gamma / (16.0 * m * kT) * derivative(w.values, 2, 1, w.q.step);
  }
  return rhs;
}

EomResidual wigner_eom_residual(const std::vector<WignerSnapshot>& series,
                                const PhysicalParams& params, const Potential& pot,
                                const WignerRhsOptions& opt) {
  if (series.size() < 3) throw DomainError("wigner_eom_residual needs at least three snapshots");
  const auto& first = series.front().w;
  for (const auto& s : series)
    if (s.w.values.rows() != first.values.rows() || s.w.values.cols() != first.values.cols() ||
        s.w.p.step != first.p.step || s.w.q.step != first.q.step)
      throw DomainError("Wigner snapshots must share one phase-space grid");
  EomResidual out;
  for (std::size_t k = 1; k + 1 < series.size(); ++k) {
    const double h = series[k + 1].t - series[k - 1].t;
    if (!(h > 0.0)) throw DomainError("Wigner snapshots must have increasing times");
    const Eigen::MatrixXd dwdt = (series[k + 1].w.values - series[k - 1].w.values) / h;
    const Eigen::MatrixXd rhs = wigner_rhs(series[k].w, params, pot, series[k].t, opt);
    const double r = (dwdt - rhs).norm() / std::max(rhs.norm(), 1e-300);
    out.per_snapshot.push_back(r);
    out.relative = std::max(out.relative, r);
  }
  return out;
}

}  // namespace contmeas
