#pragma once

#include <vector>

#include <Eigen/Dense>

namespace contmeas::spectral {

/// Rows evaluate the trigonometric interpolant of n periodic samples
/// x0 + j*dx at each target. Targets outside [x0, x0 + n dx) give a zero row
/// when `zero_outside` is set, otherwise they wrap.
Eigen::MatrixXd interpolation_matrix(std::size_t n, double x0, double dx,
                                     const std::vector<double>& targets, bool zero_outside);

/// Circulant matrix of the periodic convolution with a normalized Gaussian of
/// standard deviation s (Fourier multiplier exp(-s^2 k^2 / 2)).
Eigen::MatrixXd gaussian_smoothing_matrix(std::size_t n, double dx, double s);

/// Signed FFT wavenumbers for n samples spaced dx.
Eigen::VectorXd wavenumbers(std::size_t n, double dx);

/// FFT wavenumbers assigned to the band of n bins centred on bin `center`
/// (any integer) instead of on zero. Bin i keeps its residue mod n.
Eigen::VectorXd wavenumbers_around(std::size_t n, double dx, long center);

/// Bin nearest the circular mean of a power spectrum in FFT order.
long spectral_center(const Eigen::VectorXcd& f);

}  // namespace contmeas::spectral
