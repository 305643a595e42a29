#pragma once

#include <Eigen/Dense>

namespace contmeas::fft {

enum class Direction { Forward, Inverse };

// In-place complex transforms backed by FFTW. Forward is unnormalized
// (sum_j x_j e^{-2 pi i jk/n}); Inverse carries the 1/n factor so that
// Inverse(Forward(x)) == x. Plans are cached per shape and safe to use from
// several threads.

void transform(Eigen::VectorXcd& x, Direction dir);
/// Transforms every column independently.
void transform_cols(Eigen::MatrixXcd& a, Direction dir);
/// Transforms every row independently.
void transform_rows(Eigen::MatrixXcd& a, Direction dir);

}  // namespace contmeas::fft
