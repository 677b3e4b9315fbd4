#pragma once

#include "canamrf/autodiff.hpp"

namespace canamrf {

// Differentiable primitives. Each records its value and VJP on the inputs' tape.

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// s * m for a 1x1 tensor s.
Var scale_by(Var s, Var m);
Var sigmoid(Var a);
Var softmax_rows(Var m);
/// Sum of all entries as a 1x1 tensor.
Var sum(Var a);
/// Row-major reshape (e.g. flatten a d x k matrix to 1 x dk).
Var reshape(Var a, std::size_t rows, std::size_t cols);

/// Circulant matrix of a 1 x d row vector: out[i][j] = v[(i + j) mod d].
/// Row 0 is v, each following row is the previous one rotated left by one.
Var recur(Var v);
Tensor2 recur(const Tensor2& v);

/// Temporal convolution over a T x f sequence followed by mean pooling over time.
///
/// The kernel is (w*f) x c for window width w; each length-w window is
/// flattened row-major, mapped through the kernel plus bias (1 x c), and the T
/// window outputs are averaged. The sequence is zero padded with (w-1)/2
/// steps in front and the rest behind, so there are exactly T windows.
/// Because the map is affine, the mean of the windows is taken before the
/// kernel is applied; the result equals the per-window evaluation.
Var temporal_conv1d_meanpool(Var seq, Var kernel, Var bias);

/// Floor applied to the probability inside the focal-loss logarithm.
inline constexpr double kFocalLogFloor = 1e-12;

/// -(1 - p)^gamma * log(p) with p the probability assigned to the true label
/// (y_hat for label 1, 1 - y_hat for label 0). Throws ConfigError for gamma < 0.
double focal_loss(double y_hat, int label, double gamma);
Var focal_loss(Var y_hat, int label, double gamma);

}  // namespace canamrf
