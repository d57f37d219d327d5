#pragma once

#include <complex>
#include <vector>

namespace bergman {

/// In-place radix-2 DFT with the convention
///   X_k = sum_n x_n exp(-2 pi i n k / N),  N a power of two.
void fft_forward(std::vector<std::complex<double>>& x);

/// Evaluates the trigonometric polynomial p(t) = sum_n b_n exp(-i n t) at
/// the n_theta equispaced angles t_j = 2 pi j / n_theta.  n_theta must be a
/// power of two and at least b.size().
std::vector<std::complex<double>> eval_trig_poly(const std::vector<std::complex<double>>& b,
                                                 int n_theta);

}  // namespace bergman
