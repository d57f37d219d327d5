#include "bergman/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "bergman/errors.hpp"

namespace bergman {

void fft_forward(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw ContractError("fft_forward: length must be a power of two");

  // Bit reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<std::complex<double>> eval_trig_poly(const std::vector<std::complex<double>>& b,
                                                 int n_theta) {
  if (n_theta <= 0 || static_cast<std::size_t>(n_theta) < b.size())
    throw ContractError("eval_trig_poly: n_theta must be >= number of coefficients");
  std::vector<std::complex<double>> x(static_cast<std::size_t>(n_theta), {0.0, 0.0});
  std::copy(b.begin(), b.end(), x.begin());
  fft_forward(x);
  return x;
}

}  // namespace bergman
