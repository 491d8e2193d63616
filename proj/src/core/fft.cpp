#include "core/fft.hpp"

#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace exhurst {

Radix2Fft::Radix2Fft(std::size_t n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw Error(ErrorCode::invalid_argument, "FFT size must be a power of two, got " + std::to_string(n));
  }
  bitrev_.resize(n);
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < log2n; ++b) r |= ((i >> b) & 1u) << (log2n - 1 - b);
    bitrev_[i] = r;
  }
  twiddle_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddle_[k] = {std::cos(ang), std::sin(ang)};
  }
}

void Radix2Fft::forward(std::span<std::complex<double>> a) const {
  if (a.size() != n_) {
    throw Error(ErrorCode::invalid_argument, "FFT input length mismatch");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = bitrev_[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n_ / len;  // twiddle index step
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> w = twiddle_[k * stride];
        const std::complex<double> u = a[start + k];
        const std::complex<double> v = a[start + k + half] * w;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

}  // namespace exhurst
