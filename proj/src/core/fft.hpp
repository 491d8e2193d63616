#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace exhurst {

// In-place iterative radix-2 complex FFT for power-of-two sizes. Twiddle and
// bit-reversal tables are built once at construction; forward() is const, so
// one instance can be shared across worker threads.
class Radix2Fft {
 public:
  explicit Radix2Fft(std::size_t n);  // n must be a power of two >= 1

  // Unnormalized DFT: a[k] <- sum_j a[j] exp(-2*pi*i*j*k/n).
  void forward(std::span<std::complex<double>> a) const;

  std::size_t size() const noexcept { return n_; }

  static bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

 private:
  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddle_;  // exp(-2*pi*i*k/n), k = 0..n/2-1
};

}  // namespace exhurst
