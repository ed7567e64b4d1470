#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cusploc {

// Smallest n >= target whose prime factors are all in {2, 3, 5, 7}.
std::size_t fft_size_at_least(std::size_t target);

// Linear cross-correlation of a fixed signal against kernels of a fixed length:
// out[j] = sum_i signal[i] * kernel[i - (first + j) + offset].
class FftCorrelator {
 public:
  FftCorrelator(std::span<const double> signal, std::size_t kernel_length);

  std::vector<double> correlate(std::span<const double> kernel, long offset, long first, std::size_t count) const;
  std::size_t transform_size() const { return size_; }

 private:
  std::size_t signal_length_;
  std::size_t kernel_length_;
  std::size_t size_;
  std::vector<std::complex<double>> spectrum_;
};

}  // namespace cusploc
