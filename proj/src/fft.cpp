#include "cusploc/fft.hpp"

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>

#include "cusploc/error.hpp"

namespace cusploc {
namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

struct Plans {
  fftw_plan forward;
  fftw_plan backward;
};

// Plan creation is not thread-safe in FFTW; execution with new arrays is.
std::mutex plan_mutex;

const Plans& plans_for(std::size_t n) {
  static std::map<std::size_t, Plans> cache;
  std::lock_guard lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  RealBuffer r(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  ComplexBuffer c(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
  if (!r || !c) throw NumericalError("FFT buffer allocation failed");
  const int len = static_cast<int>(n);
  Plans p{fftw_plan_dft_r2c_1d(len, r.get(), c.get(), FFTW_ESTIMATE),
          fftw_plan_dft_c2r_1d(len, c.get(), r.get(), FFTW_ESTIMATE)};
  if (!p.forward || !p.backward) throw NumericalError("FFT plan creation failed");
  return cache.emplace(n, p).first->second;
}

RealBuffer real_buffer(std::size_t n) {
  RealBuffer b(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  if (!b) throw NumericalError("FFT buffer allocation failed");
  return b;
}

ComplexBuffer complex_buffer(std::size_t n) {
  ComplexBuffer b(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
  if (!b) throw NumericalError("FFT buffer allocation failed");
  return b;
}

}  // namespace

std::size_t fft_size_at_least(std::size_t target) {
  for (std::size_t n = std::max<std::size_t>(target, 1);; ++n) {
    std::size_t m = n;
    for (std::size_t p : {2, 3, 5, 7})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

FftCorrelator::FftCorrelator(std::span<const double> signal, std::size_t kernel_length)
    : signal_length_(signal.size()),
      kernel_length_(kernel_length),
      size_(fft_size_at_least(signal.size() + kernel_length)) {
  if (signal.empty() || kernel_length == 0) throw DomainError("correlation needs nonempty inputs");
  const Plans& p = plans_for(size_);
  auto in = real_buffer(size_);
  auto out = complex_buffer(size_);
  std::memset(in.get(), 0, sizeof(double) * size_);
  std::memcpy(in.get(), signal.data(), sizeof(double) * signal.size());
  fftw_execute_dft_r2c(p.forward, in.get(), out.get());
  spectrum_.resize(size_ / 2 + 1);
  std::memcpy(static_cast<void*>(spectrum_.data()), out.get(), sizeof(fftw_complex) * spectrum_.size());
}

std::vector<double> FftCorrelator::correlate(std::span<const double> kernel, long offset, long first,
                                             std::size_t count) const {
  if (kernel.size() != kernel_length_) throw DomainError("kernel length mismatch");
  const Plans& p = plans_for(size_);
  auto buf = real_buffer(size_);
  auto spec = complex_buffer(size_);
  std::memset(buf.get(), 0, sizeof(double) * size_);
  const std::size_t L = kernel_length_;
  for (std::size_t m = 0; m < L; ++m) buf[m] = kernel[L - 1 - m];
  fftw_execute_dft_r2c(p.forward, buf.get(), spec.get());
  const std::size_t half = size_ / 2 + 1;
  for (std::size_t i = 0; i < half; ++i) {
    const std::complex<double> a = spectrum_[i];
    const std::complex<double> b(spec[i][0], spec[i][1]);
    const std::complex<double> c = a * b;
    spec[i][0] = c.real();
    spec[i][1] = c.imag();
  }
  fftw_execute_dft_c2r(p.backward, spec.get(), buf.get());
  std::vector<double> out(count);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t j = 0; j < count; ++j) {
    const long idx = static_cast<long>(L) - 1 + first + static_cast<long>(j) - offset;
    if (idx < 0 || idx >= static_cast<long>(signal_length_ + L - 1)) throw DomainError("correlation lag out of range");
    out[j] = buf[static_cast<std::size_t>(idx)] * scale;
  }
  return out;
}

}  // namespace cusploc
