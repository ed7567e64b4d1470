#include "cusploc/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace cusploc {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Philox4x32(const StreamSeed& seed, Purpose purpose) {
  key_ = {static_cast<std::uint32_t>(seed.master), static_cast<std::uint32_t>(seed.master >> 32)};
  counter_ = {0u, static_cast<std::uint32_t>(purpose), seed.r, seed.g};
}

Philox4x32::Block Philox4x32::bijection(Block c, Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

void Philox4x32::refill() {
  buffer_ = bijection(counter_, key_);
  ++counter_[0];
  available_ = 2;
}

Philox4x32::result_type Philox4x32::operator()() {
  if (available_ == 0) refill();
  const int i = 2 - available_;
  --available_;
  return static_cast<std::uint64_t>(buffer_[2 * i + 1]) << 32 | buffer_[2 * i];
}

double Philox4x32::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Philox4x32::normal() {
  boost::random::normal_distribution<double> dist;
  return dist(*this);
}

void Philox4x32::fill_normal(std::span<double> out) {
  boost::random::normal_distribution<double> dist;
  for (double& x : out) x = dist(*this);
}

}  // namespace cusploc
