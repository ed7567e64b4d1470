#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace cusploc {

// Identifies one random stream: a master seed plus up to two indices
// (grid point and replication in the harness).
struct StreamSeed {
  std::uint64_t master = 0;
  std::uint32_t g = 0;
  std::uint32_t r = 0;

  StreamSeed() = default;
  StreamSeed(std::uint64_t m) : master(m) {}  // NOLINT(google-explicit-constructor)
  StreamSeed(std::uint64_t m, std::uint32_t g_, std::uint32_t r_) : master(m), g(g_), r(r_) {}

  bool operator==(const StreamSeed&) const = default;
};

// Tags separating the streams used by different consumers of one StreamSeed.
enum class Purpose : std::uint32_t {
  Generic = 0,
  Fbm = 1,
  FbmMovingAverage = 2,
  LimitPilot = 3,
  GaussianSignal = 10,
  Iid = 11,
  Poisson = 12,
  Diffusion = 13,
  Dynamical = 14,
  Test = 99,
};

// Philox4x32-10 counter-based generator. The 128-bit counter is
// (block, purpose, r, g); the 64-bit key is the master seed.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(const StreamSeed& seed, Purpose purpose = Purpose::Generic);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform double in the open interval (0, 1).
  double uniform();

  // Standard normal via the ziggurat method.
  double normal();
  void fill_normal(std::span<double> out);

  static Block bijection(Block counter, Key key);

 private:
  void refill();

  Key key_{};
  Block counter_{};
  Block buffer_{};
  int available_ = 0;
};

}  // namespace cusploc
