#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "cusploc/rng.hpp"
#include "cusploc/stats.hpp"

using namespace cusploc;

TEST_CASE("philox known-answer vectors") {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::bijection(B{0, 0, 0, 0}, K{0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::bijection(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::bijection(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  Philox4x32 a(StreamSeed(42, 1, 2), Purpose::Test), b(StreamSeed(42, 1, 2), Purpose::Test);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());

  std::set<std::uint64_t> firsts;
  for (std::uint32_t g = 0; g < 4; ++g)
    for (std::uint32_t r = 0; r < 4; ++r)
      for (auto p : {Purpose::Fbm, Purpose::GaussianSignal}) firsts.insert(Philox4x32(StreamSeed(42, g, r), p)());
  CHECK(firsts.size() == 32);
  CHECK(Philox4x32(StreamSeed(1), Purpose::Test)() != Philox4x32(StreamSeed(2), Purpose::Test)());
}

TEST_CASE("uniform lies in the open unit interval with the right moments") {
  Philox4x32 g(StreamSeed(7), Purpose::Test);
  std::vector<double> u(200000);
  for (double& x : u) {
    x = g.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
  }
  const auto m = mean_estimate(u);
  CHECK(std::abs(m.mean - 0.5) < 4 * m.stderr_);
  CHECK(ks_distance_to(u, [](double x) { return x; }) < 0.01);
}

TEST_CASE("normal draws match the standard normal") {
  Philox4x32 g(StreamSeed(9), Purpose::Test);
  std::vector<double> z(200000);
  g.fill_normal(z);
  const auto m = mean_estimate(z);
  CHECK(std::abs(m.mean) < 4 * m.stderr_);
  CHECK(std::abs(sample_variance(z) - 1.0) < 4 * std::sqrt(2.0 / z.size()));
  CHECK(ks_distance_to(z, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }) < 0.01);
}
