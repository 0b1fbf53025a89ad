#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "wncs/errors.hpp"
#include "wncs/network.hpp"

using namespace wncs;

TEST_CASE("identifier construction") {
  const IdentifierLayout layout;
  CHECK(layout.total_bits() == 29);
  CHECK(dynamic_identifier(0.5, layout) == 500);
  CHECK(build_identifier(0.5, layout, 37) == (Identifier{500} << 9) + 37);
  CHECK(dynamic_identifier(1e9, layout) == 1048575);
  CHECK(dynamic_identifier(0.4995, layout) == 500);  // 499.5 rounds away from zero
  CHECK(dynamic_identifier(0.4994, layout) == 499);
  CHECK(dynamic_identifier(0.0, layout) == 0);
  CHECK(dynamic_identifier(-0.1, layout) == 0);
  CHECK(dynamic_part(build_identifier(0.123, layout, 511), layout) == 123);
  CHECK_THROWS_AS(build_identifier(0.5, layout, -1), ConfigError);
  CHECK_THROWS_AS(build_identifier(0.5, layout, 512), ConfigError);
  CHECK_THROWS_AS(dynamic_identifier(std::nan(""), layout), ConfigError);
}

TEST_CASE("default static identifiers") {
  const IdentifierLayout layout;
  CHECK(default_static_id(layout, 1) == 511);
  CHECK(default_static_id(layout, 2) == 510);
  CHECK(default_static_id(layout, 512) == 0);
  CHECK_THROWS_AS(default_static_id(layout, 513), ConfigError);
  CHECK_THROWS_AS(default_static_id(layout, 0), ConfigError);
}

TEST_CASE("layout validation") {
  IdentifierLayout bad;
  bad.dynamic_bits = 0;
  bad.alpha = -1.0;
  bad.dominant_bit = 2;
  CHECK(validate(bad, "network").size() == 3);
  CHECK(validate(IdentifierLayout{}).empty());
}

TEST_CASE("frame arbitration") {
  const IdentifierLayout layout;
  CHECK_FALSE(arbitrate({}).has_value());
  const Contender one[] = {{4, build_identifier(0.1, layout, 3)}};
  CHECK(arbitrate(one) == 4);

  // Equal dynamic parts: the dominant static identifier wins.
  const Contender tied[] = {{2, build_identifier(0.25, layout, 5)},
                            {1, build_identifier(0.25, layout, 6)}};
  CHECK(arbitrate(tied) == 1);

  // The dynamic part dominates whatever the static parts are.
  const Contender dyn[] = {{1, (Identifier{500} << 9) | 511}, {2, (Identifier{501} << 9) | 0}};
  CHECK(arbitrate(dyn) == 2);

  const Contender dup[] = {{1, 77}, {2, 77}};
  CHECK_THROWS_AS(arbitrate(dup), ConfigError);
}

TEST_CASE("bit-serial reference equals frame arbitration") {
  std::mt19937_64 gen(123);
  for (int dominant : {1, 0}) {
    IdentifierLayout layout;
    layout.dominant_bit = dominant;
    for (int trial = 0; trial < 2000; ++trial) {
      const int n = 1 + static_cast<int>(gen() % 8);
      std::vector<Identifier> statics(512);
      for (int i = 0; i < 512; ++i) statics[i] = static_cast<Identifier>(i);
      std::shuffle(statics.begin(), statics.end(), gen);
      std::vector<Contender> cs;
      for (int i = 0; i < n; ++i) {
        // Small dynamic range produces frequent dynamic ties.
        const Identifier dyn = trial % 2 == 0 ? gen() % 4 : gen() % (Identifier{1} << 20);
        cs.push_back({i + 1, (dyn << 9) | statics[i]});
      }
      const auto frame = arbitrate(cs);
      CHECK(arbitrate_bitwise(cs, layout) == frame);
      std::shuffle(cs.begin(), cs.end(), gen);
      CHECK(arbitrate(cs) == frame);
      CHECK(arbitrate_bitwise(cs, layout) == frame);
    }
  }
}

TEST_CASE("wire bits under 0-dominance") {
  IdentifierLayout layout;
  layout.dominant_bit = 0;
  CHECK(wire_bits(0, layout) == (Identifier{1} << 29) - 1);
  CHECK(wire_bits((Identifier{1} << 29) - 1, layout) == 0);
  layout.dominant_bit = 1;
  CHECK(wire_bits(12345, layout) == 12345);
}

TEST_CASE("multi-channel arbitration") {
  const IdentifierLayout layout;
  SUBCASE("one channel reduces to arbitrate") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<MultiChannelContender> mc;
      std::vector<Contender> sc;
      for (int i = 0; i < 4; ++i) {
        const Identifier id = ((gen() % 100) << 9) | static_cast<Identifier>(511 - i);
        mc.push_back({i + 1, {id}});
        sc.push_back({i + 1, id});
      }
      const auto w = arbitrate_multichannel(mc, 1);
      REQUIRE(w.size() == 1);
      CHECK(w[0] == arbitrate(sc));
    }
  }
  SUBCASE("lone contender takes the first channel only") {
    const MultiChannelContender c[] = {
        {1, {build_identifier(0.85, layout, 511), build_identifier(0.5, layout, 511)}}};
    const auto w = arbitrate_multichannel(c, 2);
    CHECK(w[0] == 1);
    CHECK_FALSE(w[1].has_value());
  }
  SUBCASE("two contenders, two channels: exhaustive check") {
    // Every ordering of distinct priorities on both channels.
    const double values[] = {0.1, 0.2, 0.3, 0.4};
    std::vector<int> perm = {0, 1, 2, 3};
    int cases = 0;
    do {
      const MultiChannelContender c[] = {
          {1, {build_identifier(values[perm[0]], layout, 511),
               build_identifier(values[perm[1]], layout, 511)}},
          {2, {build_identifier(values[perm[2]], layout, 510),
               build_identifier(values[perm[3]], layout, 510)}}};
      const auto w = arbitrate_multichannel(c, 2);
      REQUIRE(w[0].has_value());
      REQUIRE(w[1].has_value());
      CHECK(*w[0] != *w[1]);
      const int expected0 = values[perm[0]] > values[perm[2]] ? 1 : 2;
      CHECK(*w[0] == expected0);
      CHECK(std::set<int>{*w[0], *w[1]} == std::set<int>{1, 2});
      ++cases;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(cases == 24);
  }
}

TEST_CASE("Bernoulli channel") {
  RandomStream rng(2024);
  for (int i = 0; i < 1000; ++i) {
    CHECK(transmit(1.0, rng));
    CHECK_FALSE(transmit(0.0, rng));
  }
  const int n = 100000;
  int ok = 0;
  for (int i = 0; i < n; ++i) ok += transmit(0.85, rng) ? 1 : 0;
  const double rate = static_cast<double>(ok) / n;
  CHECK(std::abs(rate - 0.85) < 3.0 * std::sqrt(0.85 * 0.15 / n));

  // Every call consumes exactly one draw.
  RandomStream a(5), b(5);
  transmit(1.0, a);
  transmit(0.3, b);
  CHECK(a.uniform() == b.uniform());
}
