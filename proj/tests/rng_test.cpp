// Copyright 2026 The vfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "vfl/rng.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "vfl/hash.hpp"

namespace vfl {
namespace {

TEST(CounterRngTest, SameSeedSameStream) {
  CounterRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
}

TEST(CounterRngTest, OutputIsAFunctionOfSeedAndCounter) {
  CounterRng a(7);
  for (int i = 0; i < 10; ++i) a.next_u64();
  EXPECT_EQ(a.counter(), 10u);
  EXPECT_EQ(a.next_u64(), mix64(mix64(7) + 11 * 0x9e3779b97f4a7c15ULL));
}

TEST(CounterRngTest, UniformRanges) {
  CounterRng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform_open_zero();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    ASSERT_LT(r.uniform_index(7), 7u);
  }
}

TEST(CounterRngTest, UniformIndexIsRoughlyFlat) {
  CounterRng r(3);
  std::vector<int> counts(5, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[r.uniform_index(5)];
  // 3 sigma of Binomial(1e5, 0.2) is about 380.
  for (int c : counts) EXPECT_NEAR(c, n / 5, 400);
}

TEST(CounterRngTest, ShuffleIsAPermutation) {
  CounterRng r(9);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  r.shuffle(std::span<int>(w));
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

TEST(CounterRngTest, StandardNormalMoments) {
  CounterRng r(11);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.standard_normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.015);
}

TEST(HashTest, KnownSha256Vectors) {
  EXPECT_EQ(to_hex(sha256("")),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(to_hex(sha256("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(HashTest, HexRoundTripIsLowercaseOnly) {
  const Digest d = sha256("abc");
  EXPECT_EQ(digest_from_hex(to_hex(d)), d);
  std::string upper = to_hex(d);
  std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
  EXPECT_FALSE(digest_from_hex(upper).has_value());
  EXPECT_FALSE(digest_from_hex("00").has_value());
}

}  // namespace
}  // namespace vfl
