// Copyright 2026 The parafalc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "parafalc/energy.hpp"

namespace parafalc {
namespace {

std::vector<ElemIndex> random_subset(Rng& rng, std::uint64_t q) {
  std::vector<ElemIndex> out;
  for (ElemIndex x = 0; x < q; ++x) {
    if (rng.below(3) == 0) out.push_back(x);
  }
  if (out.empty()) out.push_back(static_cast<ElemIndex>(rng.below(q)));
  return out;
}

TEST(AdditiveEnergy, HandExamples) {
  const Field f7 = Field::create(7, 1);
  const std::vector<ElemIndex> small{0, 1, 2};
  const auto rep = additive_energy(f7, small, small);
  EXPECT_EQ(rep.value, 19U);
  EXPECT_EQ(rep.trivial_bound, 27U);
  EXPECT_EQ(rep.size_p, 3U);
  const std::vector<ElemIndex> single{4};
  const std::vector<ElemIndex> q{0, 3, 5, 6};
  EXPECT_EQ(additive_energy(f7, single, q).value, 4U);
  std::vector<ElemIndex> all(7);
  for (ElemIndex i = 0; i < 7; ++i) all[i] = i;
  EXPECT_EQ(additive_energy(f7, all, all).value, 343U);
}

TEST(AdditiveEnergy, ElementOverloadAgrees) {
  const Field f9 = Field::create(3, 2);
  const std::vector<FieldElement> p{f9.element(1), f9.element(4), f9.element(7)};
  const std::vector<FieldElement> q{f9.element(0), f9.element(3)};
  const std::vector<ElemIndex> pi{1, 4, 7}, qi{0, 3};
  EXPECT_EQ(additive_energy(p, q).value, additive_energy(f9, pi, qi).value);
  const Field f3 = Field::create(3, 1);
  const std::vector<FieldElement> mixed{f3.element(1)};
  EXPECT_THROW((void)additive_energy(p, mixed), Error);
}

TEST(AdditiveEnergy, MatchesQuadrupleBruteForce) {
  for (auto q : oracle::odd_prime_powers(49)) {
    const Field f = oracle::field_of_order(q);
    const auto ref = oracle::ref_of(f);
    Rng rng(derive_seed(51, q, 0));
    for (int trial = 0; trial < 8; ++trial) {
      const auto p = random_subset(rng, q);
      const auto s = random_subset(rng, q);
      const std::vector<std::uint64_t> p64(p.begin(), p.end()), s64(s.begin(), s.end());
      const auto rep = additive_energy(f, p, s);
      ASSERT_EQ(rep.value, oracle::naive_energy(ref, p64, s64)) << q;
      // symmetric, at least the diagonal, at most the trivial bound
      EXPECT_EQ(rep.value, additive_energy(f, s, p).value);
      EXPECT_GE(rep.value, rep.size_p * rep.size_q);
      EXPECT_LE(rep.value, rep.trivial_bound);
      const double prod = static_cast<double>(rep.size_p * rep.size_q);
      EXPECT_LE(static_cast<double>(rep.trivial_bound), prod * std::sqrt(prod) + 1e-9);
    }
  }
}

TEST(AdditiveEnergy, SelfEnergyAtLeastSquare) {
  const Field f11 = Field::create(11, 1);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_subset(rng, 11);
    EXPECT_GE(additive_energy(f11, p, p).value, p.size() * p.size());
  }
}

TEST(FiberEnergy, HandExamples) {
  const Field f3 = Field::create(3, 1);
  const PointSet e(f3, {{0, 0}, {0, 1}});
  EXPECT_EQ(fiber_energy(e), 6U);
  EXPECT_EQ(fiber_energy_bound(e), 8U);
  const PointSet one(f3, {{2, 2}});
  EXPECT_EQ(fiber_energy(one), 1U);
  EXPECT_EQ(fiber_energy_bound(one), 1U);
  const Field f7 = Field::create(7, 1);
  std::vector<Point> grid;
  for (ElemIndex a : {0, 2}) {
    for (ElemIndex b : {1, 3, 4}) grid.push_back({a, b});
  }
  EXPECT_EQ(fiber_energy_bound(PointSet(f7, grid)), 3U * 36U);
}

TEST(FiberEnergy, MatchesBruteForceAndRespectsBounds) {
  for (auto q : oracle::odd_prime_powers(25)) {
    const Field f = oracle::field_of_order(q);
    const auto ref = oracle::ref_of(f);
    for (std::uint64_t trial = 0; trial < 6; ++trial) {
      Rng rng(derive_seed(61, q, trial));
      const auto pts = oracle::random_points(q, rng.between(1, std::min<std::uint64_t>(q * q, 120)),
                                             derive_seed(62, q, trial));
      const PointSet e(f, pts);
      const auto efib = fiber_energy(e);
      ASSERT_EQ(efib, oracle::naive_fiber_energy(ref, pts));
      EXPECT_EQ(fiber_energy(e, 3), efib);
      EXPECT_GE(efib, e.size());
      EXPECT_LE(efib, fiber_energy_bound(e));
    }
  }
}

}  // namespace
}  // namespace parafalc
