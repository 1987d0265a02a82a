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

#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "parafalc/io.hpp"

namespace parafalc {
namespace {

ErrorCode code_of(const std::string& text) {
  std::istringstream is(text);
  try {
    (void)read_point_set(is);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorCode::kDomainError;
}

TEST(PointSetFile, RoundTripsRandomSets) {
  for (auto q : {3ULL, 9ULL, 25ULL, 27ULL, 49ULL}) {
    const Field f = oracle::field_of_order(q);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto e = oracle::random_points(q, 1 + seed * q / 2, seed);
      const PointSet s(f, e);
      std::istringstream is(point_set_to_string(s));
      const auto back = read_point_set(is);
      EXPECT_EQ(back.field(), f);
      EXPECT_EQ(back, s);
    }
  }
}

TEST(PointSetFile, SkipsCommentsAndBlankLines) {
  std::istringstream is("# a comment\n\n3^2/[1,0,1]\n  ([0,0],[1,0])\n# inside\n\n([2,1],[0,2])\r\n");
  const auto e = read_point_set(is);
  EXPECT_EQ(e.field().order(), 9U);
  EXPECT_EQ(e.size(), 2U);
  const Field& f = e.field();
  EXPECT_TRUE(e.contains({f.parse_element("[0,0]"), f.parse_element("[1,0]")}));
  EXPECT_TRUE(e.contains({f.parse_element("[2,1]"), f.parse_element("[0,2]")}));
}

TEST(PointSetFile, ErrorsCarryCodesAndLines) {
  EXPECT_EQ(code_of(""), ErrorCode::kEmptySet);
  EXPECT_EQ(code_of("# only comments\n\n"), ErrorCode::kEmptySet);
  EXPECT_EQ(code_of("3^1/[0,1]\n([3],[0])\n"), ErrorCode::kInvalidElement);
  EXPECT_EQ(code_of("3^1/[0,1]\n([1],[0])\n([1],[0])\n"), ErrorCode::kDuplicatePoint);
  EXPECT_EQ(code_of("3^2/[1,1,1]\n"), ErrorCode::kReduciblePolynomial);
  EXPECT_EQ(code_of("4^1/[0,1]\n"), ErrorCode::kNotPrime);
  std::istringstream is("3^1/[0,1]\n\n([1],[0])\n(1,0)\n");
  try {
    (void)read_point_set(is);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(PointSetFile, HeaderOnlyIsAnEmptySet) {
  std::istringstream is("5^1/[0,1]\n");
  const auto e = read_point_set(is);
  EXPECT_EQ(e.size(), 0U);
  EXPECT_THROW((void)distance_profile(e), Error);
}

TEST(Json, BigIntegersBecomeStringsOnlyWhenLarge) {
  EXPECT_EQ(to_json(BigInt(42)), Json(42));
  EXPECT_EQ(to_json(BigInt(-7)), Json(-7));
  const BigInt big = ipow(BigInt(10), 30);
  EXPECT_EQ(to_json(big), Json("1" + std::string(30, '0')));
  EXPECT_EQ(to_json(BigInt(std::numeric_limits<std::int64_t>::max())),
            Json(std::numeric_limits<std::int64_t>::max()));
}

TEST(Json, ProfileReport) {
  const Field f = Field::create(3, 1);
  const PointSet e(f, {{0, 0}, {1, 1}});
  const auto j = to_json(distance_profile(e));
  EXPECT_EQ(j["q"], 3);
  // diagonal pairs give 0, (1,1) − (0,0) gives 1 + 1 = 2 and the reverse gives −1 + 1 = 0
  EXPECT_EQ(j["nu"], Json({3, 0, 1}));
  EXPECT_EQ(j["support_size"], 2);
  EXPECT_EQ(j["second_moment"], 10);
}

TEST(Json, BoundReportShapes) {
  const auto main = main_bound_report(BigInt(9), BigInt(9), BigInt(3), BigInt(5));
  const auto j = to_json(main);
  EXPECT_EQ(j["direction"], "lower");
  EXPECT_TRUE(j["bound_num"].is_number());
  EXPECT_EQ(Rational(BigInt(j["bound_num"].get<std::int64_t>()), BigInt(j["bound_den"].get<std::int64_t>())),
            main_lower_bound(BigInt(9), BigInt(9), BigInt(3)));
  EXPECT_EQ(j["satisfied"], true);
}

TEST(Json, ConstructionAndVerification) {
  const auto r = grid_construction(101, make_rational(1, 2));
  const auto j = to_json(r);
  EXPECT_EQ(j["name"], r.name);
  EXPECT_EQ(j["point_set"]["points"].size(), 93U);
  EXPECT_EQ(j["predicted"]["delta_size"], 65);
  EXPECT_EQ(j["predicted"]["parameters"]["N"], 31);
  EXPECT_TRUE(j["applicable"].get<bool>());
  const auto v = to_json(verify_construction(r));
  EXPECT_TRUE(v["passed"].get<bool>());
  EXPECT_EQ(v["delta_size"], 65);
}

TEST(Json, SpectralReport) {
  const Field f = Field::create(3, 1);
  const PointSet a(f, {{0, 0}, {1, 2}});
  const PointSet b(f, {{0, 0}, {0, 1}});
  const auto j = to_json(spectral_report(a, b));
  EXPECT_EQ(j["S"].size(), 3U);
  EXPECT_EQ(j["S"][0][0].get<double>(), 4.0);
  EXPECT_EQ(j["sizes"], Json({2, 2}));
}

}  // namespace
}  // namespace parafalc
