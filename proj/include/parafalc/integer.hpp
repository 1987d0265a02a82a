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

// Exact integer and rational helpers. Nothing in here touches floating point.

#ifndef PARAFALC_INTEGER_HPP
#define PARAFALC_INTEGER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "parafalc/error.hpp"

namespace parafalc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw Error(ErrorCode::kDomainError, "zero denominator");
  return Rational(num, den);
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d <= n / d; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

inline BigInt ipow(const BigInt& base, std::uint64_t exp) {
  BigInt result = 1;
  BigInt b = base;
  while (exp != 0) {
    if (exp & 1U) result *= b;
    exp >>= 1U;
    if (exp != 0) b *= b;
  }
  return result;
}

inline std::uint64_t ipow_u64(std::uint64_t base, unsigned exp) {
  std::uint64_t result = 1;
  for (unsigned i = 0; i < exp; ++i) result *= base;
  return result;
}

/// Largest r with r^k <= x (x >= 0, k >= 1), by bisection.
inline BigInt integer_root_floor(const BigInt& x, std::uint64_t k) {
  if (x < 0 || k == 0) throw Error(ErrorCode::kDomainError, "integer_root_floor needs x >= 0, k >= 1");
  if (x < 2 || k == 1) return x;
  BigInt lo = 0;
  BigInt hi = 1;
  while (ipow(hi, k) <= x) hi <<= 1;
  // invariant: lo^k <= x < hi^k
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) >> 1;
    if (ipow(mid, k) <= x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

/// Smallest r with r^k >= x.
inline BigInt integer_root_ceil(const BigInt& x, std::uint64_t k) {
  BigInt r = integer_root_floor(x, k);
  return ipow(r, k) == x ? r : r + 1;
}

/// Returns sqrt(x) when x is a perfect square.
inline std::optional<BigInt> exact_sqrt(const BigInt& x) {
  if (x < 0) return std::nullopt;
  BigInt r = integer_root_floor(x, 2);
  if (r * r == x) return r;
  return std::nullopt;
}

/// floor(base^(num/den)) for base >= 1 and a nonnegative rational exponent.
inline BigInt floor_rational_power(std::uint64_t base, const Rational& exponent) {
  if (exponent < 0) throw Error(ErrorCode::kDomainError, "negative exponent");
  const BigInt num = numerator(exponent);
  const BigInt den = denominator(exponent);
  return integer_root_floor(ipow(BigInt(base), num.convert_to<std::uint64_t>()),
                            den.convert_to<std::uint64_t>());
}

struct PrimePower {
  std::uint64_t prime = 0;
  unsigned exponent = 0;
};

/// Decomposes q = p^k; nullopt when q is not a prime power.
inline std::optional<PrimePower> as_prime_power(std::uint64_t q) {
  if (q < 2) return std::nullopt;
  std::uint64_t p = 0;
  for (std::uint64_t d = 2; d <= q / d; ++d) {
    if (q % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return PrimePower{q, 1};
  unsigned k = 0;
  while (q % p == 0) {
    q /= p;
    ++k;
  }
  if (q != 1) return std::nullopt;
  return PrimePower{p, k};
}

inline bool is_odd_prime_power(std::uint64_t q) {
  auto pp = as_prime_power(q);
  return pp && pp->prime != 2;
}

/// Parses "A/B" or "A" with integer A, B (B > 0). Decimals are rejected.
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    if (s.empty()) throw Error(ErrorCode::kParseError, "empty integer in rational '" + std::string(text) + "'");
    std::size_t start = (s.front() == '-' || s.front() == '+') ? 1 : 0;
    if (start == s.size()) throw Error(ErrorCode::kParseError, "bad rational '" + std::string(text) + "'");
    for (std::size_t i = start; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') {
        throw Error(ErrorCode::kParseError, "rationals are written A/B with integers A, B; got '" +
                                                std::string(text) + "'");
      }
    }
    return BigInt(std::string(s));
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  BigInt num = parse_int(text.substr(0, slash));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den <= 0) throw Error(ErrorCode::kParseError, "denominator must be positive in '" + std::string(text) + "'");
  return Rational(num, den);
}

inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace parafalc

#endif  // PARAFALC_INTEGER_HPP
