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

/**
 * @file field.hpp
 * @brief Exact arithmetic in F_p and F_{p^n} for odd p.
 *
 * An element of F_q = F_p[x]/(f) is the coefficient vector (c_0, ..., c_{n-1})
 * of its reduced polynomial c_0 + c_1 θ + ... + c_{n-1} θ^{n-1}. Internally the
 * vector is packed into the canonical index
 *
 *     index = c_0 + c_1 p + ... + c_{n-1} p^{n-1},
 *
 * and every ordering in the library (dense ν arrays, serialization, subspace
 * enumeration) follows this index: tuples are compared lexicographically
 * starting from the highest-degree coefficient.
 *
 * Without an explicit modulus, Field::create picks the monic irreducible of
 * degree n whose non-leading coefficient vector has the smallest index, so
 * F_9 = F_3[θ]/(θ² + 1) and F_p uses the modulus x.
 *
 * Fields with q <= kTableLimit carry full addition and multiplication tables;
 * larger fields fall back to polynomial arithmetic on each call.
 */

#ifndef PARAFALC_FIELD_HPP
#define PARAFALC_FIELD_HPP

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parafalc/error.hpp"
#include "parafalc/integer.hpp"

namespace parafalc {

using Residue = std::uint32_t;
using ElemIndex = std::uint32_t;

inline constexpr std::uint64_t kTableLimit = 1024;
inline constexpr std::uint64_t kMaxFieldOrder = std::uint64_t{1} << 31U;

namespace detail {

using Poly = std::vector<std::uint64_t>;  // constant term first, residues mod p

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mod(Poly a, const Poly& f, std::uint64_t p) {
  // f is monic
  const std::size_t n = f.size() - 1;
  trim(a);
  while (a.size() > n) {
    const std::uint64_t c = a.back();
    const std::size_t shift = a.size() - 1 - n;
    for (std::size_t i = 0; i <= n; ++i) {
      a[shift + i] = (a[shift + i] + (p - c) * f[i]) % p;
    }
    trim(a);
  }
  return a;
}

inline Poly poly_mul(const Poly& a, const Poly& b, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = (out[i + j] + a[i] * b[j]) % p;
  }
  trim(out);
  return out;
}

inline Poly poly_powmod(Poly base, std::uint64_t exp, const Poly& f, std::uint64_t p) {
  Poly result{1};
  base = poly_mod(std::move(base), f, p);
  while (exp != 0) {
    if (exp & 1U) result = poly_mod(poly_mul(result, base, p), f, p);
    exp >>= 1U;
    if (exp != 0) base = poly_mod(poly_mul(base, base, p), f, p);
  }
  trim(result);
  return result;
}

inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
  // Fermat; p is prime
  std::uint64_t result = 1;
  std::uint64_t base = a % p;
  std::uint64_t e = p - 2;
  while (e != 0) {
    if (e & 1U) result = result * base % p;
    base = base * base % p;
    e >>= 1U;
  }
  return result;
}

inline Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    // a mod b with b made monic
    const std::uint64_t lead_inv = inv_mod(b.back(), p);
    Poly monic_b = b;
    for (auto& c : monic_b) c = c * lead_inv % p;
    Poly r = poly_mod(a, monic_b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

inline Poly poly_sub(Poly a, const Poly& b, std::uint64_t p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
  trim(a);
  return a;
}

/// x^(p^k) mod f by k successive p-th powers.
inline Poly x_frobenius_power(const Poly& f, std::uint64_t p, unsigned k) {
  Poly h{0, 1};
  h = poly_mod(h, f, p);
  for (unsigned i = 0; i < k; ++i) h = poly_powmod(h, p, f, p);
  return h;
}

/// Rabin's test: x^(p^n) = x mod f, and gcd(x^(p^(n/l)) - x, f) = 1 for
/// every prime l dividing n.
inline bool is_irreducible(const Poly& f, std::uint64_t p) {
  const unsigned n = static_cast<unsigned>(f.size() - 1);
  if (n == 1) return true;
  const Poly x{0, 1};
  if (poly_sub(x_frobenius_power(f, p, n), x, p).size() != 0) return false;
  unsigned m = n;
  for (unsigned l = 2; l <= m; ++l) {
    if (m % l != 0) continue;
    while (m % l == 0) m /= l;
    const Poly g = poly_gcd(f, poly_sub(x_frobenius_power(f, p, n / l), x, p), p);
    if (g.size() != 1) return false;
  }
  return true;
}

struct FieldData {
  std::uint64_t p = 0;
  unsigned n = 0;
  std::uint64_t q = 0;
  std::vector<Residue> modulus;  // n + 1 entries, monic
  Poly modulus_poly;

  bool tabled = false;
  std::vector<std::uint16_t> add_table;
  std::vector<std::uint16_t> mul_table;
  std::vector<std::uint16_t> neg_table;
  std::vector<std::uint16_t> inv_table;
  std::vector<std::uint16_t> trace_table;
};

}  // namespace detail

class FieldElement;

/// Immutable handle to a finite field of odd characteristic. Copies share the
/// same underlying tables.
class Field {
 public:
  Field() = default;

  static Field create(std::uint64_t p, unsigned n, std::optional<std::vector<Residue>> modulus = std::nullopt) {
    if (p < 2 || !is_prime(p)) throw Error(ErrorCode::kNotPrime, std::to_string(p) + " is not prime");
    if (p == 2) throw Error(ErrorCode::kEvenCharacteristic, "characteristic 2 is not supported");
    if (n < 1) throw Error(ErrorCode::kDomainError, "extension degree must be at least 1");
    std::uint64_t q = 1;
    for (unsigned i = 0; i < n; ++i) {
      if (q > kMaxFieldOrder / p) {
        throw Error(ErrorCode::kDomainError, "field order " + std::to_string(p) + "^" + std::to_string(n) +
                                                 " exceeds 2^31");
      }
      q *= p;
    }

    auto data = std::make_shared<detail::FieldData>();
    data->p = p;
    data->n = n;
    data->q = q;

    if (modulus) {
      if (modulus->size() != n + 1 || modulus->back() != 1) {
        throw Error(ErrorCode::kDomainError, "modulus must be monic of degree " + std::to_string(n));
      }
      for (Residue c : *modulus) {
        if (c >= p) throw Error(ErrorCode::kDomainError, "modulus coefficient out of range");
      }
      detail::Poly f(modulus->begin(), modulus->end());
      if (!detail::is_irreducible(f, p)) {
        throw Error(ErrorCode::kReduciblePolynomial, "modulus is reducible over F_" + std::to_string(p));
      }
      data->modulus = *modulus;
    } else {
      data->modulus = smallest_irreducible(p, n, q);
    }
    data->modulus_poly.assign(data->modulus.begin(), data->modulus.end());

    Field field;
    field.data_ = data;
    if (q <= kTableLimit) build_tables(*data, field);
    return field;
  }

  /// Parses the "p^n/[c0,c1,...,1]" form.
  static Field parse(std::string_view text);

  bool valid() const noexcept { return data_ != nullptr; }
  std::uint64_t characteristic() const { return data_->p; }
  unsigned degree() const { return data_->n; }
  std::uint64_t order() const { return data_->q; }
  const std::vector<Residue>& modulus() const { return data_->modulus; }
  bool tabled() const { return data_->tabled; }

  friend bool operator==(const Field& a, const Field& b) {
    if (a.data_ == b.data_) return true;
    if (!a.data_ || !b.data_) return false;
    return a.data_->p == b.data_->p && a.data_->n == b.data_->n && a.data_->modulus == b.data_->modulus;
  }

  // Index-level arithmetic. Inputs must be < order(); no checks on the hot path.

  ElemIndex add(ElemIndex a, ElemIndex b) const {
    if (data_->tabled) return data_->add_table[static_cast<std::size_t>(a) * data_->q + b];
    return add_slow(a, b);
  }
  ElemIndex neg(ElemIndex a) const {
    if (data_->tabled) return data_->neg_table[a];
    return neg_slow(a);
  }
  ElemIndex sub(ElemIndex a, ElemIndex b) const { return add(a, neg(b)); }
  ElemIndex mul(ElemIndex a, ElemIndex b) const {
    if (data_->tabled) return data_->mul_table[static_cast<std::size_t>(a) * data_->q + b];
    return mul_slow(a, b);
  }
  ElemIndex square(ElemIndex a) const { return mul(a, a); }
  ElemIndex pow(ElemIndex a, std::uint64_t e) const {
    ElemIndex result = one_index();
    ElemIndex base = a;
    while (e != 0) {
      if (e & 1U) result = mul(result, base);
      e >>= 1U;
      if (e != 0) base = mul(base, base);
    }
    return result;
  }
  ElemIndex inv(ElemIndex a) const {
    if (a == 0) throw Error(ErrorCode::kDivisionByZero, "inverse of zero");
    if (data_->tabled) return data_->inv_table[a];
    return pow(a, data_->q - 2);
  }
  ElemIndex frobenius(ElemIndex a, unsigned i) const {
    for (unsigned k = 0; k < i; ++k) a = pow(a, data_->p);
    return a;
  }
  /// Absolute trace Tr(x) = x + x^p + ... + x^(p^(n-1)), as a residue in [0, p).
  Residue trace(ElemIndex a) const {
    if (data_->tabled) return data_->trace_table[a];
    return trace_slow(a);
  }

  ElemIndex one_index() const { return 1; }
  /// θ, the class of x. For a prime field this is the root of the linear
  /// modulus.
  ElemIndex theta_index() const {
    if (data_->n == 1) return static_cast<ElemIndex>((data_->p - data_->modulus[0]) % data_->p);
    return static_cast<ElemIndex>(data_->p);
  }
  /// The embedding of c in F_p.
  ElemIndex from_residue(std::uint64_t c) const { return static_cast<ElemIndex>(c % data_->p); }

  std::vector<Residue> coeffs(ElemIndex a) const {
    std::vector<Residue> out(data_->n);
    for (unsigned i = 0; i < data_->n; ++i) {
      out[i] = static_cast<Residue>(a % data_->p);
      a = static_cast<ElemIndex>(a / data_->p);
    }
    return out;
  }

  ElemIndex index_of(std::span<const Residue> coeffs) const {
    if (coeffs.size() != data_->n) {
      throw Error(ErrorCode::kInvalidElement, "expected " + std::to_string(data_->n) + " coefficients, got " +
                                                  std::to_string(coeffs.size()));
    }
    std::uint64_t idx = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
      if (coeffs[i] >= data_->p) throw Error(ErrorCode::kInvalidElement, "coefficient out of range");
      idx = idx * data_->p + coeffs[i];
    }
    return static_cast<ElemIndex>(idx);
  }

  void check_index(ElemIndex a) const {
    if (a >= data_->q) throw Error(ErrorCode::kInvalidElement, "element index out of range");
  }

  FieldElement element(ElemIndex a) const;
  FieldElement element(std::span<const Residue> coeffs) const;
  FieldElement zero() const;
  FieldElement one() const;
  FieldElement theta() const;

  std::string to_string() const {
    std::ostringstream os;
    os << data_->p << '^' << data_->n << "/[";
    for (std::size_t i = 0; i < data_->modulus.size(); ++i) os << (i ? "," : "") << data_->modulus[i];
    os << ']';
    return os.str();
  }

  std::string element_to_string(ElemIndex a) const {
    std::ostringstream os;
    os << '[';
    auto c = coeffs(a);
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << ']';
    return os.str();
  }

  /// Parses "[c0,...,c_{n-1}]".
  ElemIndex parse_element(std::string_view text) const;

 private:
  static std::vector<Residue> smallest_irreducible(std::uint64_t p, unsigned n, std::uint64_t q) {
    if (n == 1) return {0, 1};
    detail::Poly f(n + 1, 0);
    f[n] = 1;
    for (std::uint64_t k = 0; k < q; ++k) {
      std::uint64_t rest = k;
      for (unsigned i = 0; i < n; ++i) {
        f[i] = rest % p;
        rest /= p;
      }
      if (f[0] == 0) continue;  // divisible by x
      if (detail::is_irreducible(f, p)) return std::vector<Residue>(f.begin(), f.end());
    }
    throw Error(ErrorCode::kReduciblePolynomial, "no irreducible polynomial found");  // unreachable
  }

  ElemIndex add_slow(ElemIndex a, ElemIndex b) const {
    std::uint64_t out = 0;
    std::uint64_t scale = 1;
    const std::uint64_t p = data_->p;
    for (unsigned i = 0; i < data_->n; ++i) {
      out += ((a % p + b % p) % p) * scale;
      a = static_cast<ElemIndex>(a / p);
      b = static_cast<ElemIndex>(b / p);
      scale *= p;
    }
    return static_cast<ElemIndex>(out);
  }

  ElemIndex neg_slow(ElemIndex a) const {
    std::uint64_t out = 0;
    std::uint64_t scale = 1;
    const std::uint64_t p = data_->p;
    for (unsigned i = 0; i < data_->n; ++i) {
      out += ((p - a % p) % p) * scale;
      a = static_cast<ElemIndex>(a / p);
      scale *= p;
    }
    return static_cast<ElemIndex>(out);
  }

  detail::Poly to_poly(ElemIndex a) const {
    detail::Poly out(data_->n);
    for (unsigned i = 0; i < data_->n; ++i) {
      out[i] = a % data_->p;
      a = static_cast<ElemIndex>(a / data_->p);
    }
    detail::trim(out);
    return out;
  }

  ElemIndex from_poly(const detail::Poly& poly) const {
    std::uint64_t idx = 0;
    for (std::size_t i = poly.size(); i-- > 0;) idx = idx * data_->p + poly[i];
    return static_cast<ElemIndex>(idx);
  }

  ElemIndex mul_slow(ElemIndex a, ElemIndex b) const {
    return from_poly(detail::poly_mod(detail::poly_mul(to_poly(a), to_poly(b), data_->p), data_->modulus_poly,
                                      data_->p));
  }

  Residue trace_slow(ElemIndex a) const {
    ElemIndex sum = 0;
    ElemIndex term = a;
    for (unsigned i = 0; i < data_->n; ++i) {
      sum = add(sum, term);
      term = pow(term, data_->p);
    }
    // the trace lies in F_p, whose elements have index < p
    return static_cast<Residue>(sum);
  }

  static void build_tables(detail::FieldData& data, const Field& field) {
    const std::size_t q = data.q;
    data.add_table.resize(q * q);
    data.mul_table.resize(q * q);
    data.neg_table.resize(q);
    data.inv_table.assign(q, 0);
    data.trace_table.resize(q);
    for (std::size_t a = 0; a < q; ++a) {
      data.neg_table[a] = static_cast<std::uint16_t>(field.neg_slow(static_cast<ElemIndex>(a)));
      for (std::size_t b = 0; b < q; ++b) {
        data.add_table[a * q + b] =
            static_cast<std::uint16_t>(field.add_slow(static_cast<ElemIndex>(a), static_cast<ElemIndex>(b)));
        if (b >= a) {
          const auto m =
              static_cast<std::uint16_t>(field.mul_slow(static_cast<ElemIndex>(a), static_cast<ElemIndex>(b)));
          data.mul_table[a * q + b] = m;
          data.mul_table[b * q + a] = m;
        }
      }
    }
    for (std::size_t a = 1; a < q; ++a) {
      for (std::size_t b = 1; b < q; ++b) {
        if (data.mul_table[a * q + b] == 1) {
          data.inv_table[a] = static_cast<std::uint16_t>(b);
          break;
        }
      }
    }
    data.tabled = true;
    for (std::size_t a = 0; a < q; ++a) {
      data.trace_table[a] = static_cast<std::uint16_t>(field.trace_slow(static_cast<ElemIndex>(a)));
    }
  }

  std::shared_ptr<const detail::FieldData> data_;
};

/// An element of a particular Field, with value semantics and checked
/// arithmetic (mixing elements of different fields throws MixedFields).
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(Field field, ElemIndex index) : field_(std::move(field)), index_(index) { field_.check_index(index_); }

  const Field& field() const { return field_; }
  ElemIndex index() const { return index_; }
  std::vector<Residue> coeffs() const { return field_.coeffs(index_); }
  bool is_zero() const { return index_ == 0; }
  std::string to_string() const { return field_.element_to_string(index_); }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return {a.field_, a.field_.add(a.index_, b.index_)};
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return {a.field_, a.field_.sub(a.index_, b.index_)};
  }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return {a.field_, a.field_.mul(a.index_, b.index_)};
  }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    if (b.is_zero()) throw Error(ErrorCode::kDivisionByZero, "division by zero");
    return {a.field_, a.field_.mul(a.index_, a.field_.inv(b.index_))};
  }
  FieldElement operator-() const { return {field_, field_.neg(index_)}; }
  FieldElement inv() const {
    if (is_zero()) throw Error(ErrorCode::kDivisionByZero, "inverse of zero");
    return {field_, field_.inv(index_)};
  }
  FieldElement pow(std::uint64_t e) const { return {field_, field_.pow(index_, e)}; }

  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.index_ == b.index_ && a.field_ == b.field_;
  }

 private:
  static void check_same(const FieldElement& a, const FieldElement& b) {
    if (!(a.field_ == b.field_)) {
      throw Error(ErrorCode::kMixedFields, "operands from " + a.field_.to_string() + " and " + b.field_.to_string());
    }
  }

  Field field_;
  ElemIndex index_ = 0;
};

inline FieldElement Field::element(ElemIndex a) const { return {*this, a}; }
inline FieldElement Field::element(std::span<const Residue> c) const { return {*this, index_of(c)}; }
inline FieldElement Field::zero() const { return {*this, 0}; }
inline FieldElement Field::one() const { return {*this, 1}; }
inline FieldElement Field::theta() const { return {*this, theta_index()}; }

enum class ArithOp { kAdd, kSub, kMul, kDiv, kNeg, kInv, kPow };

/// Single dispatch point for the arithmetic operations. Unary ops ignore b;
/// kPow raises a to the exponent given by b's canonical index.
inline FieldElement arith(const FieldElement& a, const FieldElement& b, ArithOp op) {
  switch (op) {
    case ArithOp::kAdd: return a + b;
    case ArithOp::kSub: return a - b;
    case ArithOp::kMul: return a * b;
    case ArithOp::kDiv: return a / b;
    case ArithOp::kNeg: return -a;
    case ArithOp::kInv: return a.inv();
    case ArithOp::kPow: return a.pow(b.index());
  }
  return a;
}

inline FieldElement frobenius(const FieldElement& x, unsigned i) {
  if (i >= x.field().degree()) {
    throw Error(ErrorCode::kDomainError, "frobenius index must be below the degree");
  }
  return {x.field(), x.field().frobenius(x.index(), i)};
}

inline Residue trace_to_prime(const FieldElement& x) { return x.field().trace(x.index()); }

// --- parsing -----------------------------------------------------------------

namespace detail {

inline std::vector<std::uint64_t> parse_bracket_list(std::string_view text) {
  auto strip = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  };
  text = strip(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    throw Error(ErrorCode::kParseError, "expected [c0,c1,...], got '" + std::string(text) + "'");
  }
  text = text.substr(1, text.size() - 2);
  std::vector<std::uint64_t> out;
  if (strip(text).empty()) return out;
  while (true) {
    const auto comma = text.find(',');
    std::string_view tok = strip(text.substr(0, comma));
    if (tok.empty()) throw Error(ErrorCode::kParseError, "empty coefficient");
    std::uint64_t v = 0;
    for (char ch : tok) {
      if (ch < '0' || ch > '9') throw Error(ErrorCode::kParseError, "bad coefficient '" + std::string(tok) + "'");
      v = v * 10 + static_cast<std::uint64_t>(ch - '0');
      if (v > (std::uint64_t{1} << 40U)) throw Error(ErrorCode::kParseError, "coefficient too large");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

}  // namespace detail

inline Field Field::parse(std::string_view text) {
  const auto caret = text.find('^');
  const auto slash = text.find('/');
  if (caret == std::string_view::npos || slash == std::string_view::npos || slash < caret) {
    throw Error(ErrorCode::kParseError, "expected p^n/[c0,...,1], got '" + std::string(text) + "'");
  }
  auto to_u64 = [&](std::string_view s) {
    if (s.empty()) throw Error(ErrorCode::kParseError, "bad field header '" + std::string(text) + "'");
    std::uint64_t v = 0;
    for (char ch : s) {
      if (ch < '0' || ch > '9') throw Error(ErrorCode::kParseError, "bad field header '" + std::string(text) + "'");
      v = v * 10 + static_cast<std::uint64_t>(ch - '0');
      if (v > kMaxFieldOrder) throw Error(ErrorCode::kParseError, "number too large in field header");
    }
    return v;
  };
  const std::uint64_t p = to_u64(text.substr(0, caret));
  const std::uint64_t n = to_u64(text.substr(caret + 1, slash - caret - 1));
  auto coeffs = detail::parse_bracket_list(text.substr(slash + 1));
  std::vector<Residue> modulus;
  for (auto c : coeffs) modulus.push_back(static_cast<Residue>(c));
  if (n == 0 || n > 64) throw Error(ErrorCode::kParseError, "bad degree in field header");
  return Field::create(p, static_cast<unsigned>(n), modulus);
}

inline ElemIndex Field::parse_element(std::string_view text) const {
  auto coeffs = detail::parse_bracket_list(text);
  if (coeffs.size() != data_->n) {
    throw Error(ErrorCode::kInvalidElement, "element '" + std::string(text) + "' has wrong length for " + to_string());
  }
  std::vector<Residue> c;
  for (auto v : coeffs) {
    if (v >= data_->p) throw Error(ErrorCode::kInvalidElement, "coefficient out of range in '" + std::string(text) + "'");
    c.push_back(static_cast<Residue>(v));
  }
  return index_of(c);
}

}  // namespace parafalc

#endif  // PARAFALC_FIELD_HPP
