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
 * @file constructions.hpp
 * @brief Extremal point sets with small parabolic distance sets, and seeded
 *        random sets for soundness sweeps.
 *
 * Grid sets A × B = {0..M−1} × {0..N−1} ⊂ F_p² have
 * Δ_P = (B − B) + {0², ..., (M−1)²}, an integer interval of length
 * (M−1)² + 2N − 1 as long as consecutive translates overlap (N >= M) and the
 * interval does not wrap modulo p (M² + 2N < p). Those two conditions form
 * the applicability flag; the formula is only asserted when it holds.
 *
 * Subspace sets H × V and U × V over F_{p^{km}} trap every distance in the
 * F_p-subspace V because H is a subfield contained in V.
 */

#ifndef PARAFALC_CONSTRUCTIONS_HPP
#define PARAFALC_CONSTRUCTIONS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "parafalc/field.hpp"
#include "parafalc/geometry.hpp"
#include "parafalc/integer.hpp"
#include "parafalc/rng.hpp"
#include "parafalc/subspace.hpp"

namespace parafalc {

struct Predictions {
  BigInt size;
  BigInt max_fiber;
  std::optional<BigInt> delta_size;   // exact |Δ_P(E)|
  std::optional<BigInt> delta_upper;  // |Δ_P(E)| <= delta_upper
  std::optional<Subspace> container;  // Δ_P(E) ⊆ container
  bool container_is_exact = false;    // Δ_P(E) = container
  /// |E| = q √K_E / q^ε, as |E|^(2b) q^(2a) = q^(2b) K^b for ε = a/b.
  std::optional<std::pair<BigInt, BigInt>> relation;
  bool relation_is_exact = false;  // otherwise reported only
  /// |E| / p^(3/2 − ε) for the grid; the implied constants are unspecified, so this is reported only.
  std::optional<double> size_ratio;
  std::vector<std::pair<std::string, BigInt>> parameters;  // M, N, dimensions, ...
};

struct ConstructionResult {
  std::string name;
  PointSet set;
  Predictions predicted;
  bool applicable = false;
  std::string reason;
};

namespace detail {

inline void require_odd_prime(std::uint64_t p) {
  if (!is_prime(p)) throw Error(ErrorCode::kNotPrime, std::to_string(p) + " is not prime");
  if (p == 2) throw Error(ErrorCode::kEvenCharacteristic, "p must be odd");
}

inline void require_open_unit(const Rational& eps) {
  if (eps <= 0 || eps >= 1) throw Error(ErrorCode::kDomainError, "eps must lie in (0, 1), got " + to_string(eps));
}

inline std::optional<unsigned> as_small_integer(const Rational& r) {
  if (denominator(r) != 1 || r < 0 || r > 64) return std::nullopt;
  return numerator(r).convert_to<unsigned>();
}

/// (|E|^(2b) q^(2a), q^(2b) K^b) for ε = a/b.
inline std::pair<BigInt, BigInt> size_relation(const BigInt& size, const BigInt& q, const BigInt& k,
                                               const Rational& eps) {
  const auto a = numerator(eps).convert_to<std::uint64_t>();
  const auto b = denominator(eps).convert_to<std::uint64_t>();
  return {ipow(size, 2 * b) * ipow(q, 2 * a), ipow(q, 2 * b) * ipow(k, b)};
}

inline ConstructionResult grid_set(std::string name, std::uint64_t p, const BigInt& m_big, const BigInt& n_big) {
  Field field = Field::create(p, 1);
  const auto m = m_big.convert_to<std::uint64_t>();
  const auto n = n_big.convert_to<std::uint64_t>();
  std::vector<Point> pts;
  pts.reserve(m * n);
  for (std::uint64_t a = 0; a < m; ++a) {
    for (std::uint64_t b = 0; b < n; ++b) pts.push_back({field.from_residue(a), field.from_residue(b)});
  }
  ConstructionResult out;
  out.name = std::move(name);
  out.set = PointSet(field, std::move(pts));
  out.predicted.size = m_big * n_big;
  out.predicted.max_fiber = n_big;
  const BigInt delta = (m_big - 1) * (m_big - 1) + 2 * n_big - 1;
  out.predicted.delta_size = delta;
  out.predicted.parameters = {{"M", m_big}, {"N", n_big}};
  const bool overlap = n_big >= m_big;
  const bool no_wrap = m_big * m_big + 2 * n_big < p;
  out.applicable = overlap && no_wrap;
  if (out.applicable) {
    out.reason = "N >= M and M^2 + 2N < p";
  } else if (!overlap) {
    out.reason = "N < M: consecutive translates of B - B need not overlap";
  } else {
    out.reason = "M^2 + 2N >= p: the distance interval may wrap modulo p";
  }
  return out;
}

}  // namespace detail

/// A × B with M = ⌊p^((1−ε)/2)⌋, N = ⌊p^(1−ε/2)⌋.
inline ConstructionResult grid_construction(std::uint64_t p, const Rational& eps) {
  detail::require_odd_prime(p);
  detail::require_open_unit(eps);
  const BigInt m = floor_rational_power(p, (1 - eps) / 2);
  const BigInt n = floor_rational_power(p, 1 - eps / 2);
  auto out = detail::grid_set("grid", p, m, n);
  const double exponent = 1.5 - static_cast<double>(eps);
  out.predicted.size_ratio = static_cast<double>(m * n) / std::pow(static_cast<double>(p), exponent);
  return out;
}

/// A × B with M = ⌊p^((1−ε)/2)⌋, N = ⌊p^(1−ε)⌋, so K_E = N ~ p^(1−ε).
inline ConstructionResult sharpness_grid(std::uint64_t p, const Rational& eps) {
  detail::require_odd_prime(p);
  detail::require_open_unit(eps);
  const BigInt m = floor_rational_power(p, (1 - eps) / 2);
  const BigInt n = floor_rational_power(p, 1 - eps);
  auto out = detail::grid_set("sharpness-grid", p, m, n);
  out.predicted.relation = detail::size_relation(out.predicted.size, p, out.predicted.max_fiber, eps);
  return out;
}

/// H × V over F_{p^(2m)}, H = F_{p^m}, V ⊇ H of dimension (1−ε)2m.
inline ConstructionResult subspace_construction(std::uint64_t p, unsigned m, const Rational& eps) {
  detail::require_odd_prime(p);
  if (m < 1) throw Error(ErrorCode::kDomainError, "m must be positive");
  if (eps < 0 || eps >= 1) throw Error(ErrorCode::kDomainError, "eps must lie in [0, 1), got " + to_string(eps));
  const Rational dim_v = (1 - eps) * 2 * m;
  auto dv = detail::as_small_integer(dim_v);
  if (!dv) throw Error(ErrorCode::kDomainError, "(1 - eps) 2m = " + to_string(dim_v) + " is not an integer");
  if (*dv < m) throw Error(ErrorCode::kDomainError, "(1 - eps) 2m = " + std::to_string(*dv) + " is below m");

  Field field = Field::create(p, 2 * m);
  Subspace h = subfield_elements(field, m);
  Subspace v = subspace_containing(h, *dv);
  const auto h_elems = h.enumerate();
  const auto v_elems = v.enumerate();
  std::vector<Point> pts;
  pts.reserve(h_elems.size() * v_elems.size());
  for (auto x : h_elems) {
    for (auto y : v_elems) pts.push_back({x, y});
  }
  ConstructionResult out;
  out.name = "subspace";
  out.set = PointSet(field, std::move(pts));
  out.predicted.size = ipow(BigInt(p), m + *dv);
  out.predicted.max_fiber = ipow(BigInt(p), *dv);
  out.predicted.delta_upper = ipow(BigInt(p), *dv);
  out.predicted.container = v;
  out.predicted.parameters = {{"q", BigInt(field.order())}, {"dim_H", BigInt(m)}, {"dim_V", BigInt(*dv)}};
  out.applicable = true;
  out.reason = "dim V = (1 - eps) 2m is an integer >= m";
  return out;
}

/// U × V over F_{p^(km)}: H = F_{p^m}, V ⊇ H of dimension (1−ε)km, U ⊆ H
/// spanned by the first (1−ε)km/2 basis vectors of H.
inline ConstructionResult sharpness_subspace(std::uint64_t p, unsigned k, unsigned m, const Rational& eps) {
  detail::require_odd_prime(p);
  detail::require_open_unit(eps);
  if (k < 2) throw Error(ErrorCode::kDomainError, "k must be at least 2");
  if (m < 1) throw Error(ErrorCode::kDomainError, "m must be positive");
  const Rational spread = (1 - eps) * k;
  if (spread < 1 || spread > 2) {
    throw Error(ErrorCode::kDomainError, "need 1/(1 - eps) <= k <= 2/(1 - eps), got k(1 - eps) = " + to_string(spread));
  }
  const Rational dim_u = spread * m / 2;
  auto du = detail::as_small_integer(dim_u);
  if (!du || *du == 0) {
    throw Error(ErrorCode::kDomainError, "(1 - eps) km / 2 = " + to_string(dim_u) + " is not a positive integer");
  }
  const unsigned dv = 2 * *du;

  Field field = Field::create(p, k * m);
  Subspace h = subfield_elements(field, m);
  Subspace v = subspace_containing(h, dv);
  Subspace u(field, std::vector<ElemIndex>(h.basis().begin(), h.basis().begin() + *du));
  const auto u_elems = u.enumerate();
  const auto v_elems = v.enumerate();
  std::vector<Point> pts;
  pts.reserve(u_elems.size() * v_elems.size());
  for (auto x : u_elems) {
    for (auto y : v_elems) pts.push_back({x, y});
  }
  ConstructionResult out;
  out.name = "sharpness-subspace";
  out.set = PointSet(field, std::move(pts));
  out.predicted.size = ipow(BigInt(p), *du + dv);
  out.predicted.max_fiber = ipow(BigInt(p), dv);
  out.predicted.delta_size = ipow(BigInt(p), dv);
  out.predicted.container = v;
  out.predicted.container_is_exact = true;
  out.predicted.relation_is_exact = true;
  out.predicted.relation =
      detail::size_relation(out.predicted.size, BigInt(field.order()), out.predicted.max_fiber, eps);
  out.predicted.parameters = {
      {"q", BigInt(field.order())}, {"dim_H", BigInt(m)}, {"dim_U", BigInt(*du)}, {"dim_V", BigInt(dv)}};
  out.applicable = true;
  out.reason = "1 <= k(1 - eps) <= 2 and (1 - eps) km / 2 is a positive integer";
  return out;
}

// --- random sets ---------------------------------------------------------------

namespace detail {

/// Fisher–Yates over [0, count) that only materializes swapped slots.
class LazyShuffle {
 public:
  LazyShuffle(std::uint64_t count, Rng& rng) : count_(count), rng_(rng) {}

  std::uint64_t next() {
    const std::uint64_t j = drawn_ + rng_.below(count_ - drawn_);
    const std::uint64_t vj = at(j);
    slots_[j] = at(drawn_);
    ++drawn_;
    return vj;
  }

 private:
  std::uint64_t at(std::uint64_t i) const {
    auto it = slots_.find(i);
    return it == slots_.end() ? i : it->second;
  }

  std::uint64_t count_;
  std::uint64_t drawn_ = 0;
  Rng& rng_;
  std::unordered_map<std::uint64_t, std::uint64_t> slots_;
};

}  // namespace detail

/// Uniform n-subset of F_q²: the first n draws of a Fisher–Yates shuffle of
/// the point indices x1·q + x2, driven by Rng(seed).
inline PointSet random_set(const Field& field, std::uint64_t n, std::uint64_t seed) {
  const std::uint64_t q = field.order();
  if (n < 1 || n > q * q) {
    throw Error(ErrorCode::kDomainError, "need 1 <= n <= q^2, got n = " + std::to_string(n));
  }
  Rng rng(seed);
  detail::LazyShuffle shuffle(q * q, rng);
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t c = shuffle.next();
    pts.push_back({static_cast<ElemIndex>(c / q), static_cast<ElemIndex>(c % q)});
  }
  return PointSet(field, std::move(pts));
}

/// Random n-set with every fiber of size <= k and one fiber of size exactly
/// k. A uniformly chosen column u0 receives a random k-subset; the remaining
/// n − k points are the first cells of a shuffled walk over the other
/// columns whose column still has room.
inline PointSet random_set_with_fiber_cap(const Field& field, std::uint64_t n, std::uint64_t k, std::uint64_t seed) {
  const std::uint64_t q = field.order();
  if (k < 1 || k > q || n < k || n > k * q) {
    throw Error(ErrorCode::kInfeasibleParameters, "need 1 <= K <= q and K <= n <= K q, got n = " +
                                                      std::to_string(n) + ", K = " + std::to_string(k));
  }
  Rng rng(seed);
  const std::uint64_t u0 = rng.below(q);
  std::vector<Point> pts;
  pts.reserve(n);
  {
    detail::LazyShuffle column(q, rng);
    for (std::uint64_t i = 0; i < k; ++i) {
      pts.push_back({static_cast<ElemIndex>(u0), static_cast<ElemIndex>(column.next())});
    }
  }
  std::unordered_map<std::uint64_t, std::uint64_t> used;
  detail::LazyShuffle rest(q * (q - 1), rng);
  while (pts.size() < n) {
    const std::uint64_t c = rest.next();
    std::uint64_t col = c / q;
    if (col >= u0) ++col;
    auto& cnt = used[col];
    if (cnt >= k) continue;
    ++cnt;
    pts.push_back({static_cast<ElemIndex>(col), static_cast<ElemIndex>(c % q)});
  }
  return PointSet(field, std::move(pts));
}

// --- verification --------------------------------------------------------------

struct ConstructionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConstructionVerification {
  std::uint64_t size = 0;
  std::uint64_t max_fiber = 0;
  std::uint64_t delta_size = 0;
  std::vector<ConstructionCheck> checks;

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

/// Exhaustively recomputes Δ_P(E) and compares it with every prediction that
/// the applicability flag allows.
inline ConstructionVerification verify_construction(const ConstructionResult& r, unsigned jobs = 1) {
  ConstructionVerification v;
  const auto profile = distance_profile(r.set, jobs);
  v.size = r.set.size();
  v.max_fiber = r.set.max_fiber();
  v.delta_size = profile.support_size();
  auto add = [&](std::string name, bool ok, std::string detail) {
    v.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  const auto& pr = r.predicted;
  add("size", BigInt(v.size) == pr.size, std::to_string(v.size) + " vs " + pr.size.str());
  add("max_fiber", BigInt(v.max_fiber) == pr.max_fiber, std::to_string(v.max_fiber) + " vs " + pr.max_fiber.str());
  add("first_moment", profile.first_moment() == v.size * v.size, "sum of nu equals |E|^2");
  if (!r.applicable) return v;
  if (pr.delta_size) {
    add("delta_size", BigInt(v.delta_size) == *pr.delta_size,
        std::to_string(v.delta_size) + " vs " + pr.delta_size->str());
  }
  if (pr.delta_upper) {
    add("delta_upper", BigInt(v.delta_size) <= *pr.delta_upper,
        std::to_string(v.delta_size) + " <= " + pr.delta_upper->str());
  }
  if (pr.container) {
    const auto inside = pr.container->indicator();
    std::size_t outside = 0;
    for (auto t : profile.support()) {
      if (!inside[t]) ++outside;
    }
    add("delta_within_subspace", outside == 0, std::to_string(outside) + " distances outside V");
    if (pr.container_is_exact) {
      add("delta_equals_subspace", outside == 0 && v.delta_size == pr.container->size(),
          std::to_string(v.delta_size) + " vs |V| = " + std::to_string(pr.container->size()));
    }
  }
  if (pr.relation && pr.relation_is_exact) {
    add("size_relation", pr.relation->first == pr.relation->second,
        pr.relation->first.str() + " vs " + pr.relation->second.str());
  }
  return v;
}

}  // namespace parafalc

#endif  // PARAFALC_CONSTRUCTIONS_HPP
