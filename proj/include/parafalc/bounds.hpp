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
 * @file bounds.hpp
 * @brief Closed-form distance-set bounds in exact arithmetic.
 *
 * Every bound is a rational in q, |E|, K_E and the fiber energy. Bounds that
 * involve √(K_E K_F) or √q are never rounded: they expose an `admits`
 * predicate that squares both sides after checking signs, and an exact
 * rational value only when the radicand is a perfect square.
 */

#ifndef PARAFALC_BOUNDS_HPP
#define PARAFALC_BOUNDS_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parafalc/error.hpp"
#include "parafalc/integer.hpp"

namespace parafalc {

enum class BoundDirection { kLower, kUpper };

/// A theoretical bound together with the quantity it constrains.
struct BoundReport {
  std::string name;
  std::vector<std::pair<std::string, BigInt>> inputs;
  BoundDirection direction = BoundDirection::kLower;
  std::optional<Rational> bound;  // absent when only the squared form is exact
  std::optional<BigInt> observed;
  std::optional<bool> satisfied;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorCode::kDomainError, what);
}

inline void require_field_order(const BigInt& q) {
  require(q >= 3 && q <= BigInt(std::numeric_limits<std::uint64_t>::max()) &&
              is_odd_prime_power(q.convert_to<std::uint64_t>()),
          "q = " + q.str() + " is not an odd prime power");
}

inline void require_set_params(const BigInt& q, const BigInt& n, const BigInt& k) {
  require_field_order(q);
  require(n >= 1 && n <= q * q, "need 1 <= n <= q^2, got n = " + n.str());
  require(k >= 1 && k <= n && k <= q, "need 1 <= K <= min(n, q), got K = " + k.str());
}

}  // namespace detail

/// |Δ_P(E)| >= q n² / (n² + q² K).
inline Rational main_lower_bound(const BigInt& q, const BigInt& n, const BigInt& k) {
  detail::require_set_params(q, n, k);
  return Rational(q * n * n, n * n + q * q * k);
}

/// Least m with m^(2 − α) >= q², i.e. ⌈q^(2/(2−α))⌉, for rational 0 <= α < 1.
/// With α = a/b this is the least m with m^(2b − a) >= q^(2b).
inline BigInt corollary_threshold(const BigInt& q, const Rational& alpha) {
  detail::require(alpha >= 0 && alpha < 1, "need 0 <= alpha < 1, got " + to_string(alpha));
  detail::require(q >= 1, "q must be positive");
  const BigInt a = numerator(alpha);
  const BigInt b = denominator(alpha);
  const auto root = (2 * b - a).convert_to<std::uint64_t>();
  return integer_root_ceil(ipow(q, (2 * b).convert_to<std::uint64_t>()), root);
}

/// |Δ_P(E)| >= q n⁴ / (n⁴ + q² E_fib).
inline Rational fiber_energy_lower_bound(const BigInt& q, const BigInt& n, const BigInt& efib) {
  detail::require_field_order(q);
  detail::require(n >= 1, "n must be positive");
  detail::require(efib >= n, "fiber energy " + efib.str() + " is below its diagonal contribution n = " + n.str());
  const BigInt n4 = n * n * n * n;
  return Rational(q * n4, n4 + q * q * efib);
}

/// Σ_t ν(t)² <= n⁴/q + q n² K.
inline Rational second_moment_upper_bound(const BigInt& q, const BigInt& n, const BigInt& k) {
  detail::require_set_params(q, n, k);
  return Rational(n * n * n * n, q) + Rational(q * n * n * k);
}

/// Parameters shared by the two bipartite bounds.
struct BipartiteParams {
  BigInt q;
  BigInt n_e;
  BigInt n_f;
  BigInt k_e;
  BigInt k_f;

  void validate() const {
    detail::require_set_params(q, n_e, k_e);
    detail::require_set_params(q, n_f, k_f);
  }
  BigInt pair_count() const { return n_e * n_f; }
  std::optional<BigInt> sqrt_k() const { return exact_sqrt(k_e * k_f); }
};

/// |Δ_P(E, F)| >= q / (1 + q² √(K_E K_F) / (|E||F|)).
struct BipartiteLowerBound {
  BipartiteParams params;

  /// Exact value when K_E K_F is a perfect square.
  std::optional<Rational> exact() const {
    auto s = params.sqrt_k();
    if (!s) return std::nullopt;
    const BigInt x = params.pair_count();
    const BigInt& q = params.q;
    return Rational(q * x * x, x * x + q * q * x * *s);
  }

  /// True iff delta >= bound, decided as Δq²√(K_E K_F) >= (q − Δ)|E||F|
  /// and squared when the right side is positive.
  bool admits(const BigInt& delta) const {
    const BigInt& q = params.q;
    const BigInt rhs = (q - delta) * params.pair_count();
    if (rhs <= 0) return true;
    const BigInt lhs = delta * q * q;
    return lhs * lhs * params.k_e * params.k_f >= rhs * rhs;
  }
};

inline BipartiteLowerBound bipartite_lower_bound(const BigInt& q, const BigInt& n_e, const BigInt& n_f,
                                                 const BigInt& k_e, const BigInt& k_f) {
  BipartiteParams params{q, n_e, n_f, k_e, k_f};
  params.validate();
  return {params};
}

/// Σ_t ν_{E,F}(t)² <= |E|²|F|²/q + q|E||F|√(K_E K_F).
struct BipartiteSecondMomentBound {
  BipartiteParams params;

  std::optional<Rational> exact() const {
    auto s = params.sqrt_k();
    if (!s) return std::nullopt;
    const BigInt x = params.pair_count();
    return Rational(x * x, params.q) + Rational(params.q * x * *s);
  }

  /// True iff moment <= bound, decided as q·moment − X² <= q² X √(K_E K_F)
  /// with X = |E||F|, squared when the left side is positive.
  bool admits(const BigInt& moment) const {
    const BigInt& q = params.q;
    const BigInt x = params.pair_count();
    const BigInt lhs = q * moment - x * x;
    if (lhs <= 0) return true;
    const BigInt rhs = q * q * x;
    return lhs * lhs <= rhs * rhs * params.k_e * params.k_f;
  }
};

inline BipartiteSecondMomentBound bipartite_second_moment_bound(const BigInt& q, const BigInt& n_e,
                                                                const BigInt& n_f, const BigInt& k_e,
                                                                const BigInt& k_f) {
  BipartiteParams params{q, n_e, n_f, k_e, k_f};
  params.validate();
  return {params};
}

/// |I(P, L) − |P||L|/q| <= √(q |P||L|), checked as (qI − |P||L|)² <= q³|P||L|.
struct VinhBound {
  BigInt q;
  BigInt n_points;
  BigInt n_lines;

  bool admits(const BigInt& incidences) const {
    const BigInt dev = q * incidences - n_points * n_lines;
    return dev * dev <= q * q * q * n_points * n_lines;
  }
};

inline VinhBound vinh_deviation_bound(const BigInt& q, const BigInt& n_points, const BigInt& n_lines) {
  detail::require(n_points >= 0 && n_lines >= 0, "counts must be nonnegative");
  return {q, n_points, n_lines};
}

/// ν(t) >= n²/q − √q n for every t.
struct FullDistanceBound {
  BigInt q;
  BigInt n;

  /// n²/q − √q n > 0, i.e. n² > q³: every distance is then realized.
  bool predicts_all_distances() const { return n * n > q * q * q; }

  /// Exact value when q is a perfect square.
  std::optional<Rational> exact() const {
    auto r = exact_sqrt(q);
    if (!r) return std::nullopt;
    return Rational(n * n, q) - Rational(*r * n);
  }

  /// True iff nu >= n²/q − √q n, decided by squaring √q n >= n²/q − ν when
  /// the right side is positive.
  bool admits(const BigInt& nu) const {
    const Rational gap = Rational(n * n, q) - Rational(nu);
    if (gap <= 0) return true;
    return Rational(q * n * n) >= gap * gap;
  }
};

inline FullDistanceBound nu_lower_bound(const BigInt& q, const BigInt& n) {
  detail::require_field_order(q);
  detail::require(n >= 1, "n must be positive");
  return {q, n};
}

// --- reports -----------------------------------------------------------------

inline BoundReport lower_bound_report(std::string name, std::vector<std::pair<std::string, BigInt>> inputs,
                                      const Rational& bound, std::optional<BigInt> observed) {
  BoundReport r{std::move(name), std::move(inputs), BoundDirection::kLower, bound, observed, std::nullopt};
  if (observed) r.satisfied = Rational(*observed) >= bound;
  return r;
}

inline BoundReport upper_bound_report(std::string name, std::vector<std::pair<std::string, BigInt>> inputs,
                                      const Rational& bound, std::optional<BigInt> observed) {
  BoundReport r{std::move(name), std::move(inputs), BoundDirection::kUpper, bound, observed, std::nullopt};
  if (observed) r.satisfied = Rational(*observed) <= bound;
  return r;
}

/// Distance lower-bound report for a set with |E| = n, K_E = k and |Δ_P(E)| = delta.
inline BoundReport main_bound_report(const BigInt& q, const BigInt& n, const BigInt& k,
                                     std::optional<BigInt> delta) {
  return lower_bound_report("distance_lower_bound", {{"q", q}, {"n", n}, {"K", k}}, main_lower_bound(q, n, k),
                            std::move(delta));
}

inline BoundReport fiber_bound_report(const BigInt& q, const BigInt& n, const BigInt& efib,
                                      std::optional<BigInt> delta) {
  return lower_bound_report("fiber_energy_lower_bound", {{"q", q}, {"n", n}, {"Efib", efib}},
                            fiber_energy_lower_bound(q, n, efib), std::move(delta));
}

inline BoundReport second_moment_report(const BigInt& q, const BigInt& n, const BigInt& k,
                                        std::optional<BigInt> moment) {
  return upper_bound_report("second_moment_upper_bound", {{"q", q}, {"n", n}, {"K", k}},
                            second_moment_upper_bound(q, n, k), std::move(moment));
}

inline BoundReport bipartite_bound_report(const BipartiteLowerBound& b, std::optional<BigInt> delta) {
  const auto& p = b.params;
  BoundReport r{"bipartite_lower_bound",
                {{"q", p.q}, {"nE", p.n_e}, {"nF", p.n_f}, {"KE", p.k_e}, {"KF", p.k_f}},
                BoundDirection::kLower,
                b.exact(),
                delta,
                std::nullopt};
  if (delta) r.satisfied = b.admits(*delta);
  return r;
}

inline BoundReport bipartite_moment_report(const BipartiteSecondMomentBound& b, std::optional<BigInt> moment) {
  const auto& p = b.params;
  BoundReport r{"bipartite_second_moment_bound",
                {{"q", p.q}, {"nE", p.n_e}, {"nF", p.n_f}, {"KE", p.k_e}, {"KF", p.k_f}},
                BoundDirection::kUpper,
                b.exact(),
                moment,
                std::nullopt};
  if (moment) r.satisfied = b.admits(*moment);
  return r;
}

}  // namespace parafalc

#endif  // PARAFALC_BOUNDS_HPP
