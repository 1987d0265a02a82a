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
 * @file fourier.hpp
 * @brief Additive characters on F_q and the character sums behind the
 *        second-moment estimate.
 *
 * χ(x) = exp(2πi Tr(x) / p). For sheared sets A, B the sum
 *
 *     S(s) = Σ_{a∈A, b∈B} χ(s(a₂ − b₂ − 2a₁b₁))
 *
 * is evaluated twice: directly from the counts of the bilinear form, and
 * through f_s(x) = Σ_{u∈A_x} χ(su), g_s(y) = Σ_{v∈B_y} χ(−sv) as
 * S(s) = Σ_x f_s(x) ĝ_s(−2sx). All loops run in a fixed order, so results are
 * bit-reproducible on one platform.
 */

#ifndef PARAFALC_FOURIER_HPP
#define PARAFALC_FOURIER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "parafalc/energy.hpp"
#include "parafalc/field.hpp"
#include "parafalc/geometry.hpp"

namespace parafalc {

using ComplexValue = std::complex<double>;

inline constexpr double kUnitTolerance = 1e-9;
inline constexpr double kAggregateTolerance = 1e-6;

/// The canonical additive character of a field, with the p roots of unity
/// tabulated once.
class Character {
 public:
  explicit Character(Field field) : field_(std::move(field)) {
    const std::uint64_t p = field_.characteristic();
    roots_.reserve(p);
    for (std::uint64_t k = 0; k < p; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p);
      roots_.emplace_back(std::cos(angle), std::sin(angle));
    }
  }

  const Field& field() const { return field_; }
  ComplexValue operator()(ElemIndex x) const { return roots_[field_.trace(x)]; }
  ComplexValue operator()(const FieldElement& x) const {
    require_same_field(field_, x.field());
    return (*this)(x.index());
  }

 private:
  Field field_;
  std::vector<ComplexValue> roots_;
};

inline ComplexValue character(const FieldElement& x) { return Character(x.field())(x); }

/// ĥ(ξ) = Σ_y h(y) χ(ξy); h is dense over the canonical element order.
inline std::vector<ComplexValue> fourier_transform(const Character& chi, std::span<const ComplexValue> h) {
  const Field& f = chi.field();
  const std::size_t q = f.order();
  if (h.size() != q) throw Error(ErrorCode::kDomainError, "function must be given on all of F_q");
  std::vector<ComplexValue> out(q);
  for (std::size_t xi = 0; xi < q; ++xi) {
    ComplexValue acc = 0;
    for (std::size_t y = 0; y < q; ++y) {
      acc += h[y] * chi(f.mul(static_cast<ElemIndex>(xi), static_cast<ElemIndex>(y)));
    }
    out[xi] = acc;
  }
  return out;
}

/// max_α |Σ_t χ(αt) − q[α = 0]|.
inline double orthogonality_deviation(const Character& chi) {
  const Field& f = chi.field();
  const std::size_t q = f.order();
  double worst = 0;
  for (std::size_t alpha = 0; alpha < q; ++alpha) {
    ComplexValue acc = 0;
    for (std::size_t t = 0; t < q; ++t) acc += chi(f.mul(static_cast<ElemIndex>(alpha), static_cast<ElemIndex>(t)));
    const double expected = alpha == 0 ? static_cast<double>(q) : 0.0;
    worst = std::max(worst, std::abs(acc - expected));
  }
  return worst;
}

/// |Σ_ξ |ĥ(ξ)|² − q Σ_y |h(y)|²| / (q Σ_y |h(y)|²); 0 for h ≡ 0.
inline double plancherel_relative_error(const Character& chi, std::span<const ComplexValue> h) {
  const auto hat = fourier_transform(chi, h);
  double lhs = 0;
  double mass = 0;
  for (const auto& v : hat) lhs += std::norm(v);
  for (const auto& v : h) mass += std::norm(v);
  const double rhs = static_cast<double>(chi.field().order()) * mass;
  if (rhs == 0) return lhs == 0 ? 0.0 : 1.0;
  return std::abs(lhs - rhs) / rhs;
}

struct SpectralReport {
  Field field;
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  std::vector<ComplexValue> s_direct;    // S(s), indexed by s
  std::vector<ComplexValue> s_factored;  // Σ_x f_s(x) ĝ_s(−2sx)
  std::vector<double> u;                 // U_s = Σ_x |f_s(x)|²
  std::vector<double> v;                 // V_s = Σ_y |g_s(y)|²
  double sum_s2_nonzero = 0;             // Σ_{s≠0} |S(s)|²
  double sum_u2 = 0;                     // Σ_s U_s²
  double sum_v2 = 0;                     // Σ_s V_s²
  /// max_{s≠0} |S_direct − S_factored| / (|A||B|).
  double factorization_deviation = 0;
};

/// Character-sum tables for A and B, normally A = shear_A(E), B = shear_B(F).
inline SpectralReport spectral_report(const PointSet& a, const PointSet& b) {
  require_same_field(a.field(), b.field());
  const Field& f = a.field();
  const std::size_t q = f.order();
  const Character chi(f);
  const auto counts = bilinear_form_counts(a, b);
  const auto afib = a.fibers();
  const auto bfib = b.fibers();
  const ElemIndex two = f.from_residue(2);

  SpectralReport rep;
  rep.field = f;
  rep.size_a = a.size();
  rep.size_b = b.size();
  rep.s_direct.resize(q);
  rep.s_factored.resize(q);
  rep.u.resize(q);
  rep.v.resize(q);
  const double scale = std::max<double>(1.0, static_cast<double>(a.size()) * static_cast<double>(b.size()));

  std::vector<ComplexValue> fs(afib.size());
  std::vector<ComplexValue> gs(bfib.size());
  for (std::size_t si = 0; si < q; ++si) {
    const auto s = static_cast<ElemIndex>(si);
    const ElemIndex neg_s = f.neg(s);

    ComplexValue direct = 0;
    for (std::size_t w = 0; w < q; ++w) {
      if (counts[w] != 0) direct += static_cast<double>(counts[w]) * chi(f.mul(s, static_cast<ElemIndex>(w)));
    }

    double u_s = 0;
    for (std::size_t i = 0; i < afib.size(); ++i) {
      ComplexValue acc = 0;
      for (auto y : afib[i].ys) acc += chi(f.mul(s, y));
      fs[i] = acc;
      u_s += std::norm(acc);
    }
    double v_s = 0;
    for (std::size_t j = 0; j < bfib.size(); ++j) {
      ComplexValue acc = 0;
      for (auto y : bfib[j].ys) acc += chi(f.mul(neg_s, y));
      gs[j] = acc;
      v_s += std::norm(acc);
    }

    // ĝ_s(ξ) = Σ_y g_s(y) χ(ξy), needed at ξ = −2sx for each fiber x of A
    ComplexValue factored = 0;
    const ElemIndex minus_two_s = f.neg(f.mul(two, s));
    for (std::size_t i = 0; i < afib.size(); ++i) {
      const ElemIndex xi = f.mul(minus_two_s, afib[i].u);
      ComplexValue ghat = 0;
      for (std::size_t j = 0; j < bfib.size(); ++j) ghat += gs[j] * chi(f.mul(xi, bfib[j].u));
      factored += fs[i] * ghat;
    }

    rep.s_direct[si] = direct;
    rep.s_factored[si] = factored;
    rep.u[si] = u_s;
    rep.v[si] = v_s;
    rep.sum_u2 += u_s * u_s;
    rep.sum_v2 += v_s * v_s;
    if (si != 0) {
      rep.sum_s2_nonzero += std::norm(direct);
      rep.factorization_deviation = std::max(rep.factorization_deviation, std::abs(direct - factored) / scale);
    }
  }
  return rep;
}

/// Σ_t ν_{E,F}(t)² against |E|²|F|²/q + (1/q) Σ_{s≠0} |S(s)|².
struct SecondMomentIdentity {
  BigInt observed;      // exact Σ ν², from the original coordinates
  double predicted = 0;  // right-hand side, from the sheared character sums
  double relative_error = 0;
  bool passed = false;
};

inline SecondMomentIdentity second_moment_identity_check(const PointSet& e, const PointSet& f, unsigned jobs = 1) {
  const auto nu = bipartite_profile(e, f, jobs);
  const auto rep = spectral_report(shear_A(e), shear_B(f));
  const double q = static_cast<double>(e.field().order());
  const double nn = static_cast<double>(e.size()) * static_cast<double>(f.size());
  SecondMomentIdentity out;
  out.observed = nu.second_moment();
  out.predicted = nn * nn / q + rep.sum_s2_nonzero / q;
  const double lhs = out.observed.convert_to<double>();
  out.relative_error = std::abs(lhs - out.predicted) / lhs;
  out.passed = out.relative_error <= kAggregateTolerance;
  return out;
}

/// The chain of inequalities bounding Σ_{s≠0} |S(s)|².
struct SpectralAudit {
  SpectralReport spectral;
  std::uint64_t fiber_energy_a = 0;  // exact, from the energy module
  std::uint64_t fiber_energy_b = 0;
  /// (i) max_{s≠0} (|S(s)|² − q U_s V_s), normalized by max(q U_s V_s, 1)
  double pointwise_excess = 0;
  std::size_t worst_s = 1;  // frequency attaining pointwise_excess
  /// (ii) Σ_{s≠0}|S|² − q (ΣU²)^{1/2} (ΣV²)^{1/2}, normalized likewise
  double cauchy_schwarz_excess = 0;
  /// (iii) |ΣU² − q E_fib(A)| / (q E_fib(A)), and the same for V and B
  double energy_identity_error_u = 0;
  double energy_identity_error_v = 0;
  /// (iv) ΣU² ≤ q K_E |E|² and ΣV² ≤ q K_F |F|²
  bool energy_bound_u = false;
  bool energy_bound_v = false;

  bool pointwise_ok() const { return pointwise_excess <= kAggregateTolerance; }
  bool cauchy_schwarz_ok() const { return cauchy_schwarz_excess <= kAggregateTolerance; }
  bool energy_identity_ok() const {
    return energy_identity_error_u <= kAggregateTolerance && energy_identity_error_v <= kAggregateTolerance;
  }
  bool passed() const {
    return pointwise_ok() && cauchy_schwarz_ok() && energy_identity_ok() && energy_bound_u && energy_bound_v;
  }
};

inline SpectralAudit spectral_inequality_audit(const PointSet& e, const PointSet& f) {
  require_nonempty(e, "spectral_inequality_audit");
  require_nonempty(f, "spectral_inequality_audit");
  require_same_field(e.field(), f.field());
  const PointSet a = shear_A(e);
  const PointSet b = shear_B(f);
  SpectralAudit out;
  out.spectral = spectral_report(a, b);
  const auto& rep = out.spectral;
  const double q = static_cast<double>(e.field().order());

  for (std::size_t s = 1; s < rep.s_direct.size(); ++s) {
    const double rhs = q * rep.u[s] * rep.v[s];
    const double excess = (std::norm(rep.s_direct[s]) - rhs) / std::max(rhs, 1.0);
    if (s == 1 || excess > out.pointwise_excess) {
      out.pointwise_excess = excess;
      out.worst_s = s;
    }
  }
  const double cs_rhs = q * std::sqrt(rep.sum_u2) * std::sqrt(rep.sum_v2);
  out.cauchy_schwarz_excess = (rep.sum_s2_nonzero - cs_rhs) / std::max(cs_rhs, 1.0);

  out.fiber_energy_a = fiber_energy(a);
  out.fiber_energy_b = fiber_energy(b);
  const double target_u = q * static_cast<double>(out.fiber_energy_a);
  const double target_v = q * static_cast<double>(out.fiber_energy_b);
  out.energy_identity_error_u = std::abs(rep.sum_u2 - target_u) / target_u;
  out.energy_identity_error_v = std::abs(rep.sum_v2 - target_v) / target_v;

  const double ne = static_cast<double>(e.size());
  const double nf = static_cast<double>(f.size());
  const double bound_u = q * static_cast<double>(e.max_fiber()) * ne * ne;
  const double bound_v = q * static_cast<double>(f.max_fiber()) * nf * nf;
  out.energy_bound_u = rep.sum_u2 <= bound_u * (1 + kAggregateTolerance);
  out.energy_bound_v = rep.sum_v2 <= bound_v * (1 + kAggregateTolerance);
  return out;
}

}  // namespace parafalc

#endif  // PARAFALC_FOURIER_HPP
