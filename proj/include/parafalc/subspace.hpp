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

// F_p-linear structure of F_{p^n}: subspaces, subfields, and greedy extension.

#ifndef PARAFALC_SUBSPACE_HPP
#define PARAFALC_SUBSPACE_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "parafalc/field.hpp"

namespace parafalc {

namespace detail {

using Vec = std::vector<std::uint64_t>;

/// Incremental row-echelon basis over F_p. Rows are kept fully reduced with
/// pivots ordered from coordinate 0 upward.
class Echelon {
 public:
  Echelon(std::uint64_t p, std::size_t dim) : p_(p), dim_(dim) {}

  Vec reduce(Vec v) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const std::uint64_t c = v[pivots_[r]];
      if (c == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j) v[j] = (v[j] + (p_ - c) * rows_[r][j]) % p_;
    }
    return v;
  }

  /// Adds v to the span; false when v was already in it.
  bool insert(const Vec& v) {
    Vec w = reduce(v);
    std::size_t pivot = dim_;
    for (std::size_t j = 0; j < dim_; ++j) {
      if (w[j] != 0) {
        pivot = j;
        break;
      }
    }
    if (pivot == dim_) return false;
    const std::uint64_t s = inv_mod(w[pivot], p_);
    for (auto& x : w) x = x * s % p_;
    for (auto& row : rows_) {
      const std::uint64_t c = row[pivot];
      if (c == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j) row[j] = (row[j] + (p_ - c) * w[j]) % p_;
    }
    const auto pos = static_cast<std::ptrdiff_t>(
        std::lower_bound(pivots_.begin(), pivots_.end(), pivot) - pivots_.begin());
    pivots_.insert(pivots_.begin() + pos, pivot);
    rows_.insert(rows_.begin() + pos, std::move(w));
    return true;
  }

  bool contains(const Vec& v) const {
    Vec w = reduce(v);
    for (auto x : w) {
      if (x != 0) return false;
    }
    return true;
  }

  std::size_t rank() const { return rows_.size(); }
  const std::vector<Vec>& rows() const { return rows_; }

 private:
  std::uint64_t p_;
  std::size_t dim_;
  std::vector<Vec> rows_;
  std::vector<std::size_t> pivots_;
};

inline Vec to_vec(const Field& field, ElemIndex a) {
  auto c = field.coeffs(a);
  return Vec(c.begin(), c.end());
}

inline ElemIndex from_vec(const Field& field, const Vec& v) {
  std::vector<Residue> c(v.begin(), v.end());
  return field.index_of(c);
}

/// Null space of an F_p matrix given by its columns, returned in reduced
/// echelon form (pivots from coordinate 0 upward).
inline std::vector<Vec> kernel(const std::vector<Vec>& columns, std::uint64_t p) {
  const std::size_t ncols = columns.size();
  const std::size_t nrows = ncols == 0 ? 0 : columns.front().size();
  std::vector<Vec> m(nrows, Vec(ncols, 0));
  for (std::size_t j = 0; j < ncols; ++j) {
    for (std::size_t i = 0; i < nrows; ++i) m[i][j] = columns[j][i] % p;
  }
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < nrows; ++col) {
    std::size_t sel = row;
    while (sel < nrows && m[sel][col] == 0) ++sel;
    if (sel == nrows) continue;
    std::swap(m[sel], m[row]);
    const std::uint64_t s = inv_mod(m[row][col], p);
    for (auto& x : m[row]) x = x * s % p;
    for (std::size_t i = 0; i < nrows; ++i) {
      if (i == row || m[i][col] == 0) continue;
      const std::uint64_t c = m[i][col];
      for (std::size_t j = 0; j < ncols; ++j) m[i][j] = (m[i][j] + (p - c) * m[row][j]) % p;
    }
    pivot_col.push_back(col);
    ++row;
  }
  std::vector<bool> is_pivot(ncols, false);
  for (auto c : pivot_col) is_pivot[c] = true;
  Echelon basis(p, ncols);
  for (std::size_t f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    Vec v(ncols, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = (p - m[r][f]) % p;
    basis.insert(v);
  }
  return basis.rows();
}

}  // namespace detail

/// An F_p-linear subspace of a field, given by an ordered basis.
class Subspace {
 public:
  Subspace() = default;

  /// Throws DependentBasis if the vectors are not F_p-linearly independent.
  Subspace(Field field, std::vector<ElemIndex> basis) : field_(std::move(field)), basis_(std::move(basis)) {
    detail::Echelon e(field_.characteristic(), field_.degree());
    for (auto b : basis_) {
      field_.check_index(b);
      if (!e.insert(detail::to_vec(field_, b))) {
        throw Error(ErrorCode::kDependentBasis, "basis vectors are F_p-linearly dependent");
      }
    }
  }

  static Subspace zero(const Field& field) { return Subspace(field, {}); }

  const Field& field() const { return field_; }
  const std::vector<ElemIndex>& basis() const { return basis_; }
  unsigned dimension() const { return static_cast<unsigned>(basis_.size()); }
  std::uint64_t size() const { return ipow_u64(field_.characteristic(), dimension()); }

  bool contains(ElemIndex x) const {
    detail::Echelon e(field_.characteristic(), field_.degree());
    for (auto b : basis_) e.insert(detail::to_vec(field_, b));
    return e.contains(detail::to_vec(field_, x));
  }

  /// All p^d combinations Σ a_j b_j, ordered by the combination index
  /// a_0 + a_1 p + ... (a_0 varies fastest).
  std::vector<ElemIndex> enumerate() const {
    std::vector<ElemIndex> out{0};
    out.reserve(size());
    const std::uint64_t p = field_.characteristic();
    for (auto b : basis_) {
      // existing block is the span of earlier vectors; append a * b for a = 1..p-1
      const std::size_t block = out.size();
      ElemIndex multiple = 0;
      for (std::uint64_t a = 1; a < p; ++a) {
        multiple = field_.add(multiple, b);
        for (std::size_t i = 0; i < block; ++i) out.push_back(field_.add(out[i], multiple));
      }
    }
    return out;
  }

  /// Membership bitmap over the canonical element order.
  std::vector<bool> indicator() const {
    std::vector<bool> in(field_.order(), false);
    for (auto x : enumerate()) in[x] = true;
    return in;
  }

 private:
  Field field_;
  std::vector<ElemIndex> basis_;
};

inline std::vector<ElemIndex> subspace_enumerate(const Subspace& s) { return s.enumerate(); }

/// The subfield F_{p^m}, as the kernel of the F_p-linear map x -> x^(p^m) - x.
inline Subspace subfield_elements(const Field& field, unsigned m) {
  const unsigned n = field.degree();
  if (m == 0 || n % m != 0) {
    throw Error(ErrorCode::kNonDivisorDegree, std::to_string(m) + " does not divide " + std::to_string(n));
  }
  std::vector<detail::Vec> columns;
  ElemIndex basis_elem = 1;  // θ^j
  const ElemIndex theta = field.theta_index();
  for (unsigned j = 0; j < n; ++j) {
    if (j > 0) basis_elem = field.mul(basis_elem, theta);
    const ElemIndex image = field.sub(field.frobenius(basis_elem, m), basis_elem);
    columns.push_back(detail::to_vec(field, image));
  }
  std::vector<ElemIndex> basis;
  for (const auto& v : detail::kernel(columns, field.characteristic())) basis.push_back(detail::from_vec(field, v));
  return Subspace(field, std::move(basis));
}

/// A d-dimensional subspace containing inner: inner's basis followed by the
/// first of 1, θ, θ², ... that are independent of the span so far.
inline Subspace subspace_containing(const Subspace& inner, unsigned d) {
  const Field& field = inner.field();
  if (d < inner.dimension() || d > field.degree()) {
    throw Error(ErrorCode::kDimensionOutOfRange, "need " + std::to_string(inner.dimension()) + " <= d <= " +
                                                     std::to_string(field.degree()) + ", got d = " + std::to_string(d));
  }
  detail::Echelon e(field.characteristic(), field.degree());
  std::vector<ElemIndex> basis = inner.basis();
  for (auto b : basis) e.insert(detail::to_vec(field, b));
  for (unsigned j = 0; j < field.degree() && basis.size() < d; ++j) {
    detail::Vec v(field.degree(), 0);
    v[j] = 1;
    if (e.insert(v)) basis.push_back(detail::from_vec(field, v));
  }
  return Subspace(field, std::move(basis));
}

}  // namespace parafalc

#endif  // PARAFALC_SUBSPACE_HPP
