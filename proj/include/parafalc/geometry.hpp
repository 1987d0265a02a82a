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
 * @file geometry.hpp
 * @brief Point sets in F_q², the parabolic distance and its counting function.
 *
 * The parabolic distance is ‖x − y‖ = (x₂ − y₂) + (x₁ − y₁)². It is not
 * symmetric. ν(t) counts ordered pairs (x, y) with ‖x − y‖ = t, including the
 * diagonal x = y, so ν(0) >= |E|.
 */

#ifndef PARAFALC_GEOMETRY_HPP
#define PARAFALC_GEOMETRY_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parafalc/field.hpp"
#include "parafalc/integer.hpp"
#include "parafalc/parallel.hpp"

namespace parafalc {

struct Point {
  ElemIndex x1 = 0;
  ElemIndex x2 = 0;

  friend auto operator<=>(const Point&, const Point&) = default;
};

/// A finite subset of F_q², stored sorted by (x1, x2) so that every vertical
/// fiber {u} × E_u is a contiguous run.
class PointSet {
 public:
  struct Fiber {
    ElemIndex u;
    std::span<const ElemIndex> ys;
  };

  PointSet() = default;

  /// Throws DuplicatePoint on repeated points and InvalidElement on
  /// coordinates outside the field.
  PointSet(Field field, std::vector<Point> points) : field_(std::move(field)) {
    for (const auto& pt : points) {
      field_.check_index(pt.x1);
      field_.check_index(pt.x2);
    }
    std::sort(points.begin(), points.end());
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (points[i] == points[i - 1]) {
        throw Error(ErrorCode::kDuplicatePoint, "(" + field_.element_to_string(points[i].x1) + "," +
                                                    field_.element_to_string(points[i].x2) + ") appears twice");
      }
    }
    points_ = std::move(points);
    ys_.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      ys_.push_back(points_[i].x2);
      if (i == 0 || points_[i].x1 != points_[i - 1].x1) runs_.push_back({points_[i].x1, i, i});
      runs_.back().end = i + 1;
    }
  }

  const Field& field() const { return field_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::span<const Point> points() const { return points_; }

  std::size_t fiber_count() const { return runs_.size(); }

  /// Nonempty fibers in increasing u.
  std::vector<Fiber> fibers() const {
    std::vector<Fiber> out;
    out.reserve(runs_.size());
    for (const auto& r : runs_) out.push_back(fiber_at(r));
    return out;
  }

  /// E_u; empty when no point lies above u.
  std::span<const ElemIndex> fiber(ElemIndex u) const {
    auto it = std::lower_bound(runs_.begin(), runs_.end(), u, [](const Run& r, ElemIndex v) { return r.u < v; });
    if (it == runs_.end() || it->u != u) return {};
    return fiber_at(*it).ys;
  }

  bool contains(Point pt) const { return std::binary_search(points_.begin(), points_.end(), pt); }

  std::size_t max_fiber() const {
    std::size_t k = 0;
    for (const auto& r : runs_) k = std::max(k, r.end - r.begin);
    return k;
  }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.field_ == b.field_ && a.points_ == b.points_;
  }

 private:
  struct Run {
    ElemIndex u;
    std::size_t begin;
    std::size_t end;
  };

  Fiber fiber_at(const Run& r) const {
    return {r.u, std::span<const ElemIndex>(ys_).subspan(r.begin, r.end - r.begin)};
  }

  Field field_;
  std::vector<Point> points_;
  std::vector<ElemIndex> ys_;
  std::vector<Run> runs_;
};

inline void require_nonempty(const PointSet& e, const char* what) {
  if (e.empty()) throw Error(ErrorCode::kEmptySet, std::string(what) + " needs a nonempty point set");
}

inline void require_same_field(const Field& a, const Field& b) {
  if (!(a == b)) throw Error(ErrorCode::kMixedFields, a.to_string() + " vs " + b.to_string());
}

/// (x₂ − y₂) + (x₁ − y₁)² on canonical indices.
inline ElemIndex parabolic_distance(const Field& f, Point x, Point y) {
  return f.add(f.sub(x.x2, y.x2), f.square(f.sub(x.x1, y.x1)));
}

inline FieldElement parabolic_distance(const FieldElement& x1, const FieldElement& x2, const FieldElement& y1,
                                       const FieldElement& y2) {
  const FieldElement d = x1 - y1;
  return (x2 - y2) + d * d;
}

/// Dense counting function t ↦ ν(t) over the canonical element order.
struct DistanceProfile {
  Field field;
  std::vector<std::uint64_t> nu;

  std::vector<ElemIndex> support() const {
    std::vector<ElemIndex> out;
    for (std::size_t t = 0; t < nu.size(); ++t) {
      if (nu[t] != 0) out.push_back(static_cast<ElemIndex>(t));
    }
    return out;
  }
  std::size_t support_size() const {
    return static_cast<std::size_t>(std::count_if(nu.begin(), nu.end(), [](auto v) { return v != 0; }));
  }
  std::uint64_t first_moment() const {
    std::uint64_t s = 0;
    for (auto v : nu) s += v;
    return s;
  }
  BigInt second_moment() const {
    BigInt s = 0;
    for (auto v : nu) s += BigInt(v) * v;
    return s;
  }
};

namespace detail {

// Pairs fibers of E against fibers of F. The x₁-dependence enters only
// through (u − u')², computed once per fiber pair.
inline std::vector<std::uint64_t> accumulate_profile(const PointSet& e, const PointSet& f, unsigned jobs) {
  const Field& field = e.field();
  const std::size_t q = field.order();
  const auto ef = e.fibers();
  const auto ff = f.fibers();
  std::vector<std::vector<ElemIndex>> neg_ff;
  neg_ff.reserve(ff.size());
  for (const auto& fib : ff) {
    std::vector<ElemIndex> neg;
    neg.reserve(fib.ys.size());
    for (auto y : fib.ys) neg.push_back(field.neg(y));
    neg_ff.push_back(std::move(neg));
  }

  std::vector<std::vector<std::uint64_t>> partial(std::max(jobs, 1U));
  parallel_slices(ef.size(), jobs, [&](std::size_t begin, std::size_t end, unsigned w) {
    auto& nu = partial[w];
    nu.assign(q, 0);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& a = ef[i];
      for (std::size_t j = 0; j < ff.size(); ++j) {
        const ElemIndex shift = field.square(field.sub(a.u, ff[j].u));
        for (auto y : a.ys) {
          const ElemIndex base = field.add(y, shift);
          for (auto ny : neg_ff[j]) ++nu[field.add(base, ny)];
        }
      }
    }
  });
  std::vector<std::uint64_t> nu(q, 0);
  for (const auto& part : partial) {
    for (std::size_t t = 0; t < part.size(); ++t) nu[t] += part[t];
  }
  return nu;
}

}  // namespace detail

/// ν over ordered pairs of E (diagonal included).
inline DistanceProfile distance_profile(const PointSet& e, unsigned jobs = 1) {
  require_nonempty(e, "distance_profile");
  return {e.field(), detail::accumulate_profile(e, e, jobs)};
}

/// ν_{E,F}(t) = |{(x, y) ∈ E × F : ‖x − y‖ = t}|.
inline DistanceProfile bipartite_profile(const PointSet& e, const PointSet& f, unsigned jobs = 1) {
  require_nonempty(e, "bipartite_profile");
  require_nonempty(f, "bipartite_profile");
  require_same_field(e.field(), f.field());
  return {e.field(), detail::accumulate_profile(e, f, jobs)};
}

/// (x₁, x₂) ↦ (x₁, x₂ + x₁²).
inline PointSet shear_A(const PointSet& e) {
  const Field& f = e.field();
  std::vector<Point> out;
  out.reserve(e.size());
  for (const auto& pt : e.points()) out.push_back({pt.x1, f.add(pt.x2, f.square(pt.x1))});
  return PointSet(f, std::move(out));
}

/// (y₁, y₂) ↦ (y₁, y₂ − y₁²); the inverse of shear_A.
inline PointSet shear_B(const PointSet& e) {
  const Field& f = e.field();
  std::vector<Point> out;
  out.reserve(e.size());
  for (const auto& pt : e.points()) out.push_back({pt.x1, f.sub(pt.x2, f.square(pt.x1))});
  return PointSet(f, std::move(out));
}

/// Counts of a₂ − b₂ − 2a₁b₁ over A × B. For A = shear_A(E), B = shear_B(F)
/// this equals ν_{E,F}.
inline std::vector<std::uint64_t> bilinear_form_counts(const PointSet& a, const PointSet& b) {
  require_same_field(a.field(), b.field());
  const Field& f = a.field();
  const ElemIndex two = f.from_residue(2);
  std::vector<std::uint64_t> counts(f.order(), 0);
  for (const auto& pa : a.points()) {
    for (const auto& pb : b.points()) {
      const ElemIndex cross = f.mul(two, f.mul(pa.x1, pb.x1));
      ++counts[f.sub(f.sub(pa.x2, pb.x2), cross)];
    }
  }
  return counts;
}

/// K_E, the size of the largest vertical fiber.
inline std::size_t max_fiber(const PointSet& e) {
  require_nonempty(e, "max_fiber");
  return e.max_fiber();
}

/// u ↦ E_u over the nonempty fibers.
inline std::map<ElemIndex, std::vector<ElemIndex>> fiber_sets(const PointSet& e) {
  std::map<ElemIndex, std::vector<ElemIndex>> out;
  for (const auto& fib : e.fibers()) out.emplace(fib.u, std::vector<ElemIndex>(fib.ys.begin(), fib.ys.end()));
  return out;
}

/// The non-vertical line v = slope·u + intercept.
struct Line {
  ElemIndex slope = 0;
  ElemIndex intercept = 0;

  friend auto operator<=>(const Line&, const Line&) = default;
};

struct IncidenceModel {
  PointSet points;
  std::vector<Line> lines;
};

/// Points P_t = {(x₁, x₂ + x₁²)} and lines v = 2y₁u + (y₂ − y₁² + t), one per
/// point of E; (x, y) is an incidence exactly when ‖x − y‖ = t.
inline IncidenceModel incidence_model(const PointSet& e, ElemIndex t) {
  require_nonempty(e, "incidence_model");
  const Field& f = e.field();
  f.check_index(t);
  const ElemIndex two = f.from_residue(2);
  std::vector<Line> lines;
  lines.reserve(e.size());
  for (const auto& y : e.points()) {
    lines.push_back({f.mul(two, y.x1), f.add(f.sub(y.x2, f.square(y.x1)), t)});
  }
  std::sort(lines.begin(), lines.end());
  return {shear_A(e), std::move(lines)};
}

/// |{(p, ℓ) : p ∈ ℓ}|. Duplicate lines are counted once each time they occur.
inline std::uint64_t incidence_count(const Field& field, const PointSet& points, std::span<const Line> lines) {
  require_same_field(field, points.field());
  for (const auto& l : lines) {
    field.check_index(l.slope);
    field.check_index(l.intercept);
  }
  const auto fibers = points.fibers();
  std::uint64_t count = 0;
  for (const auto& l : lines) {
    for (const auto& fib : fibers) {
      const ElemIndex v = field.add(field.mul(l.slope, fib.u), l.intercept);
      if (std::binary_search(fib.ys.begin(), fib.ys.end(), v)) ++count;
    }
  }
  return count;
}

}  // namespace parafalc

#endif  // PARAFALC_GEOMETRY_HPP
