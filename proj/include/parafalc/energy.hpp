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

// Additive energy E_+(P, Q) = |{(x, x', y, y') ∈ P² × Q² : x + y = x' + y'}|
// and the fiber alignment energy Σ_{u,u'} E_+(E_u, E_u').

#ifndef PARAFALC_ENERGY_HPP
#define PARAFALC_ENERGY_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "parafalc/field.hpp"
#include "parafalc/geometry.hpp"
#include "parafalc/parallel.hpp"

namespace parafalc {

struct EnergyReport {
  std::uint64_t value = 0;
  std::uint64_t trivial_bound = 0;  // |P||Q| min(|P|, |Q|)
  std::uint64_t size_p = 0;
  std::uint64_t size_q = 0;
};

namespace detail {

/// Reusable representation-function buffer; only touched slots are reset.
class SumCounter {
 public:
  explicit SumCounter(std::size_t q) : r_(q, 0) {}

  std::uint64_t energy(const Field& f, std::span<const ElemIndex> p, std::span<const ElemIndex> q) {
    for (auto x : p) {
      for (auto y : q) {
        const ElemIndex w = f.add(x, y);
        if (r_[w]++ == 0) touched_.push_back(w);
      }
    }
    std::uint64_t total = 0;
    for (auto w : touched_) {
      total += r_[w] * r_[w];
      r_[w] = 0;
    }
    touched_.clear();
    return total;
  }

 private:
  std::vector<std::uint64_t> r_;
  std::vector<ElemIndex> touched_;
};

}  // namespace detail

/// E_+ via r(w) = |{(x, y) ∈ P × Q : x + y = w}| and E_+ = Σ_w r(w)².
/// Inputs are sets; repeated entries are not removed.
inline EnergyReport additive_energy(const Field& field, std::span<const ElemIndex> p, std::span<const ElemIndex> q) {
  for (auto x : p) field.check_index(x);
  for (auto y : q) field.check_index(y);
  detail::SumCounter counter(field.order());
  const std::uint64_t np = p.size();
  const std::uint64_t nq = q.size();
  return {counter.energy(field, p, q), np * nq * std::min(np, nq), np, nq};
}

inline EnergyReport additive_energy(std::span<const FieldElement> p, std::span<const FieldElement> q) {
  if (p.empty() && q.empty()) throw Error(ErrorCode::kDomainError, "additive_energy needs a field");
  const Field& field = p.empty() ? q.front().field() : p.front().field();
  std::vector<ElemIndex> pi;
  std::vector<ElemIndex> qi;
  for (const auto& x : p) {
    require_same_field(field, x.field());
    pi.push_back(x.index());
  }
  for (const auto& y : q) {
    require_same_field(field, y.field());
    qi.push_back(y.index());
  }
  return additive_energy(field, pi, qi);
}

/// Σ over ordered fiber pairs (u, u') of E_+(E_u, E_u'). Empty fibers
/// contribute nothing and are skipped.
inline std::uint64_t fiber_energy(const PointSet& e, unsigned jobs = 1) {
  require_nonempty(e, "fiber_energy");
  const auto fibers = e.fibers();
  std::vector<std::uint64_t> partial(std::max(jobs, 1U), 0);
  parallel_slices(fibers.size(), jobs, [&](std::size_t begin, std::size_t end, unsigned w) {
    detail::SumCounter counter(e.field().order());
    std::uint64_t sum = 0;
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& other : fibers) sum += counter.energy(e.field(), fibers[i].ys, other.ys);
    }
    partial[w] = sum;
  });
  std::uint64_t total = 0;
  for (auto v : partial) total += v;
  return total;
}

/// K_E |E|², an upper bound for fiber_energy.
inline std::uint64_t fiber_energy_bound(const PointSet& e) {
  require_nonempty(e, "fiber_energy_bound");
  const std::uint64_t n = e.size();
  return static_cast<std::uint64_t>(e.max_fiber()) * n * n;
}

}  // namespace parafalc

#endif  // PARAFALC_ENERGY_HPP
