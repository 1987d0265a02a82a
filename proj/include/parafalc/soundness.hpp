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

// Per-instance soundness checks: every proved inequality and identity is
// evaluated exactly on a concrete set and tallied by name.

#ifndef PARAFALC_SOUNDNESS_HPP
#define PARAFALC_SOUNDNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "parafalc/bounds.hpp"
#include "parafalc/energy.hpp"
#include "parafalc/geometry.hpp"

namespace parafalc {

/// evaluated / violated counters keyed by check name.
class CheckTally {
 public:
  struct Count {
    std::uint64_t evaluated = 0;
    std::uint64_t violations = 0;
  };

  void record(const std::string& name, bool ok) {
    auto& c = counts_[name];
    ++c.evaluated;
    if (!ok) ++c.violations;
  }

  void merge(const CheckTally& other) {
    for (const auto& [k, v] : other.counts_) {
      counts_[k].evaluated += v.evaluated;
      counts_[k].violations += v.violations;
    }
  }

  std::uint64_t violations() const {
    std::uint64_t total = 0;
    for (const auto& [k, v] : counts_) total += v.violations;
    return total;
  }

  const std::map<std::string, Count>& counts() const { return counts_; }

 private:
  std::map<std::string, Count> counts_;
};

struct InstanceReport {
  std::uint64_t q = 0;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::uint64_t efib = 0;
  std::uint64_t delta = 0;
  BigInt second_moment;
  Rational main_bound;
  Rational fiber_bound;
  Rational moment_bound;
  CheckTally tally;
};

/// Checks on a single set E:
///   sum_nu            Σ_t ν(t) = |E|²
///   main_bound        |Δ_P(E)| >= q n² / (n² + q² K)
///   fiber_bound       |Δ_P(E)| >= q n⁴ / (n⁴ + q² E_fib)
///   second_moment     Σ ν² <= n⁴/q + q n² K
///   fiber_moment      Σ ν² <= n⁴/q + q E_fib
///   fiber_energy_cap  E_fib <= K n²
///   energy_trivial    E_+(E_u, E_u') <= |E_u||E_u'| min(...) <= (|E_u||E_u'|)^(3/2)
///   shear_identity    a₂ − b₂ − 2a₁b₁ = ‖x − y‖ for every ordered pair
///   shear_profile     the bilinear-form counts over shear_A(E) × shear_B(E) equal ν
///   shear_fibers      both shears preserve every fiber size and invert each other
///   vinh              (qI − |P||L|)² <= q³|P||L| for each incidence model (P_t, L_t)
///   incidence_nu      I(P_t, L_t) = ν(t) for every t
///   nu_lower          ν(t) >= n²/q − √q n for every t
///   full_distances    n² > q³ implies Δ_P(E) = F_q
inline InstanceReport check_instance(const PointSet& e, unsigned jobs = 1) {
  require_nonempty(e, "check_instance");
  const Field& f = e.field();
  InstanceReport r;
  r.q = f.order();
  r.n = e.size();
  r.k = e.max_fiber();
  const BigInt q(r.q);
  const BigInt n(r.n);
  const BigInt k(r.k);
  auto& t = r.tally;

  const auto profile = distance_profile(e, jobs);
  r.delta = profile.support_size();
  r.second_moment = profile.second_moment();
  r.efib = fiber_energy(e, jobs);
  t.record("sum_nu", profile.first_moment() == r.n * r.n);

  r.main_bound = main_lower_bound(q, n, k);
  r.fiber_bound = fiber_energy_lower_bound(q, n, BigInt(r.efib));
  r.moment_bound = second_moment_upper_bound(q, n, k);
  t.record("main_bound", Rational(r.delta) >= r.main_bound);
  t.record("fiber_bound", Rational(r.delta) >= r.fiber_bound);
  t.record("second_moment", Rational(r.second_moment) <= r.moment_bound);
  t.record("fiber_moment", Rational(r.second_moment) <= Rational(n * n * n * n, q) + Rational(q * r.efib));
  t.record("fiber_energy_cap", r.efib <= fiber_energy_bound(e));

  const auto fibers = e.fibers();
  for (const auto& fu : fibers) {
    for (const auto& fv : fibers) {
      const auto rep = additive_energy(f, fu.ys, fv.ys);
      const BigInt prod = BigInt(rep.size_p) * rep.size_q;
      const BigInt triv(rep.trivial_bound);
      t.record("energy_trivial", rep.value <= rep.trivial_bound && triv * triv <= prod * prod * prod);
    }
  }

  // shear identity on every ordered pair, straight from the point coordinates
  const ElemIndex two = f.from_residue(2);
  bool identity_ok = true;
  for (const auto& x : e.points()) {
    const ElemIndex a1 = x.x1;
    const ElemIndex a2 = f.add(x.x2, f.square(x.x1));
    for (const auto& y : e.points()) {
      const ElemIndex b1 = y.x1;
      const ElemIndex b2 = f.sub(y.x2, f.square(y.x1));
      const ElemIndex lhs = f.sub(f.sub(a2, b2), f.mul(two, f.mul(a1, b1)));
      if (lhs != parabolic_distance(f, x, y)) identity_ok = false;
    }
  }
  t.record("shear_identity", identity_ok);

  const PointSet sa = shear_A(e);
  const PointSet sb = shear_B(e);
  t.record("shear_profile", bilinear_form_counts(sa, sb) == profile.nu);
  bool fibers_ok = shear_B(sa) == e && shear_A(sb) == e;
  for (const auto& fu : fibers) {
    fibers_ok = fibers_ok && sa.fiber(fu.u).size() == fu.ys.size() && sb.fiber(fu.u).size() == fu.ys.size();
  }
  fibers_ok = fibers_ok && sa.fiber_count() == e.fiber_count() && sb.fiber_count() == e.fiber_count();
  t.record("shear_fibers", fibers_ok);

  const auto nu_lower = nu_lower_bound(q, n);
  for (std::size_t ti = 0; ti < r.q; ++ti) {
    const auto model = incidence_model(e, static_cast<ElemIndex>(ti));
    const std::uint64_t inc = incidence_count(f, model.points, model.lines);
    t.record("vinh", vinh_deviation_bound(q, BigInt(model.points.size()), BigInt(model.lines.size())).admits(inc));
    t.record("incidence_nu", inc == profile.nu[ti]);
    t.record("nu_lower", nu_lower.admits(BigInt(profile.nu[ti])));
  }
  if (nu_lower.predicts_all_distances()) t.record("full_distances", r.delta == r.q);
  return r;
}

struct BipartiteReport {
  std::uint64_t delta = 0;
  BigInt second_moment;
  CheckTally tally;
};

/// bipartite_sum_nu, bipartite_bound and bipartite_moment for the pair (E, F).
inline BipartiteReport check_bipartite(const PointSet& e, const PointSet& f, unsigned jobs = 1) {
  BipartiteReport r;
  const auto profile = bipartite_profile(e, f, jobs);
  r.delta = profile.support_size();
  r.second_moment = profile.second_moment();
  const BigInt q(e.field().order());
  const BigInt ne(e.size());
  const BigInt nf(f.size());
  const BigInt ke(e.max_fiber());
  const BigInt kf(f.max_fiber());
  r.tally.record("bipartite_sum_nu", BigInt(profile.first_moment()) == ne * nf);
  r.tally.record("bipartite_bound", bipartite_lower_bound(q, ne, nf, ke, kf).admits(BigInt(r.delta)));
  r.tally.record("bipartite_moment", bipartite_second_moment_bound(q, ne, nf, ke, kf).admits(r.second_moment));
  return r;
}

}  // namespace parafalc

#endif  // PARAFALC_SOUNDNESS_HPP
