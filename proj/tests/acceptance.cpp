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


// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Expected values come from the oracles in
// oracles.hpp or from closed forms evaluated here, never from the library
// routine under test.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "oracles.hpp"
#include "parafalc/harness.hpp"

namespace {

using parafalc::BigInt;
using parafalc::Field;
using parafalc::Json;
using parafalc::Point;
using parafalc::PointSet;
using Float50 = boost::multiprecision::cpp_bin_float_50;

constexpr std::uint64_t kSeed = 20260101;

// Addition and multiplication tables filled from the schoolbook reference
// field, so the pair loops below stay cheap.
struct RefTable {
  std::uint64_t q;
  std::vector<std::uint32_t> add_t;
  std::vector<std::uint32_t> mul_t;
  std::vector<std::uint32_t> neg_t;

  explicit RefTable(const oracle::RefField& f) : q(f.order()), add_t(q * q), mul_t(q * q), neg_t(q) {
    for (std::uint64_t a = 0; a < q; ++a) {
      neg_t[a] = static_cast<std::uint32_t>(f.neg(a));
      for (std::uint64_t b = 0; b < q; ++b) {
        add_t[a * q + b] = static_cast<std::uint32_t>(f.add(a, b));
        mul_t[a * q + b] = static_cast<std::uint32_t>(f.mul(a, b));
      }
    }
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return add_t[a * q + b]; }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add_t[a * q + neg_t[b]]; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return mul_t[a * q + b]; }
  std::uint32_t dist(Point x, Point y) const {
    const auto d = sub(x.x1, y.x1);
    return add(sub(x.x2, y.x2), mul(d, d));
  }
  std::vector<std::uint64_t> profile(std::span<const Point> e, std::span<const Point> f) const {
    std::vector<std::uint64_t> nu(q, 0);
    for (const auto& x : e) {
      for (const auto& y : f) ++nu[dist(x, y)];
    }
    return nu;
  }
};

std::uint64_t support(const std::vector<std::uint64_t>& nu) {
  std::uint64_t s = 0;
  for (auto v : nu) s += v > 0 ? 1 : 0;
  return s;
}

BigInt square_sum(const std::vector<std::uint64_t>& nu) {
  BigInt s = 0;
  for (auto v : nu) s += BigInt(v) * v;
  return s;
}

// E_fib straight from the definition: quadruples a + b = c + d with a, c in
// fiber u and b, d in fiber v, summed over ordered fiber pairs.
std::uint64_t table_fiber_energy(const RefTable& t, std::span<const Point> e) {
  std::map<std::uint32_t, std::vector<std::uint32_t>> fib;
  for (const auto& p : e) fib[p.x1].push_back(p.x2);
  std::uint64_t total = 0;
  std::vector<std::uint64_t> reps(t.q);
  for (const auto& [u, a] : fib) {
    for (const auto& [v, b] : fib) {
      std::fill(reps.begin(), reps.end(), 0);
      for (auto x : a) {
        for (auto y : b) ++reps[t.add(x, y)];
      }
      for (auto r : reps) total += r * r;
    }
  }
  return total;
}

struct Criterion {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.size() < 600) detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

struct Cli {
  int code = -1;
  std::string out;
  double seconds = 0;
};

Cli run_cli(const std::string& args) {
  const auto start = std::chrono::steady_clock::now();
  Cli c;
  FILE* pipe = ::popen((std::string(PARAFALC_CLI) + " " + args + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return c;
  std::array<char, 65536> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) c.out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

std::vector<Point> points_of(const PointSet& e) { return {e.points().begin(), e.points().end()}; }

// Exact grid closed form: M, N as integer floors of p^((1−ε)/2), p^(1−ε/2) for ε = 1/2.
Criterion grid_reproduction() {
  Criterion c;
  const auto cli = run_cli("construct grid --field 101 --eps 1/2 --check");
  c.require(cli.code == 0, "exit code " + std::to_string(cli.code));
  c.require(cli.seconds < 1.0, "runtime " + fmt(cli.seconds) + " s");
  Json j;
  try {
    j = Json::parse(cli.out);
  } catch (const std::exception& e) {
    c.require(false, std::string("unparsable output: ") + e.what());
    return c;
  }
  // M⁴ <= 101 < (M+1)⁴ and N⁴ <= 101³ < (N+1)⁴
  std::uint64_t m = 0, n = 0;
  while ((m + 1) * (m + 1) * (m + 1) * (m + 1) <= 101) ++m;
  while ((n + 1) * (n + 1) * (n + 1) * (n + 1) <= 101ULL * 101 * 101) ++n;
  c.require(m == 3 && n == 31, "M, N = " + std::to_string(m) + ", " + std::to_string(n));
  const auto& params = j["result"]["construction"]["predicted"]["parameters"];
  c.require(params["M"] == m && params["N"] == n, "reported parameters differ");

  // E = {(a, b) : 0 <= a < M, 0 <= b < N} as residues mod 101
  std::vector<Point> e;
  for (std::uint32_t a = 0; a < m; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) e.push_back({a, b});
  }
  const auto field = Field::create(101, 1);
  const RefTable t(oracle::ref_of(field));
  const auto delta = support(t.profile(e, e));
  const auto closed = (m - 1) * (m - 1) + 2 * n - 1;
  c.require(e.size() == 93 && delta == 65 && closed == 65, "oracle |E| = " + std::to_string(e.size()) +
                                                               ", |Δ| = " + std::to_string(delta));
  const auto& r = j["result"];
  c.require(r["construction"]["point_set"]["points"].size() == e.size(), "reported |E| differs");
  c.require(r["verification"]["delta_size"] == delta, "reported |Δ| differs");
  c.require(r["construction"]["predicted"]["delta_size"] == closed, "prediction differs");
  c.require(r["construction"]["applicable"] == true && r["verification"]["passed"] == true, "not applicable/passed");
  // the constructed point file must be exactly the oracle grid
  const auto built = parafalc::grid_construction(101, parafalc::make_rational(1, 2));
  c.require(built.set == PointSet(field, e), "constructed set is not the grid");
  c.detail = c.pass ? "|E| = 93, |Δ| = 65 = (M−1)²+2N−1 with M = 3, N = 31, " + fmt(cli.seconds) + " s" : c.detail;
  return c;
}

Criterion sharpness_reproduction() {
  Criterion c;
  const auto cli = run_cli("construct sharpness-subspace --field 3 --k 2 --m 2 --eps 1/2 --check");
  c.require(cli.code == 0, "exit code " + std::to_string(cli.code));
  c.require(cli.seconds < 1.0, "runtime " + fmt(cli.seconds) + " s");
  const auto r = parafalc::sharpness_subspace(3, 2, 2, parafalc::make_rational(1, 2));
  const auto e = points_of(r.set);
  const Field& f = r.set.field();
  c.require(f.order() == 81, "field order " + std::to_string(f.order()));
  const RefTable t(oracle::ref_of(f));
  const auto nu = t.profile(e, e);
  std::set<std::uint64_t> delta;
  for (std::uint64_t s = 0; s < nu.size(); ++s) {
    if (nu[s]) delta.insert(s);
  }
  std::map<std::uint32_t, std::uint64_t> fib;
  for (const auto& p : e) ++fib[p.x1];
  std::uint64_t k = 0;
  for (const auto& [u, s] : fib) k = std::max(k, s);
  // V closed under F_3-linear combinations and equal to Δ
  const auto v = r.predicted.container->enumerate();
  const std::set<std::uint64_t> vset(v.begin(), v.end());
  bool closed = true;
  for (auto a : vset) {
    for (auto b : vset) closed = closed && vset.count(t.add(a, b)) && vset.count(t.mul(2, a));
  }
  c.require(closed, "V is not a subspace");
  c.require(e.size() == 27, "|E| = " + std::to_string(e.size()));
  c.require(k == 9, "K = " + std::to_string(k));
  c.require(delta == vset && vset.size() == 9, "Δ ≠ V or |V| ≠ 9");
  // |E| = q √K / q^(1/2)  <=>  |E|² q = q² K
  const BigInt lhs = BigInt(e.size()) * e.size() * 81;
  const BigInt rhs = BigInt(81) * 81 * k;
  c.require(lhs == rhs, "size relation " + lhs.str() + " vs " + rhs.str());
  try {
    const auto j = Json::parse(cli.out);
    c.require(j["result"]["verification"]["passed"] == true, "CLI verification failed");
    c.require(j["result"]["verification"]["delta_size"] == 9, "CLI |Δ| differs");
  } catch (const std::exception& ex) {
    c.require(false, std::string("unparsable output: ") + ex.what());
  }
  if (c.pass) c.detail = "|E| = 27, K = 9, Δ = V with |V| = 9, 27²·81 = 81²·9, " + fmt(cli.seconds) + " s";
  return c;
}

Criterion subspace_containment() {
  Criterion c;
  const auto r = parafalc::subspace_construction(3, 1, parafalc::make_rational(1, 2));
  const auto e = points_of(r.set);
  const RefTable t(oracle::ref_of(r.set.field()));
  const auto nu = t.profile(e, e);
  const auto v = r.predicted.container->enumerate();
  const std::set<std::uint64_t> vset(v.begin(), v.end());
  std::set<std::uint64_t> delta;
  for (std::uint64_t s = 0; s < nu.size(); ++s) {
    if (nu[s]) delta.insert(s);
  }
  for (auto s : delta) c.require(vset.count(s) == 1, "distance " + std::to_string(s) + " outside V");
  // F_3 inside F_9: the elements with zero higher coefficient, indices 0, 1, 2
  c.require(delta == std::set<std::uint64_t>{0, 1, 2}, "Δ is not F_3");
  const auto cli = run_cli("construct subspace --field 3 --m 1 --eps 1/2 --check");
  c.require(cli.code == 0, "CLI exit code " + std::to_string(cli.code));
  if (c.pass) c.detail = "|E| = " + std::to_string(e.size()) + ", Δ = F_3 ⊆ V (|V| = " + std::to_string(vset.size()) + ")";
  return c;
}

struct SweepState {
  std::uint64_t instances = 0;
  std::uint64_t bipartite = 0;
  std::uint64_t fiber_pairs = 0;
  std::uint64_t incidence_models = 0;
  std::uint64_t vinh_violations = 0;
  std::uint64_t incidence_mismatches = 0;
  std::uint64_t n_min = ~0ULL, n_max = 0, k_min = ~0ULL, k_max = 0;
};

// Random sets over q in {3, ..., 13} with K uniform in [1, q] and n in [2, Kq].
Criterion soundness_sweep(SweepState& st) {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  std::map<std::string, std::uint64_t> violations;
  for (std::uint64_t q : {3, 5, 7, 9, 11, 13}) {
    const Field field = oracle::field_of_order(q);
    const RefTable t(oracle::ref_of(field));
    const BigInt bq(q);
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
      parafalc::Rng rng(parafalc::derive_seed(kSeed, q, trial));
      const auto k = rng.between(1, q);
      const auto n = rng.between(std::max<std::uint64_t>(2, k), k * q);
      const auto kf = rng.between(1, q);
      const auto nf = rng.between(kf, kf * q);
      const auto e = parafalc::random_set_with_fiber_cap(field, n, k, rng.next());
      const auto f = parafalc::random_set_with_fiber_cap(field, nf, kf, rng.next());
      ++st.instances;
      st.n_min = std::min(st.n_min, n);
      st.n_max = std::max(st.n_max, n);
      st.k_min = std::min(st.k_min, k);
      st.k_max = std::max(st.k_max, k);

      const auto pe = points_of(e);
      const auto nu = t.profile(pe, pe);
      const BigInt bn(n), bk(e.max_fiber()), delta(support(nu));
      const BigInt n2 = bn * bn, n4 = n2 * n2;
      const std::uint64_t efib = table_fiber_energy(t, pe);
      // (a) |Δ| (n² + q²K) >= q n²
      if (!(delta * (n2 + bq * bq * bk) >= bq * n2)) ++violations["main"];
      // (b) |Δ| (n⁴ + q² E_fib) >= q n⁴
      if (!(delta * (n4 + bq * bq * efib) >= bq * n4)) ++violations["fiber"];
      // (c) q Σν² <= n⁴ + q² n² K
      if (!(bq * square_sum(nu) <= n4 + bq * bq * n2 * bk)) ++violations["second_moment"];

      // (e) E_+(E_u, E_v) <= (|E_u||E_v|)^(3/2) over every ordered fiber pair, by definition
      std::map<std::uint32_t, std::vector<std::uint32_t>> fib;
      for (const auto& p : pe) fib[p.x1].push_back(p.x2);
      std::vector<std::uint64_t> reps(q);
      for (const auto& [u, a] : fib) {
        for (const auto& [v, b] : fib) {
          std::fill(reps.begin(), reps.end(), 0);
          for (auto x : a) {
            for (auto y : b) ++reps[t.add(x, y)];
          }
          BigInt energy = 0;
          for (auto r : reps) energy += BigInt(r) * r;
          const BigInt prod = BigInt(a.size()) * b.size();
          if (energy * energy > prod * prod * prod) ++violations["energy"];
          ++st.fiber_pairs;
        }
      }

      // (d) |Δ(E,F)| >= q / (1 + q²√(K_E K_F)/(|E||F|)), in 50-digit floating point
      const auto pf = points_of(f);
      const auto nub = t.profile(pe, pf);
      const Float50 x = Float50(n) * nf;
      const Float50 root = boost::multiprecision::sqrt(Float50(e.max_fiber()) * f.max_fiber());
      const Float50 bound = Float50(q) / (1 + Float50(q) * q * root / x);
      if (Float50(support(nub)) < bound * (1 - Float50(1e-30))) ++violations["bipartite"];
      const Float50 moment_bound = x * x / q + Float50(q) * x * root;
      if (Float50(square_sum(nub).str()) > moment_bound * (1 + Float50(1e-30))) ++violations["bipartite_moment"];
      ++st.bipartite;

      // library tallies over the same instance, including the incidence models
      const auto rep = parafalc::check_instance(e);
      for (const auto& [name, cnt] : rep.tally.counts()) {
        if (cnt.violations) violations["library:" + name] += cnt.violations;
      }
      const auto brep = parafalc::check_bipartite(e, f);
      for (const auto& [name, cnt] : brep.tally.counts()) {
        if (cnt.violations) violations["library:" + name] += cnt.violations;
      }
      if (rep.delta != support(nu)) ++violations["delta_mismatch"];
      if (rep.efib != efib) ++violations["efib_mismatch"];
      if (brep.delta != support(nub)) ++violations["bipartite_delta_mismatch"];

      // incidence models (P_t, L_t) for criterion 6
      for (std::uint64_t s = 0; s < q; ++s) {
        const auto model = parafalc::incidence_model(e, static_cast<parafalc::ElemIndex>(s));
        const auto inc = parafalc::incidence_count(field, model.points, model.lines);
        const BigInt np(model.points.size()), nl(model.lines.size());
        const BigInt dev = bq * inc - np * nl;
        if (dev * dev > bq * bq * bq * np * nl) ++st.vinh_violations;
        if (inc != nu[s]) ++st.incidence_mismatches;
        ++st.incidence_models;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& [name, count] : violations) c.require(false, name + ": " + std::to_string(count));
  c.require(secs < 300, "runtime " + fmt(secs) + " s");
  c.require(st.n_min == 2 && st.n_max >= 150 && st.k_min == 1 && st.k_max == 13, "size/cap range not covered");
  if (c.pass) {
    c.detail = std::to_string(st.instances) + " sets (n " + std::to_string(st.n_min) + ".." +
               std::to_string(st.n_max) + ", K 1..13), " + std::to_string(st.bipartite) + " bipartite pairs, " +
               std::to_string(st.fiber_pairs) + " fiber pairs, 0 violations, " + fmt(secs) + " s";
  }
  return c;
}

Criterion full_distances() {
  Criterion c;
  std::uint64_t sets = 0, points = 0;
  for (std::uint64_t q : {3, 5, 7, 9}) {
    const Field field = oracle::field_of_order(q);
    const RefTable t(oracle::ref_of(field));
    const BigInt bq(q);
    // smallest n with n² > q³
    std::uint64_t lo = 1;
    while (lo * lo <= q * q * q) ++lo;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      parafalc::Rng rng(parafalc::derive_seed(kSeed, 5000 + q, trial));
      const auto n = rng.between(lo, q * q);
      const auto e = parafalc::random_set(field, n, rng.next());
      const auto nu = t.profile(points_of(e), points_of(e));
      ++sets;
      c.require(support(nu) == q, "q = " + std::to_string(q) + ", n = " + std::to_string(n) + " misses a distance");
      const BigInt bn(n);
      const auto lib = parafalc::nu_lower_bound(bq, bn);
      c.require(lib.predicts_all_distances(), "predicate does not predict every distance");
      for (auto v : nu) {
        // ν >= n²/q − √q n  <=>  qν − n² >= −q√q n
        const BigInt d = bq * v - bn * bn;
        const bool holds = d >= 0 || d * d <= bq * bq * bq * bn * bn;
        c.require(holds, "ν lower bound fails at q = " + std::to_string(q));
        c.require(lib.admits(BigInt(v)) == holds, "library predicate disagrees");
        ++points;
      }
    }
  }
  if (c.pass) {
    c.detail = std::to_string(sets) + " sets with |E|² > q³ all have Δ = F_q; ν lower bound holds at " +
               std::to_string(points) + " (set, t) points";
  }
  return c;
}

Criterion vinh_audit(const SweepState& st) {
  Criterion c;
  std::uint64_t pairs = 0;
  for (std::uint64_t q : {3, 5, 7, 9, 11, 13}) {
    const Field field = oracle::field_of_order(q);
    const RefTable t(oracle::ref_of(field));
    const BigInt bq(q);
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      parafalc::Rng rng(parafalc::derive_seed(kSeed, 9000 + q, trial));
      const auto np = rng.between(1, q * q);
      const auto nl = rng.between(1, q * q);
      const auto pts = oracle::random_points(q, np, rng.next());
      const auto raw_lines = oracle::random_points(q, nl, rng.next());
      std::vector<parafalc::Line> lines;
      for (const auto& l : raw_lines) lines.push_back({l.x1, l.x2});
      std::uint64_t inc = 0;
      for (const auto& p : pts) {
        for (const auto& l : lines) inc += t.add(t.mul(l.slope, p.x1), l.intercept) == p.x2 ? 1 : 0;
      }
      const BigInt dev = bq * inc - BigInt(np) * nl;
      c.require(dev * dev <= bq * bq * bq * np * nl, "Vinh fails at q = " + std::to_string(q));
      c.require(parafalc::incidence_count(field, PointSet(field, pts), lines) == inc, "incidence count disagrees");
      ++pairs;
    }
  }
  c.require(pairs >= 500, "only " + std::to_string(pairs) + " pairs");
  c.require(st.incidence_models > 0, "no incidence models from the soundness sweep");
  c.require(st.vinh_violations == 0, std::to_string(st.vinh_violations) + " incidence-model violations");
  c.require(st.incidence_mismatches == 0, std::to_string(st.incidence_mismatches) + " I(P_t, L_t) ≠ ν(t)");
  if (c.pass) {
    c.detail = std::to_string(pairs) + " random (P, L) pairs and " + std::to_string(st.incidence_models) +
               " incidence models satisfy the squared form; I(P_t, L_t) = ν(t) throughout";
  }
  return c;
}

const std::vector<std::uint64_t> kFourierFields = {3, 5, 9, 25, 27, 81};

std::string fourier_args() { return "audit-fourier --q 3,5,9,25,27,81 --trials 50 --functions 100 --seed " + std::to_string(kSeed); }

Criterion fourier_audit(Json& record) {
  Criterion c;
  const auto cli = run_cli(fourier_args());
  c.require(cli.code == 0, "exit code " + std::to_string(cli.code));
  try {
    record = Json::parse(cli.out);
  } catch (const std::exception& e) {
    c.require(false, std::string("unparsable output: ") + e.what());
    return c;
  }
  c.require(record["result"]["failures"].empty(), "failures: " + record["result"]["failures"].dump());
  double orth = 0, planch = 0, ident = 0;
  for (const auto& f : record["result"]["fields"]) {
    const auto q = f["q"].get<double>();
    orth = std::max(orth, f["orthogonality_deviation"].get<double>() / q);
    planch = std::max(planch, f["plancherel_max_relative_error"].get<double>());
    ident = std::max(ident, f["identity_max_relative_error"].get<double>());
    c.require(f["orthogonality_deviation"].get<double>() < q * 1e-9, "orthogonality at q = " + fmt(q));
    c.require(f["plancherel_max_relative_error"].get<double>() < 1e-9, "Plancherel at q = " + fmt(q));
    c.require(f["plancherel_functions"] == 100 && f["sets"] == 50, "wrong sample counts");
    c.require(f["identity_max_relative_error"].get<double>() <= 1e-6, "second-moment identity at q = " + fmt(q));
  }
  c.require(record["result"]["fields"].size() == kFourierFields.size(), "missing fields");

  // second moment of the 50 sets recomputed with the oracle profile: Σν² − n⁴/q matches (1/q)Σ|S|²
  double oracle_err = 0;
  for (const auto& f : record["result"]["fields"]) {
    const auto q = f["q"].get<std::uint64_t>();
    const Field field = oracle::field_of_order(q);
    const RefTable t(oracle::ref_of(field));
    for (std::size_t i = 0; i < f["per_set"].size(); ++i) {
      const auto seed = parafalc::derive_seed(kSeed, q, i);
      parafalc::Rng rng(seed);
      const auto n = rng.between(1, q * q);
      const auto e = points_of(parafalc::random_set(field, n, parafalc::derive_seed(seed, 1, 0)));
      const auto& s = f["per_set"][i];
      c.require(s["n"] == n, "set regeneration mismatch");
      const double moment = square_sum(t.profile(e, e)).convert_to<double>();
      const double predicted = std::pow(static_cast<double>(n), 4) / q + s["sum_S2_nonzero"].get<double>() / q;
      oracle_err = std::max(oracle_err, std::abs(moment - predicted) / moment);
    }
  }
  c.require(oracle_err <= 1e-6, "oracle second moment error " + fmt(oracle_err));

  // E = {(0,0), (0,1)} over F_3: Σν² = 6 and n⁴/q = 16/3, so Σ_{s≠0}|S(s)|² = 3(6 − 16/3) = 2
  const Field f3 = Field::create(3, 1);
  const PointSet hand(f3, {{0, 0}, {0, 1}});
  const auto rep = parafalc::spectral_report(parafalc::shear_A(hand), parafalc::shear_B(hand));
  c.require(std::abs(rep.sum_s2_nonzero - 2.0) < 1e-9, "hand instance gives " + fmt(rep.sum_s2_nonzero));
  if (c.pass) {
    c.detail = "max orthogonality/q " + fmt(orth) + ", Plancherel " + fmt(planch) + ", identity " + fmt(ident) +
               ", oracle " + fmt(oracle_err) + ", hand instance 2 (error " + fmt(std::abs(rep.sum_s2_nonzero - 2)) + ")";
  }
  return c;
}

Criterion energy_agreement(const Json& record) {
  Criterion c;
  double worst = 0;
  std::uint64_t count = 0;
  if (!record.contains("result")) {
    c.require(false, "no Fourier audit record");
    return c;
  }
  for (const auto& f : record["result"]["fields"]) {
    const auto q = f["q"].get<std::uint64_t>();
    const Field field = oracle::field_of_order(q);
    const RefTable t(oracle::ref_of(field));
    for (std::size_t i = 0; i < f["per_set"].size(); ++i) {
      const auto seed = parafalc::derive_seed(kSeed, q, i);
      parafalc::Rng rng(seed);
      const auto n = rng.between(1, q * q);
      const auto e = parafalc::random_set(field, n, parafalc::derive_seed(seed, 1, 0));
      const auto a = parafalc::shear_A(e);
      const auto rep = parafalc::spectral_report(a, parafalc::shear_B(e));
      const std::uint64_t efib = parafalc::fiber_energy(a);
      const double expect = static_cast<double>(q) * static_cast<double>(efib);
      const double err = std::abs(rep.sum_u2 - expect) / expect;
      worst = std::max(worst, err);
      c.require(err <= 1e-6, "q = " + std::to_string(q) + " set " + std::to_string(i) + " error " + fmt(err));
      const auto& s = f["per_set"][i];
      c.require(std::abs(s["sum_U2"].get<double>() - rep.sum_u2) <= 1e-6 * expect, "audit record disagrees");
      c.require(s["fiber_energy_A"] == efib, "audit fiber energy disagrees");
      if (q <= 27) c.require(table_fiber_energy(t, points_of(a)) == efib, "fiber energy oracle disagrees");
      ++count;
    }
  }
  if (c.pass) c.detail = std::to_string(count) + " instances, max relative error " + fmt(worst);
  return c;
}

Criterion shear_invariants() {
  Criterion c;
  std::uint64_t pairs = 0, sets = 0;
  for (auto q : oracle::odd_prime_powers(25)) {
    const Field field = oracle::field_of_order(q);
    const RefTable t(oracle::ref_of(field));
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
      parafalc::Rng rng(parafalc::derive_seed(kSeed, 7000 + q, trial));
      const auto n = rng.between(1, q * q);
      const auto e = parafalc::random_set(field, n, rng.next());
      const auto pts = points_of(e);
      std::vector<Point> as, bs;
      for (const auto& x : pts) {
        const auto sq = t.mul(x.x1, x.x1);
        as.push_back({x.x1, t.add(x.x2, sq)});
        bs.push_back({x.x1, t.sub(x.x2, sq)});
      }
      bool identity = true;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
          const auto cross = t.mul(2, t.mul(as[i].x1, bs[j].x1));
          const auto lhs = t.sub(t.sub(as[i].x2, bs[j].x2), cross);
          identity = identity && lhs == t.dist(pts[i], pts[j]);
        }
      }
      pairs += pts.size() * pts.size();
      ++sets;
      c.require(identity, "identity fails at q = " + std::to_string(q));
      const auto sa = parafalc::shear_A(e);
      const auto sb = parafalc::shear_B(e);
      c.require(sa == PointSet(field, as) && sb == PointSet(field, bs), "library shear differs from oracle");
      c.require(parafalc::shear_B(sa) == e && parafalc::shear_A(sb) == e, "shears are not mutual inverses");
      std::map<std::uint32_t, std::size_t> before, after_a, after_b;
      for (const auto& p : pts) ++before[p.x1];
      for (const auto& p : sa.points()) ++after_a[p.x1];
      for (const auto& p : sb.points()) ++after_b[p.x1];
      c.require(before == after_a && before == after_b, "fiber sizes change");
    }
  }
  if (c.pass) {
    c.detail = std::to_string(sets) + " sets over q <= 25, " + std::to_string(pairs) +
               " ordered pairs, fibers preserved, shears mutually inverse";
  }
  return c;
}

std::string strip_timing(const std::string& text) {
  auto j = Json::parse(text);
  j.erase("timing");
  return j.dump();
}

Criterion determinism(const Json& fourier_record) {
  Criterion c;
  const std::string seed = std::to_string(kSeed);
  const std::vector<std::string> commands = {
      "construct grid --field 101 --eps 1/2 --check",
      "construct sharpness-subspace --field 3 --k 2 --m 2 --eps 1/2 --check",
      "construct subspace --field 3 --m 1 --eps 1/2 --check",
      "verify --q 3,5,7,9,11,13 --trials 200 --seed " + seed,
      "sweep grid --field 3 --field 101 --eps 1/4,1/3,1/2,2/3 --seed " + seed,
      "analyze random --field 3,2 --size 40 --fiber-cap 5 --seed " + seed,
  };
  std::size_t compared = 0;
  for (const auto& cmd : commands) {
    const auto a = run_cli(cmd);
    const auto b = run_cli(cmd + " --jobs 2");
    c.require(a.code == 0 && b.code == 0, "'" + cmd + "' failed");
    if (a.code == 0 && b.code == 0) {
      c.require(strip_timing(a.out) == strip_timing(b.out), "'" + cmd + "' differs between runs");
      ++compared;
    }
  }
  // the Fourier audit is the slowest command, so it is repeated once
  const auto again = run_cli(fourier_args() + " --jobs 2");
  c.require(again.code == 0, "audit repeat failed");
  if (again.code == 0 && fourier_record.contains("result")) {
    auto first = fourier_record;
    first.erase("timing");
    c.require(first.dump() == strip_timing(again.out), "audit-fourier differs between runs");
    ++compared;
  }
  if (c.pass) c.detail = std::to_string(compared) + " commands repeated with byte-identical JSON (timing excluded)";
  return c;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Criterion()>>> criteria;
  SweepState sweep;
  Json fourier;
  criteria.emplace_back("grid construction reproduced exactly", grid_reproduction);
  criteria.emplace_back("subspace sharpness example reproduced exactly", sharpness_reproduction);
  criteria.emplace_back("subspace construction keeps distances inside V", subspace_containment);
  criteria.emplace_back("bounds hold on seeded random sets", [&] { return soundness_sweep(sweep); });
  criteria.emplace_back("large sets realize every distance", full_distances);
  criteria.emplace_back("Vinh incidence bound and incidence model", [&] { return vinh_audit(sweep); });
  criteria.emplace_back("Fourier identities", [&] { return fourier_audit(fourier); });
  criteria.emplace_back("spectral and energy modules agree", [&] { return energy_agreement(fourier); });
  criteria.emplace_back("shear invariants", shear_invariants);
  criteria.emplace_back("determinism", [&] { return determinism(fourier); });

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first << " ("
              << r.detail << ")" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
