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
 * @file harness.hpp
 * @brief Experiment configuration and the five batch commands behind the
 * `parafalc` tool.
 *
 * A command turns an ExperimentConfig into a run record: a JSON document with
 * a schema tag, the echoed configuration, the command's reports, a pass/fail
 * summary and a separate "timing" object. Everything outside "timing" is a
 * pure function of the configuration, whatever the value of `jobs`.
 *
 * Exit codes: 0 when every check passed, 1 on a bound violation or tolerance
 * failure, 2 on a configuration or IO error (see exit_code_for).
 */

#ifndef PARAFALC_HARNESS_HPP
#define PARAFALC_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parafalc/bounds.hpp"
#include "parafalc/constructions.hpp"
#include "parafalc/energy.hpp"
#include "parafalc/error.hpp"
#include "parafalc/field.hpp"
#include "parafalc/fourier.hpp"
#include "parafalc/geometry.hpp"
#include "parafalc/io.hpp"
#include "parafalc/parallel.hpp"
#include "parafalc/rng.hpp"
#include "parafalc/soundness.hpp"

#ifndef PARAFALC_VERSION
#define PARAFALC_VERSION "0.0.0"
#endif

namespace parafalc {

inline constexpr const char* kRunSchema = "parafalc.run/1";
inline constexpr std::uint64_t kProfileEnvelope = 121;
inline constexpr std::uint64_t kFourierEnvelope = 81;

/// Rejected configuration; always maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- field specs ---------------------------------------------------------------

struct FieldSpec {
  std::uint64_t p = 0;
  unsigned n = 1;
  std::optional<std::vector<Residue>> modulus;

  std::uint64_t order() const { return ipow_u64(p, n); }
  Field make() const { return Field::create(p, n, modulus); }
  std::string to_string() const { return make().to_string(); }
};

/// "p", "p,n" or "p,n,[c0,...,cn]".
inline FieldSpec parse_field_spec(std::string_view text) {
  FieldSpec spec;
  auto take_int = [&](std::string_view part, const char* what) -> std::uint64_t {
    std::uint64_t v = 0;
    if (part.empty()) throw ConfigError(std::string("--field: empty ") + what);
    for (char c : part) {
      if (c < '0' || c > '9') throw ConfigError("--field: " + std::string(what) + " '" + std::string(part) + "' is not an integer");
      if (v > (std::numeric_limits<std::uint64_t>::max() - 9) / 10) throw ConfigError("--field: value too large");
      v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
  };
  const auto c1 = text.find(',');
  spec.p = take_int(text.substr(0, c1), "characteristic");
  if (c1 != std::string_view::npos) {
    const auto rest = text.substr(c1 + 1);
    const auto c2 = rest.find(',');
    const auto degree = take_int(rest.substr(0, c2), "degree");
    if (degree < 1 || degree > 64) throw ConfigError("--field: degree must be in 1..64");
    spec.n = static_cast<unsigned>(degree);
    if (c2 != std::string_view::npos) {
      try {
        const auto coeffs = detail::parse_bracket_list(rest.substr(c2 + 1));
        spec.modulus = std::vector<Residue>(coeffs.begin(), coeffs.end());
      } catch (const Error& e) {
        throw ConfigError(std::string("--field modulus: ") + e.what());
      }
    }
  }
  return spec;
}

// --- configuration -------------------------------------------------------------

enum class OutputFormat { kJson, kCsv };

struct ExperimentConfig {
  std::string command;  // analyze | construct | verify | sweep | audit-fourier
  std::string kind;     // construction kind or "random"
  std::vector<FieldSpec> fields;
  std::vector<Rational> eps;
  std::vector<unsigned> k;
  std::vector<unsigned> m;
  std::vector<std::uint64_t> sizes;
  std::vector<std::uint64_t> fiber_caps;
  std::optional<std::uint64_t> trials;
  std::uint64_t seed = 0;
  std::uint64_t functions = 100;
  bool check = false;
  unsigned jobs = 1;
  std::optional<std::string> input;
  std::optional<std::string> out;
  std::optional<std::string> points_out;
  OutputFormat format = OutputFormat::kJson;
  bool allow_large = false;
  std::optional<std::uint64_t> max_q;  // envelope override
};

inline Json to_json(const ExperimentConfig& c) {
  Json fields = Json::array();
  for (const auto& f : c.fields) fields.push_back(f.to_string());
  Json eps = Json::array();
  for (const auto& e : c.eps) eps.push_back(to_string(e));
  Json out = {{"command", c.command},
              {"kind", c.kind},
              {"fields", fields},
              {"eps", eps},
              {"k", c.k},
              {"m", c.m},
              {"sizes", c.sizes},
              {"fiber_caps", c.fiber_caps},
              {"seed", c.seed},
              {"functions", c.functions},
              {"check", c.check},
              {"format", c.format == OutputFormat::kCsv ? "csv" : "json"}};
  out["trials"] = c.trials ? Json(*c.trials) : Json(nullptr);
  out["input"] = c.input ? Json(*c.input) : Json(nullptr);
  out["max_q"] = c.max_q ? Json(*c.max_q) : Json(nullptr);
  out["allow_large"] = c.allow_large;
  return out;
}

/// PARAFALC_MAX_Q, if set, as an envelope override.
inline std::optional<std::uint64_t> envelope_from_env() {
  const char* raw = std::getenv("PARAFALC_MAX_Q");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const auto v = std::strtoull(raw, &end, 10);
  if (*end != '\0' || v == 0) throw ConfigError(std::string("PARAFALC_MAX_Q='") + raw + "' is not a positive integer");
  return v;
}

// --- run records ---------------------------------------------------------------

struct RunOutcome {
  Json record;
  std::string csv;  // filled for verify and sweep
  bool passed = true;
};

inline int exit_code_for(const RunOutcome& o) { return o.passed ? 0 : 1; }

class PhaseTimer {
 public:
  void start(std::string name) {
    stop();
    name_ = std::move(name);
    begin_ = std::chrono::steady_clock::now();
  }
  void stop() {
    if (name_.empty()) return;
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - begin_;
    phases_[name_] = phases_.value(name_, 0.0) + d.count();
    total_ += d.count();
    name_.clear();
  }
  Json json() {
    stop();
    return {{"phases", phases_}, {"total_seconds", total_}};
  }

 private:
  std::string name_;
  std::chrono::steady_clock::time_point begin_;
  Json phases_ = Json::object();
  double total_ = 0;
};

namespace detail {

inline bool is_construction_kind(const std::string& kind) {
  return kind == "grid" || kind == "subspace" || kind == "sharpness-grid" || kind == "sharpness-subspace";
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T>
const T& single(const std::vector<T>& v, const char* flag) {
  if (v.size() != 1) throw ConfigError(std::string(flag) + " takes exactly one value here, got " + std::to_string(v.size()));
  return v.front();
}

inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

/// Field order a construction would live in, for the envelope check.
inline std::uint64_t construction_order(const std::string& kind, std::uint64_t p, unsigned k, unsigned m) {
  if (kind == "subspace") return checked_pow(p, 2ULL * m);
  if (kind == "sharpness-subspace") return checked_pow(p, static_cast<std::uint64_t>(k) * m);
  return p;
}

inline ConstructionResult build_construction(const std::string& kind, std::uint64_t p, const Rational& eps,
                                             unsigned k, unsigned m) {
  if (kind == "grid") return grid_construction(p, eps);
  if (kind == "sharpness-grid") return sharpness_grid(p, eps);
  if (kind == "subspace") return subspace_construction(p, m, eps);
  return sharpness_subspace(p, k, m, eps);
}

/// Soundness reports of the three single-set bounds.
inline std::vector<BoundReport> set_bound_reports(const PointSet& e, const DistanceProfile& profile,
                                                  std::uint64_t efib) {
  const BigInt q(e.field().order());
  const BigInt n(e.size());
  const BigInt k(e.max_fiber());
  const BigInt delta(profile.support_size());
  return {main_bound_report(q, n, k, delta), fiber_bound_report(q, n, BigInt(efib), delta),
          second_moment_report(q, n, k, profile.second_moment())};
}

}  // namespace detail

/// Checks everything that can be checked without heavy computation; throws
/// ConfigError naming the violated condition.
inline void validate(const ExperimentConfig& c) {
  static const std::vector<std::string> commands = {"analyze", "construct", "verify", "sweep", "audit-fourier"};
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end()) {
    throw ConfigError("unknown command '" + c.command + "' (expected analyze, construct, verify, sweep or audit-fourier)");
  }
  if (c.jobs < 1) throw ConfigError("--jobs must be at least 1");
  if (c.format == OutputFormat::kCsv && c.command != "verify" && c.command != "sweep") {
    throw ConfigError("--format csv is only available for verify and sweep");
  }
  const bool fourier = c.command == "audit-fourier";
  const std::uint64_t envelope = c.max_q.value_or(fourier ? kFourierEnvelope : kProfileEnvelope);
  auto check_envelope = [&](std::uint64_t q) {
    if (q > envelope && !c.allow_large) {
      throw ConfigError("q = " + std::to_string(q) + " exceeds the envelope q <= " + std::to_string(envelope) +
                        " (pass --allow-large or set PARAFALC_MAX_Q)");
    }
  };
  for (const auto& f : c.fields) {
    try {
      (void)f.make();
    } catch (const Error& e) {
      throw ConfigError(std::string("--field: ") + e.what());
    }
  }
  for (const auto& e : c.eps) {
    if (e < 0 || e >= 1) throw ConfigError("--eps must lie in [0, 1), got " + to_string(e));
  }
  for (auto v : c.k) {
    if (v < 1) throw ConfigError("--k must be positive");
  }
  for (auto v : c.m) {
    if (v < 1) throw ConfigError("--m must be positive");
  }

  const bool random_kind = c.kind == "random";
  const bool construction_kind = detail::is_construction_kind(c.kind);
  if (!c.kind.empty() && !random_kind && !construction_kind) {
    throw ConfigError("unknown kind '" + c.kind +
                      "' (expected grid, subspace, sharpness-grid, sharpness-subspace or random)");
  }

  auto check_random = [&](const FieldSpec& spec, std::uint64_t n, std::optional<std::uint64_t> cap) {
    const std::uint64_t q = spec.order();
    check_envelope(q);
    if (n < 1 || n > q * q) throw ConfigError("--size must lie in 1..q^2 = " + std::to_string(q * q));
    if (cap) {
      if (*cap < 1 || *cap > q) throw ConfigError("--fiber-cap must lie in 1..q");
      if (n > *cap * q) throw ConfigError("--size exceeds fiber-cap * q: no set with these parameters exists");
    }
  };
  auto check_construction = [&](const std::string& kind, const FieldSpec& spec, const Rational& eps, unsigned k,
                                unsigned m) {
    if (spec.n != 1) throw ConfigError("constructions take a prime --field, got " + spec.to_string());
    check_envelope(detail::construction_order(kind, spec.p, k, m));
    try {
      (void)detail::build_construction(kind, spec.p, eps, k, m);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  };

  if (c.command == "analyze" || c.command == "construct") {
    const bool has_input = c.input.has_value();
    if (c.command == "construct" && has_input) throw ConfigError("construct does not read --input");
    if (has_input == !c.kind.empty()) {
      throw ConfigError(c.command == "analyze" ? "analyze needs exactly one source: --input PATH or a kind"
                                               : "construct needs a kind");
    }
    if (has_input) return;  // the envelope is checked once the file is read
    const auto& spec = detail::single(c.fields, "--field");
    if (random_kind) {
      const auto n = detail::single(c.sizes, "--size");
      std::optional<std::uint64_t> cap;
      if (!c.fiber_caps.empty()) cap = detail::single(c.fiber_caps, "--fiber-cap");
      check_random(spec, n, cap);
    } else {
      const auto& eps = detail::single(c.eps, "--eps");
      const unsigned k = c.kind == "sharpness-subspace" ? detail::single(c.k, "--k") : 0;
      const unsigned m = c.kind == "subspace" || c.kind == "sharpness-subspace" ? detail::single(c.m, "--m") : 0;
      check_construction(c.kind, spec, eps, k, m);
    }
    return;
  }

  if (c.command == "verify") {
    if (!c.kind.empty()) throw ConfigError("verify takes no kind");
    for (const auto& spec : c.fields) {
      const std::uint64_t q = spec.order();
      check_envelope(q);
      for (auto n : c.sizes) {
        if (n < 1 || n > q * q) throw ConfigError("--size " + std::to_string(n) + " is outside 1..q^2 for q = " + std::to_string(q));
      }
      for (auto cap : c.fiber_caps) {
        if (cap < 1 || cap > q) throw ConfigError("--fiber-cap " + std::to_string(cap) + " is outside 1..q for q = " + std::to_string(q));
      }
      for (auto n : c.sizes) {
        for (auto cap : c.fiber_caps) {
          if (n > cap * q) throw ConfigError("--size " + std::to_string(n) + " exceeds fiber-cap * q for K = " + std::to_string(cap));
        }
      }
    }
    return;
  }

  if (c.command == "sweep") {
    if (c.kind.empty()) throw ConfigError("sweep needs a kind");
    for (const auto& spec : c.fields) {
      if (random_kind) {
        check_envelope(spec.order());
        continue;
      }
      if (spec.n != 1) throw ConfigError("constructions take a prime --field, got " + spec.to_string());
      if (c.eps.empty()) throw ConfigError("sweep " + c.kind + " needs --eps");
      if ((c.kind == "subspace" || c.kind == "sharpness-subspace") && c.m.empty()) throw ConfigError("sweep " + c.kind + " needs --m");
      if (c.kind == "sharpness-subspace" && c.k.empty()) throw ConfigError("sweep sharpness-subspace needs --k");
      const std::vector<unsigned> ks = c.kind == "sharpness-subspace" ? c.k : std::vector<unsigned>{0};
      const std::vector<unsigned> ms = c.kind == "subspace" || c.kind == "sharpness-subspace" ? c.m : std::vector<unsigned>{0};
      for (auto k : ks) {
        for (auto m : ms) check_envelope(detail::construction_order(c.kind, spec.p, k, m));
      }
    }
    return;
  }

  // audit-fourier
  if (!c.kind.empty()) throw ConfigError("audit-fourier takes no kind");
  if (c.input && !c.fields.empty()) throw ConfigError("audit-fourier takes either --input or a field list");
  for (const auto& spec : c.fields) check_envelope(spec.order());
}

/// Rough cost of the largest pair enumeration a config can trigger, for
/// --allow-large runs.
inline std::string time_estimate(const ExperimentConfig& c) {
  std::uint64_t q = 0;
  for (const auto& f : c.fields) q = std::max(q, f.order());
  if (q == 0) return "no fields given";
  const double pairs = std::pow(static_cast<double>(q), 4.0);
  const double seconds = pairs / 2e8;
  std::ostringstream os;
  os << "largest field q = " << q << ": up to " << pairs << " point pairs per set, roughly " << seconds
     << " s each on one core";
  return os.str();
}

// --- commands ------------------------------------------------------------------

namespace detail {

inline PointSet read_point_set_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  return read_point_set(is);
}

inline Json analysis_json(const PointSet& e, unsigned jobs, bool& passed) {
  const auto profile = distance_profile(e, jobs);
  const auto efib = fiber_energy(e, jobs);
  Json bounds = Json::array();
  for (const auto& b : set_bound_reports(e, profile, efib)) {
    bounds.push_back(to_json(b));
    passed = passed && b.satisfied.value_or(true);
  }
  return {{"size", e.size()},
          {"max_fiber", e.max_fiber()},
          {"fiber_energy", efib},
          {"fiber_energy_bound", fiber_energy_bound(e)},
          {"delta_size", profile.support_size()},
          {"delta_over_q", static_cast<double>(profile.support_size()) / static_cast<double>(e.field().order())},
          {"profile", to_json(profile)},
          {"bounds", bounds}};
}

inline PointSet random_source(const ExperimentConfig& c) {
  const Field field = c.fields.front().make();
  const auto n = c.sizes.front();
  if (c.fiber_caps.empty()) return random_set(field, n, c.seed);
  return random_set_with_fiber_cap(field, n, c.fiber_caps.front(), c.seed);
}

}  // namespace detail

inline RunOutcome cmd_analyze(const ExperimentConfig& c, PhaseTimer& timer) {
  RunOutcome o;
  timer.start("load");
  Json source;
  std::optional<PointSet> e;
  if (c.input) {
    e = detail::read_point_set_file(*c.input);
    const std::uint64_t envelope = c.max_q.value_or(kProfileEnvelope);
    if (e->field().order() > envelope && !c.allow_large) {
      throw ConfigError("q = " + std::to_string(e->field().order()) + " exceeds the envelope q <= " + std::to_string(envelope));
    }
    source = {{"type", "file"}, {"path", *c.input}};
  } else if (c.kind == "random") {
    e = detail::random_source(c);
    source = {{"type", "random"}, {"seed", c.seed}};
  } else {
    const unsigned k = c.k.empty() ? 0 : c.k.front();
    const unsigned m = c.m.empty() ? 0 : c.m.front();
    e = detail::build_construction(c.kind, c.fields.front().p, c.eps.front(), k, m).set;
    source = {{"type", "construction"}, {"kind", c.kind}};
  }
  require_nonempty(*e, "analyze");
  timer.start("compute");
  Json result = detail::analysis_json(*e, c.jobs, o.passed);
  result["source"] = source;
  result["field"] = e->field().to_string();
  o.record["result"] = std::move(result);
  return o;
}

inline RunOutcome cmd_construct(const ExperimentConfig& c, PhaseTimer& timer) {
  RunOutcome o;
  timer.start("build");
  Json result;
  std::optional<ConstructionResult> built;
  if (c.kind == "random") {
    const PointSet e = detail::random_source(c);
    result["construction"] = {{"name", "random"}, {"point_set", point_set_json(e)}, {"applicable", false},
                              {"reason", "random sets carry no predictions"}};
    built = ConstructionResult{"random", e, {}, false, ""};
  } else {
    const unsigned k = c.k.empty() ? 0 : c.k.front();
    const unsigned m = c.m.empty() ? 0 : c.m.front();
    built = detail::build_construction(c.kind, c.fields.front().p, c.eps.front(), k, m);
    result["construction"] = to_json(*built);
  }
  if (c.points_out) {
    std::ofstream os(*c.points_out);
    if (!os) throw ConfigError("cannot write '" + *c.points_out + "'");
    write_point_set(os, built->set);
  }
  if (c.check) {
    timer.start("check");
    if (c.kind != "random") {
      const auto v = verify_construction(*built, c.jobs);
      result["verification"] = to_json(v);
      o.passed = o.passed && v.passed();
    }
    if (!built->set.empty()) {
      bool bounds_ok = true;
      result["analysis"] = detail::analysis_json(built->set, c.jobs, bounds_ok);
      o.passed = o.passed && bounds_ok;
    }
  }
  o.record["result"] = std::move(result);
  return o;
}

/// One seeded (q, trial) point of a verify run.
struct VerifyTrial {
  std::uint64_t q = 0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::uint64_t n_f = 0;
  std::uint64_t k_f = 0;
  std::uint64_t efib = 0;
  std::uint64_t delta = 0;
  std::uint64_t delta_bipartite = 0;
  Rational main_bound;
  CheckTally tally;
};

/// Draws (K, n) for a trial: the lists cycle when given, otherwise K is
/// uniform in 1..q and n uniform in max(K, 2)..Kq.
inline std::pair<std::uint64_t, std::uint64_t> draw_size(Rng& rng, std::uint64_t q, std::uint64_t trial,
                                                        const std::vector<std::uint64_t>& sizes,
                                                        const std::vector<std::uint64_t>& caps) {
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  if (!caps.empty()) k = caps[trial % caps.size()];
  if (!sizes.empty()) n = sizes[trial % sizes.size()];
  if (k == 0 && n == 0) {
    k = rng.between(1, q);
    n = rng.between(std::max<std::uint64_t>(k, 2), k * q);
  } else if (k == 0) {
    k = rng.between((n + q - 1) / q, std::min(n, q));
  } else if (n == 0) {
    n = rng.between(std::max<std::uint64_t>(k, 2), k * q);
  }
  k = std::min(k, n);
  return {k, n};
}

inline VerifyTrial run_verify_trial(const FieldSpec& spec, std::uint64_t base_seed, std::uint64_t trial,
                                    const std::vector<std::uint64_t>& sizes, const std::vector<std::uint64_t>& caps) {
  const Field field = spec.make();
  VerifyTrial t;
  t.q = field.order();
  t.trial = trial;
  t.seed = derive_seed(base_seed, t.q, trial);
  Rng rng(t.seed);
  std::tie(t.k, t.n) = draw_size(rng, t.q, trial, sizes, caps);
  t.k_f = rng.between(1, t.q);
  t.n_f = rng.between(t.k_f, t.k_f * t.q);
  const PointSet e = random_set_with_fiber_cap(field, t.n, t.k, derive_seed(t.seed, 1, 0));
  const PointSet f = random_set_with_fiber_cap(field, t.n_f, t.k_f, derive_seed(t.seed, 2, 0));
  auto inst = check_instance(e);
  auto bip = check_bipartite(e, f);
  t.efib = inst.efib;
  t.delta = inst.delta;
  t.main_bound = inst.main_bound;
  t.delta_bipartite = bip.delta;
  t.tally = std::move(inst.tally);
  t.tally.merge(bip.tally);
  return t;
}

inline Json tally_json(const CheckTally& t) {
  Json out = Json::object();
  for (const auto& [name, c] : t.counts()) out[name] = {{"evaluated", c.evaluated}, {"violations", c.violations}};
  return out;
}

inline RunOutcome cmd_verify(const ExperimentConfig& c, PhaseTimer& timer) {
  RunOutcome o;
  timer.start("compute");
  const std::uint64_t trials = c.trials.value_or(200);
  struct Job {
    std::size_t field;
    std::uint64_t trial;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < c.fields.size(); ++i) {
    for (std::uint64_t t = 0; t < trials; ++t) jobs.push_back({i, t});
  }
  std::vector<VerifyTrial> results(jobs.size());
  parallel_slices(jobs.size(), c.jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t j = begin; j < end; ++j) {
      results[j] = run_verify_trial(c.fields[jobs[j].field], c.seed, jobs[j].trial, c.sizes, c.fiber_caps);
    }
  });

  timer.start("report");
  CheckTally total;
  std::vector<CheckTally> per_field(c.fields.size());
  Json rows = Json::array();
  Json failures = Json::array();
  std::ostringstream csv;
  csv << "q,trial,seed,n,K,nF,KF,efib,delta,main_bound_num,main_bound_den,delta_bipartite,violations\n";
  for (std::size_t j = 0; j < results.size(); ++j) {
    const auto& t = results[j];
    total.merge(t.tally);
    per_field[jobs[j].field].merge(t.tally);
    rows.push_back({{"q", t.q}, {"trial", t.trial}, {"seed", t.seed}, {"n", t.n}, {"K", t.k}, {"nF", t.n_f},
                    {"KF", t.k_f}, {"efib", t.efib}, {"delta", t.delta},
                    {"main_bound", to_string(t.main_bound)}, {"delta_bipartite", t.delta_bipartite},
                    {"violations", t.tally.violations()}});
    csv << t.q << ',' << t.trial << ',' << t.seed << ',' << t.n << ',' << t.k << ',' << t.n_f << ',' << t.k_f << ','
        << t.efib << ',' << t.delta << ',' << numerator(t.main_bound) << ',' << denominator(t.main_bound) << ','
        << t.delta_bipartite << ',' << t.tally.violations() << '\n';
    if (t.tally.violations() > 0) {
      Json names = Json::array();
      for (const auto& [name, cnt] : t.tally.counts()) {
        if (cnt.violations > 0) names.push_back(name);
      }
      failures.push_back({{"q", t.q}, {"trial", t.trial}, {"seed", t.seed}, {"checks", names}});
    }
  }
  Json fields = Json::array();
  for (std::size_t i = 0; i < c.fields.size(); ++i) {
    fields.push_back({{"field", c.fields[i].to_string()}, {"q", c.fields[i].order()}, {"trials", trials},
                      {"checks", tally_json(per_field[i])}});
  }
  o.passed = total.violations() == 0;
  o.record["result"] = {{"fields", fields}, {"checks", tally_json(total)}, {"failures", failures}, {"trials", rows}};
  o.record["summary_extra"] = {{"violations", total.violations()}, {"instances", results.size()}};
  o.csv = csv.str();
  return o;
}

/// One row of a sweep.
struct SweepRow {
  std::string kind;
  std::string params;
  std::uint64_t q = 0;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::uint64_t delta = 0;
  std::optional<Rational> bound;
  bool computed = false;
  bool applicable = false;
  std::optional<BigInt> predicted_delta;
  std::optional<bool> prediction_ok;
  std::string reason;

  bool bound_ok() const { return !computed || !bound || Rational(delta) >= *bound; }
  /// |Δ_P| / bound = |Δ_P| (1 + q²K/n²) / q.
  double ratio() const { return bound ? static_cast<double>(Rational(delta) / *bound) : 0.0; }
};

inline void fill_observed(SweepRow& row, const PointSet& e, unsigned jobs) {
  row.q = e.field().order();
  row.n = e.size();
  row.computed = !e.empty();
  if (!row.computed) return;
  row.k = e.max_fiber();
  row.delta = distance_profile(e, jobs).support_size();
  row.bound = main_lower_bound(BigInt(row.q), BigInt(row.n), BigInt(row.k));
}

inline RunOutcome cmd_sweep(const ExperimentConfig& c, PhaseTimer& timer) {
  RunOutcome o;
  timer.start("compute");
  std::vector<SweepRow> rows;
  for (const auto& spec : c.fields) {
    if (c.kind == "random") {
      const Field field = spec.make();
      const std::uint64_t q = field.order();
      std::vector<std::uint64_t> sizes = c.sizes;
      std::vector<std::uint64_t> caps = c.fiber_caps;
      if (sizes.empty()) sizes = {q, integer_root_floor(BigInt(q * q * q), 2).convert_to<std::uint64_t>(), q * q / 2, q * q};
      if (caps.empty()) caps = {1, integer_root_ceil(BigInt(q), 2).convert_to<std::uint64_t>(), q};
      for (auto n : sizes) {
        for (auto cap : caps) {
          SweepRow row;
          row.kind = "random";
          row.params = "n=" + std::to_string(n) + " K=" + std::to_string(cap);
          row.q = q;
          if (n < 1 || n > q * q || cap < 1 || cap > q || n > cap * q) {
            row.reason = "infeasible: need 1 <= K <= q and 1 <= n <= Kq";
            rows.push_back(std::move(row));
            continue;
          }
          const PointSet e = random_set_with_fiber_cap(field, n, std::min(cap, n), derive_seed(c.seed, q, n * (q + 1) + cap));
          fill_observed(row, e, c.jobs);
          row.reason = "random sets carry no predictions";
          rows.push_back(std::move(row));
        }
      }
      continue;
    }
    const std::vector<unsigned> ks = c.kind == "sharpness-subspace" ? c.k : std::vector<unsigned>{0};
    const std::vector<unsigned> ms = c.kind == "subspace" || c.kind == "sharpness-subspace" ? c.m : std::vector<unsigned>{0};
    for (auto k : ks) {
      for (auto m : ms) {
        for (const auto& eps : c.eps) {
          SweepRow row;
          row.kind = c.kind;
          row.params = "p=" + std::to_string(spec.p) + (k ? " k=" + std::to_string(k) : "") +
                       (m ? " m=" + std::to_string(m) : "") + " eps=" + to_string(eps);
          row.q = detail::construction_order(c.kind, spec.p, k, m);
          try {
            const auto built = detail::build_construction(c.kind, spec.p, eps, k, m);
            fill_observed(row, built.set, c.jobs);
            row.applicable = built.applicable;
            row.reason = built.reason;
            if (built.applicable && built.predicted.delta_size) {
              row.predicted_delta = built.predicted.delta_size;
              row.prediction_ok = BigInt(row.delta) == *built.predicted.delta_size;
            }
          } catch (const Error& e) {
            row.reason = e.what();
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }

  timer.start("report");
  Json jrows = Json::array();
  std::ostringstream csv;
  csv << "kind,params,q,n,K,delta,bound_num,bound_den,ratio,bound_ok,applicable,predicted_delta,prediction_ok,reason\n";
  std::uint64_t violations = 0;
  for (const auto& r : rows) {
    const bool ok = r.bound_ok() && r.prediction_ok.value_or(true);
    if (!ok) ++violations;
    Json jr = {{"kind", r.kind}, {"params", r.params}, {"q", r.q}, {"applicable", r.applicable},
               {"computed", r.computed}, {"reason", r.reason}};
    if (r.computed) {
      jr["n"] = r.n;
      jr["K"] = r.k;
      jr["delta"] = r.delta;
      jr["main_bound"] = to_string(*r.bound);
      jr["ratio"] = r.ratio();
      jr["bound_ok"] = r.bound_ok();
    }
    if (r.predicted_delta) {
      jr["predicted_delta"] = to_json(*r.predicted_delta);
      jr["prediction_ok"] = *r.prediction_ok;
    }
    jrows.push_back(std::move(jr));
    csv << detail::csv_escape(r.kind) << ',' << detail::csv_escape(r.params) << ',' << r.q << ',';
    if (r.computed) {
      csv << r.n << ',' << r.k << ',' << r.delta << ',' << numerator(*r.bound) << ',' << denominator(*r.bound) << ','
          << Json(r.ratio()).dump() << ',' << (r.bound_ok() ? "true" : "false");
    } else {
      csv << ",,,,,,";
    }
    csv << ',' << (r.applicable ? "true" : "false") << ',';
    if (r.predicted_delta) csv << *r.predicted_delta;
    csv << ',';
    if (r.prediction_ok) csv << (*r.prediction_ok ? "true" : "false");
    csv << ',' << detail::csv_escape(r.reason) << '\n';
  }
  o.passed = violations == 0;
  o.record["result"] = {{"rows", jrows}};
  o.record["summary_extra"] = {{"violations", violations}, {"rows", rows.size()}};
  o.csv = csv.str();
  return o;
}

/// Fourier audit of one random set, as used by audit-fourier.
struct FourierTrial {
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  SecondMomentIdentity identity;
  SpectralAudit audit;
};

inline FourierTrial run_fourier_trial(const PointSet& e, std::uint64_t seed) {
  FourierTrial t;
  t.seed = seed;
  t.n = e.size();
  t.identity = second_moment_identity_check(e, e);
  t.audit = spectral_inequality_audit(e, e);
  return t;
}

inline Json fourier_trial_json(const FourierTrial& t) {
  return {{"seed", t.seed},
          {"n", t.n},
          {"second_moment", to_json(t.identity.observed)},
          {"predicted", t.identity.predicted},
          {"identity_relative_error", t.identity.relative_error},
          {"sum_S2_nonzero", t.audit.spectral.sum_s2_nonzero},
          {"sum_U2", t.audit.spectral.sum_u2},
          {"fiber_energy_A", t.audit.fiber_energy_a},
          {"energy_identity_error_u", t.audit.energy_identity_error_u},
          {"energy_identity_error_v", t.audit.energy_identity_error_v},
          {"pointwise_excess", t.audit.pointwise_excess},
          {"cauchy_schwarz_excess", t.audit.cauchy_schwarz_excess},
          {"factorization_deviation", t.audit.spectral.factorization_deviation},
          {"passed", t.identity.passed && t.audit.passed() &&
                         t.audit.spectral.factorization_deviation <= kAggregateTolerance}};
}

inline RunOutcome cmd_audit_fourier(const ExperimentConfig& c, PhaseTimer& timer) {
  RunOutcome o;
  Json failures = Json::array();
  auto note_failures = [&](std::uint64_t q, const FourierTrial& t) {
    auto fail = [&](const char* what, double value) {
      failures.push_back({{"error", error_name(ErrorCode::kToleranceExceeded)}, {"check", what}, {"q", q},
                          {"seed", t.seed}, {"s", t.audit.worst_s}, {"value", value}});
    };
    if (!t.identity.passed) fail("second_moment_identity", t.identity.relative_error);
    if (!t.audit.pointwise_ok()) fail("pointwise", t.audit.pointwise_excess);
    if (!t.audit.cauchy_schwarz_ok()) fail("cauchy_schwarz", t.audit.cauchy_schwarz_excess);
    if (!t.audit.energy_identity_ok()) {
      fail("energy_identity", std::max(t.audit.energy_identity_error_u, t.audit.energy_identity_error_v));
    }
    if (!t.audit.energy_bound_u || !t.audit.energy_bound_v) fail("energy_bound", 0);
    if (t.audit.spectral.factorization_deviation > kAggregateTolerance) {
      fail("factorization", t.audit.spectral.factorization_deviation);
    }
  };

  if (c.input) {
    timer.start("load");
    const PointSet e = detail::read_point_set_file(*c.input);
    require_nonempty(e, "audit-fourier");
    const std::uint64_t envelope = c.max_q.value_or(kFourierEnvelope);
    if (e.field().order() > envelope && !c.allow_large) {
      throw ConfigError("q = " + std::to_string(e.field().order()) + " exceeds the envelope q <= " + std::to_string(envelope));
    }
    timer.start("compute");
    const auto t = run_fourier_trial(e, c.seed);
    note_failures(e.field().order(), t);
    o.record["result"] = {{"field", e.field().to_string()}, {"input", fourier_trial_json(t)}, {"failures", failures}};
    o.passed = failures.empty();
    return o;
  }

  timer.start("compute");
  const std::uint64_t trials = c.trials.value_or(50);
  Json fields = Json::array();
  for (const auto& spec : c.fields) {
    const Field field = spec.make();
    const std::uint64_t q = field.order();
    const Character chi(field);
    const double orth = orthogonality_deviation(chi);
    const double orth_tol = static_cast<double>(q) * kUnitTolerance;
    if (!(orth < orth_tol)) {
      failures.push_back({{"error", error_name(ErrorCode::kToleranceExceeded)}, {"check", "orthogonality"},
                          {"q", q}, {"seed", nullptr}, {"s", nullptr}, {"value", orth}});
    }

    std::vector<double> planch(c.functions);
    parallel_slices(c.functions, c.jobs, [&](std::size_t begin, std::size_t end, unsigned) {
      for (std::size_t i = begin; i < end; ++i) {
        Rng rng(derive_seed(c.seed, q, 0x504c414eULL + i));
        std::vector<ComplexValue> h(q);
        for (auto& v : h) {
          const double re = 2 * rng.unit() - 1;
          const double im = 2 * rng.unit() - 1;
          v = {re, im};
        }
        planch[i] = plancherel_relative_error(chi, h);
      }
    });
    double planch_max = 0;
    for (std::size_t i = 0; i < planch.size(); ++i) {
      planch_max = std::max(planch_max, planch[i]);
      if (!(planch[i] < kUnitTolerance)) {
        failures.push_back({{"error", error_name(ErrorCode::kToleranceExceeded)}, {"check", "plancherel"}, {"q", q},
                            {"seed", derive_seed(c.seed, q, 0x504c414eULL + i)}, {"s", nullptr}, {"value", planch[i]}});
      }
    }

    std::vector<FourierTrial> sets(trials);
    parallel_slices(trials, c.jobs, [&](std::size_t begin, std::size_t end, unsigned) {
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint64_t seed = derive_seed(c.seed, q, i);
        Rng rng(seed);
        const std::uint64_t n = rng.between(1, q * q);
        sets[i] = run_fourier_trial(random_set(field, n, derive_seed(seed, 1, 0)), seed);
      }
    });
    double id_max = 0;
    double pw_max = -1e300;
    double cs_max = -1e300;
    double en_max = 0;
    double fac_max = 0;
    Json per_set = Json::array();
    for (const auto& t : sets) {
      id_max = std::max(id_max, t.identity.relative_error);
      pw_max = std::max(pw_max, t.audit.pointwise_excess);
      cs_max = std::max(cs_max, t.audit.cauchy_schwarz_excess);
      en_max = std::max({en_max, t.audit.energy_identity_error_u, t.audit.energy_identity_error_v});
      fac_max = std::max(fac_max, t.audit.spectral.factorization_deviation);
      note_failures(q, t);
      per_set.push_back(fourier_trial_json(t));
    }
    Json fj = {{"field", field.to_string()},
               {"q", q},
               {"orthogonality_deviation", orth},
               {"orthogonality_tolerance", orth_tol},
               {"plancherel_functions", c.functions},
               {"plancherel_max_relative_error", planch_max},
               {"sets", trials},
               {"identity_max_relative_error", id_max},
               {"energy_identity_max_error", en_max},
               {"factorization_max_deviation", fac_max},
               {"per_set", per_set}};
    if (trials > 0) {
      fj["pointwise_max_excess"] = pw_max;
      fj["cauchy_schwarz_max_excess"] = cs_max;
    }
    fields.push_back(std::move(fj));
  }
  o.passed = failures.empty();
  o.record["result"] = {{"fields", fields}, {"failures", failures}};
  return o;
}

/// Validates and runs a configuration; ConfigError and Error escape for the
/// caller to map to exit code 2.
inline RunOutcome run(const ExperimentConfig& c) {
  PhaseTimer timer;
  timer.start("validate");
  validate(c);
  RunOutcome o;
  if (c.command == "analyze") {
    o = cmd_analyze(c, timer);
  } else if (c.command == "construct") {
    o = cmd_construct(c, timer);
  } else if (c.command == "verify") {
    o = cmd_verify(c, timer);
  } else if (c.command == "sweep") {
    o = cmd_sweep(c, timer);
  } else {
    o = cmd_audit_fourier(c, timer);
  }
  Json result = std::move(o.record["result"]);
  Json summary = {{"passed", o.passed}};
  if (o.record.contains("summary_extra")) summary.update(o.record["summary_extra"]);
  o.record = Json{{"schema", kRunSchema},
                  {"version", PARAFALC_VERSION},
                  {"command", c.command},
                  {"config", to_json(c)},
                  {"result", std::move(result)},
                  {"summary", std::move(summary)},
                  {"timing", timer.json()}};
  return o;
}

/// The record without its "timing" object, for reproducibility comparisons.
inline std::string deterministic_dump(const Json& record) {
  Json copy = record;
  copy.erase("timing");
  return copy.dump();
}

}  // namespace parafalc

#endif  // PARAFALC_HARNESS_HPP
