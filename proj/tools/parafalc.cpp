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

// parafalc: command-line front end for the distance-set experiments.
//
//   parafalc construct grid --field 101 --eps 1/2 --check
//   parafalc verify --q 3,5,7,9 --trials 200 --seed 1
//   parafalc sweep sharpness-subspace --field 3 --k 2 --m 1,2 --eps 1/2 --format csv
//   parafalc audit-fourier --q 3,5,9 --trials 10

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parafalc/harness.hpp"

namespace {

int emit(const parafalc::ExperimentConfig& config, const parafalc::RunOutcome& outcome) {
  const std::string text = config.format == parafalc::OutputFormat::kCsv ? outcome.csv : outcome.record.dump(2) + "\n";
  if (config.out) {
    std::ofstream os(*config.out);
    if (!os || !(os << text)) {
      std::cerr << "parafalc: cannot write '" << *config.out << "'\n";
      return 2;
    }
  } else {
    std::cout << text;
  }
  return parafalc::exit_code_for(outcome);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parabolic distance sets over finite fields"};
  app.set_version_flag("--version", PARAFALC_VERSION);

  parafalc::ExperimentConfig config;
  std::vector<std::string> field_specs;
  std::vector<std::uint64_t> orders;
  std::vector<std::string> eps_text;
  std::string format = "json";
  std::string input;
  std::string out;
  std::string points;
  std::uint64_t trials = 0;

  app.add_option("command", config.command, "analyze | construct | verify | sweep | audit-fourier")->required();
  app.add_option("kind", config.kind, "grid | subspace | sharpness-grid | sharpness-subspace | random");
  app.add_option("--field", field_specs, "p[,n[,modulus]], repeatable");
  app.add_option("--q", orders, "comma list of odd prime powers, default moduli")->delimiter(',');
  app.add_option("--eps", eps_text, "A/B, comma list for sweep")->delimiter(',');
  app.add_option("--k", config.k, "extension degree k")->delimiter(',');
  app.add_option("--m", config.m, "subfield degree m")->delimiter(',');
  app.add_option("--size", config.sizes, "set size |E|")->delimiter(',');
  app.add_option("--fiber-cap", config.fiber_caps, "largest vertical fiber K")->delimiter(',');
  auto* trials_opt = app.add_option("--trials", trials, "random instances per field");
  app.add_option("--functions", config.functions, "random functions per field for the Plancherel check");
  app.add_option("--seed", config.seed, "base seed");
  app.add_flag("--check", config.check, "verify the construction exhaustively");
  app.add_option("--jobs", config.jobs, "worker threads")->check(CLI::Range(1U, 1024U));
  app.add_option("--input", input, "point-set file");
  app.add_option("--out", out, "output path (default stdout)");
  app.add_option("--points", points, "construct: also write the point-set file here");
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--allow-large", config.allow_large, "lift the desk-scale envelope on q");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& s : field_specs) config.fields.push_back(parafalc::parse_field_spec(s));
    for (auto q : orders) {
      const auto pp = parafalc::as_prime_power(q);
      if (!pp) throw parafalc::ConfigError("--q " + std::to_string(q) + " is not a prime power");
      config.fields.push_back({pp->prime, pp->exponent, std::nullopt});
    }
    for (const auto& e : eps_text) {
      try {
        config.eps.push_back(parafalc::parse_rational(e));
      } catch (const parafalc::Error& err) {
        throw parafalc::ConfigError(std::string("--eps: ") + err.what());
      }
    }
    if (*trials_opt) config.trials = trials;
    if (!input.empty()) config.input = input;
    if (!out.empty()) config.out = out;
    if (!points.empty()) config.points_out = points;
    config.format = format == "csv" ? parafalc::OutputFormat::kCsv : parafalc::OutputFormat::kJson;
    config.max_q = parafalc::envelope_from_env();
    if (config.allow_large) std::cerr << "parafalc: " << parafalc::time_estimate(config) << '\n';

    const auto outcome = parafalc::run(config);
    return emit(config, outcome);
  } catch (const parafalc::ConfigError& e) {
    std::cerr << "parafalc: configuration error: " << e.what() << '\n';
  } catch (const parafalc::Error& e) {
    std::cerr << "parafalc: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "parafalc: " << e.what() << '\n';
  }
  return 2;
}
