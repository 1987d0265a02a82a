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
 * @file io.hpp
 * @brief Text and JSON forms of fields, point sets and reports.
 *
 * Point-set files:
 *
 *     3^2/[1,0,1]
 *     ([0,0],[1,2])
 *     ([1,0],[0,0])
 *
 * The first non-blank line is the field; each further line is one point.
 * Lines starting with '#' are ignored. Big integers that do not fit in a
 * signed 64-bit JSON number are written as decimal strings.
 */

#ifndef PARAFALC_IO_HPP
#define PARAFALC_IO_HPP

#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parafalc/bounds.hpp"
#include "parafalc/constructions.hpp"
#include "parafalc/energy.hpp"
#include "parafalc/field.hpp"
#include "parafalc/fourier.hpp"
#include "parafalc/geometry.hpp"

namespace parafalc {

using Json = nlohmann::json;

inline Json to_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return v.convert_to<std::int64_t>();
  }
  return v.str();
}

inline std::string point_to_string(const Field& f, Point pt) {
  return "(" + f.element_to_string(pt.x1) + "," + f.element_to_string(pt.x2) + ")";
}

/// Parses "([c...],[c...])".
inline Point parse_point(const Field& f, std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
    throw Error(ErrorCode::kParseError, "expected ([..],[..]), got '" + std::string(text) + "'");
  }
  const std::string_view inner = text.substr(1, text.size() - 2);
  const auto split = inner.find("],");
  if (split == std::string_view::npos) throw Error(ErrorCode::kParseError, "bad point '" + std::string(text) + "'");
  return {f.parse_element(inner.substr(0, split + 1)), f.parse_element(inner.substr(split + 2))};
}

inline void write_point_set(std::ostream& os, const PointSet& e) {
  os << e.field().to_string() << '\n';
  for (const auto& pt : e.points()) os << point_to_string(e.field(), pt) << '\n';
}

inline std::string point_set_to_string(const PointSet& e) {
  std::ostringstream os;
  write_point_set(os, e);
  return os.str();
}

/// Reads a point-set file; a file without a field header is an EmptySet error.
inline PointSet read_point_set(std::istream& is) {
  std::string line;
  std::optional<Field> field;
  std::vector<Point> pts;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view view(line);
    while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) view.remove_prefix(1);
    if (view.empty() || view == "\r" || view.front() == '#') continue;
    try {
      if (!field) {
        field = Field::parse(view);
      } else {
        pts.push_back(parse_point(*field, view));
      }
    } catch (const Error& err) {
      throw Error(err.code(), "line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  if (!field) throw Error(ErrorCode::kEmptySet, "point-set input has no field header and no points");
  return PointSet(*field, std::move(pts));
}

inline Json point_set_json(const PointSet& e) {
  Json pts = Json::array();
  for (const auto& pt : e.points()) pts.push_back(point_to_string(e.field(), pt));
  return {{"field", e.field().to_string()}, {"points", pts}};
}

inline Json to_json(const DistanceProfile& d) {
  return {{"q", d.field.order()},
          {"nu", d.nu},
          {"support_size", d.support_size()},
          {"second_moment", to_json(d.second_moment())}};
}

inline Json to_json(const EnergyReport& r) {
  return {{"value", r.value}, {"trivial_bound", r.trivial_bound}, {"sizes", {r.size_p, r.size_q}}};
}

inline Json to_json(const BoundReport& r) {
  Json inputs = Json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = to_json(v);
  Json out = {{"name", r.name},
              {"direction", r.direction == BoundDirection::kLower ? "lower" : "upper"},
              {"inputs", inputs}};
  if (r.bound) {
    out["bound_num"] = to_json(numerator(*r.bound));
    out["bound_den"] = to_json(denominator(*r.bound));
  } else {
    out["bound_num"] = nullptr;
    out["bound_den"] = nullptr;
    out["form"] = "squared";
  }
  out["observed"] = r.observed ? to_json(*r.observed) : Json(nullptr);
  out["satisfied"] = r.satisfied ? Json(*r.satisfied) : Json(nullptr);
  return out;
}

inline Json complex_array(const std::vector<ComplexValue>& v) {
  Json out = Json::array();
  for (const auto& c : v) out.push_back({c.real(), c.imag()});
  return out;
}

inline Json to_json(const SpectralReport& r) {
  return {{"q", r.field.order()},
          {"sizes", {r.size_a, r.size_b}},
          {"S", complex_array(r.s_direct)},
          {"S_factored", complex_array(r.s_factored)},
          {"U", r.u},
          {"V", r.v},
          {"sum_S2_nonzero", r.sum_s2_nonzero},
          {"sum_U2", r.sum_u2},
          {"sum_V2", r.sum_v2},
          {"factorization_deviation", r.factorization_deviation}};
}

inline Json to_json(const Predictions& p) {
  Json out = {{"size", to_json(p.size)}, {"max_fiber", to_json(p.max_fiber)}};
  if (p.delta_size) out["delta_size"] = to_json(*p.delta_size);
  if (p.delta_upper) out["delta_upper"] = to_json(*p.delta_upper);
  if (p.container) {
    Json basis = Json::array();
    for (auto b : p.container->basis()) basis.push_back(p.container->field().element_to_string(b));
    out["container"] = {{"basis", basis}, {"size", p.container->size()}, {"exact", p.container_is_exact}};
  }
  if (p.relation) {
    out["size_relation"] = {{"lhs", to_json(p.relation->first)},
                            {"rhs", to_json(p.relation->second)},
                            {"asserted", p.relation_is_exact}};
  }
  if (p.size_ratio) out["size_ratio"] = *p.size_ratio;
  for (const auto& [k, v] : p.parameters) out["parameters"][k] = to_json(v);
  return out;
}

inline Json to_json(const ConstructionResult& r) {
  return {{"name", r.name},
          {"point_set", point_set_json(r.set)},
          {"predicted", to_json(r.predicted)},
          {"applicable", r.applicable},
          {"reason", r.reason}};
}

inline Json to_json(const ConstructionVerification& v) {
  Json checks = Json::array();
  for (const auto& c : v.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"size", v.size},
          {"max_fiber", v.max_fiber},
          {"delta_size", v.delta_size},
          {"checks", checks},
          {"passed", v.passed()}};
}

}  // namespace parafalc

#endif  // PARAFALC_IO_HPP
