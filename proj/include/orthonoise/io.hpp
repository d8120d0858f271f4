// Copyright 2026 The Orthonoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthonoise/error.hpp"
#include "orthonoise/field.hpp"
#include "orthonoise/game.hpp"
#include "orthonoise/solver.hpp"

namespace orthonoise {

using json = nlohmann::json;

// 17 significant digits: enough to round-trip any double.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <std::size_t N>
json to_json(const Vec<N>& v) {
  json j = json::array();
  for (double c : v) j.push_back(c);
  return j;
}

template <std::size_t N>
Vec<N> vec_from_json(const json& j) {
  require(j.is_array() && j.size() == N, "expected a point with " + std::to_string(N) + " coordinates");
  Vec<N> v{};
  for (std::size_t i = 0; i < N; ++i) v[i] = j[i].get<double>();
  return v;
}

// CSV: x1,...,xn,region,value for every lattice node in row-major order.
template <std::size_t N>
void write_field_csv(std::ostream& os, const ScalarField<N>& field) {
  for (std::size_t a = 0; a < N; ++a) os << 'x' << (a + 1) << ',';
  os << "region,value\n";
  for (std::size_t l = 0; l < field.size(); ++l) {
    const auto x = field.grid().position(l);
    for (std::size_t a = 0; a < N; ++a) os << format_double(x[a]) << ',';
    os << to_string(field.region(l)) << ',' << format_double(field[l]) << '\n';
  }
}

// Reads values back onto a known lattice; coordinates and regions must
// match it.
template <std::size_t N>
ScalarField<N> read_field_csv(std::istream& is, std::shared_ptr<const Lattice<N>> lattice) {
  ScalarField<N> field(lattice, 0.0);
  std::string line;
  std::string expected;
  for (std::size_t a = 0; a < N; ++a) expected += "x" + std::to_string(a + 1) + ",";
  expected += "region,value";
  require(static_cast<bool>(std::getline(is, line)) && line == expected, "field CSV header mismatch");
  std::size_t l = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    require(l < field.size(), "field CSV has more rows than the lattice");
    std::stringstream ss(line);
    std::string cell;
    const auto x = field.grid().position(l);
    for (std::size_t a = 0; a < N; ++a) {
      std::getline(ss, cell, ',');
      const double c = std::strtod(cell.c_str(), nullptr);
      require(std::abs(c - x[a]) <= 1e-9 * field.grid().h, "field CSV coordinates do not match the lattice");
    }
    std::getline(ss, cell, ',');
    require(region_from_string(cell) == field.region(l), "field CSV region does not match the lattice");
    std::getline(ss, cell, ',');
    field[l] = std::strtod(cell.c_str(), nullptr);
    ++l;
  }
  require(l == field.size(), "field CSV has fewer rows than the lattice");
  return field;
}

template <std::size_t N>
json solution_summary(const Solution<N>& s, const Problem<N>& problem, double tol) {
  const auto& spec = problem.spec();
  json j;
  j["gap"] = s.gap;
  j["gap_tol"] = s.gap_tol;
  j["gap_node"] = to_json(s.lower.grid().position(s.gap_node));
  j["residual_lower"] = s.residual_lower;
  j["residual_upper"] = s.residual_upper;
  j["iterations_lower"] = s.iterations_lower;
  j["iterations_upper"] = s.iterations_upper;
  j["converged"] = s.converged();
  j["certified"] = s.certified();
  j["p"] = spec.p ? json(*spec.p) : json(nullptr);
  j["alpha"] = problem.coeffs().alpha;
  j["beta"] = problem.coeffs().beta;
  j["n"] = N;
  j["epsilon"] = spec.epsilon;
  j["M"] = spec.directions;
  j["K"] = spec.quadrature;
  j["h"] = problem.h();
  j["tol"] = tol;
  j["inf_F"] = problem.inf_F();
  j["sup_F"] = problem.sup_F();
  return j;
}

inline json to_json(const ValueEstimate& e) {
  return {{"mean", e.mean},           {"std_error", e.std_error},
          {"ci95", e.ci95},           {"runs", e.runs},
          {"truncated", e.truncated}, {"truncation_fraction", e.truncation_fraction},
          {"mean_turns", e.mean_turns}, {"valid", e.valid}};
}

inline json to_json(const ExitTimeStats& s) {
  return {{"radius", s.radius},         {"block", s.block},   {"survival", s.survival},
          {"theta", s.theta},           {"runs", s.runs},     {"truncated", s.truncated},
          {"max_turns", s.max_turns},   {"mean_turns", s.mean_turns}};
}

// One JSON object per turn.
template <std::size_t N>
void write_trajectory_jsonl(std::ostream& os, const Trajectory<N>& t, const json& tag = json::object()) {
  for (const auto& r : t.turns) {
    json j = tag;
    j["turn"] = r.turn;
    j["x"] = to_json(r.position);
    j["coin"] = to_string(r.coin);
    j["move_kind"] = to_string(r.kind);
    j["status"] = to_string(r.status);
    os << j.dump() << '\n';
  }
}

}  // namespace orthonoise
