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
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthonoise/boundary.hpp"
#include "orthonoise/dpp.hpp"
#include "orthonoise/game.hpp"
#include "orthonoise/geometry.hpp"

namespace orthonoise {

// Rejected configuration, naming the offending key path (e.g.
// "problem.domain.radius").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct DomainConfig {
  std::string kind = "ball";
  std::vector<double> center{0.0, 0.0};
  double radius = 1.0;
  std::vector<double> lo;
  std::vector<double> hi;
  double inner_radius = 0.5;
  double outer_radius = 1.5;
};

struct BoundaryConfig {
  std::string family = "affine";
  double value = 0.0;              // constant
  std::vector<double> a{1.0, 0.0};  // affine
  double b = 0.0;
  std::vector<double> center{0.0, 0.0};  // quadratic, radial_pharmonic
  double scale = 1.0;
  double offset = 0.0;
  double p = 2.0;                        // radial_pharmonic
  std::vector<double> vertex{0.0, 0.0};  // cone
  double slope = 1.0;
  std::vector<std::vector<double>> points;  // tabulated
  std::vector<double> values;
  double lipschitz = 0.0;
};

struct StrategyConfig {
  std::string kind = "uniform_random";
  std::vector<double> target;  // pull_toward
};

struct GameConfig {
  std::size_t runs = 10000;
  std::uint64_t seed = 0;
  std::size_t cap = kDefaultCap;
  StrategyConfig first{"greedy_max", {}};
  StrategyConfig second{"greedy_min", {}};
  std::vector<std::vector<double>> points{{0.0, 0.0}};
  std::string solution_dir;
  std::size_t trajectories = 0;  // games per point dumped to trajectories.jsonl
};

struct VerifyConfig {
  std::size_t trials = 100;
  std::size_t lipschitz_trials = 50;
  bool games = true;
  std::vector<std::vector<double>> bracket_points;
  std::size_t bracket_runs = 20000;
  std::size_t supermartingale_trajectories = 10000;
  std::size_t bins_per_axis = 10;
  std::size_t min_samples = 200;
  std::size_t termination_runs = 10000;
  bool negative_control = false;
};

struct SweepConfig {
  std::string axis = "epsilon";
  std::vector<double> values{0.4, 0.2, 0.1};
  bool reference = true;
};

struct RunConfig {
  std::size_t n = 2;
  std::optional<double> p = 2.0;  // empty: alpha_zero
  double epsilon = 0.3;
  DomainConfig domain;
  BoundaryConfig boundary;
  double h = 0.0;
  std::size_t directions = 0;  // 0: 16 for n = 2, 32 for n = 3
  std::size_t quadrature = 8;
  double tol = 1e-7;
  std::size_t max_iter = 100000;
  unsigned workers = 1;
  GameConfig game;
  VerifyConfig verify;
  SweepConfig sweep;
  std::string output = "out";
};

namespace detail {

// Walks one JSON object, remembering which keys were read so that unknown
// keys can be reported.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where(), "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const nlohmann::json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const auto* v = get(key)) {
      if (!v->is_number()) throw ConfigError(key_path(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(key_path(key), "must be finite");
    }
  }

  template <typename Int>
  void count(const std::string& key, Int& out) {
    if (const auto* v = get(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0)
        throw ConfigError(key_path(key), "expected a nonnegative integer");
      out = v->get<Int>();
    }
  }

  void flag(const std::string& key, bool& out) {
    if (const auto* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError(key_path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const auto* v = get(key)) {
      if (!v->is_string()) throw ConfigError(key_path(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void vector(const std::string& key, std::vector<double>& out) {
    if (const auto* v = get(key)) out = read_vector(*v, key_path(key));
  }

  void vectors(const std::string& key, std::vector<std::vector<double>>& out) {
    if (const auto* v = get(key)) {
      if (!v->is_array()) throw ConfigError(key_path(key), "expected an array of points");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(read_vector((*v)[i], key_path(key) + "[" + std::to_string(i) + "]"));
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()), "unknown key");
  }

  static std::vector<double> read_vector(const nlohmann::json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(path, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void check(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

inline void check_dim(const std::vector<double>& v, std::size_t n, const std::string& path) {
  check(v.size() == n, path, "expected " + std::to_string(n) + " coordinates");
  for (double x : v) check(std::isfinite(x), path, "coordinates must be finite");
}

inline StrategyConfig read_strategy(const nlohmann::json& j, const std::string& path) {
  StrategyConfig s;
  ObjectReader r(j, path);
  r.text("kind", s.kind);
  r.vector("target", s.target);
  r.finish();
  return s;
}

}  // namespace detail

// Checks every module precondition that can be decided from the
// configuration alone.
inline void validate(const RunConfig& c) {
  using detail::check;
  using detail::check_dim;
  check(c.n == 2 || c.n == 3, "problem.n", "dimension must be 2 or 3");
  if (c.p) check(*c.p > 1.0 && std::isfinite(*c.p), "problem.p", "p must lie in (1, inf) or be \"alpha_zero\"");
  check(c.epsilon > 0.0, "problem.epsilon", "must be positive");

  const auto& d = c.domain;
  if (d.kind == "ball") {
    check_dim(d.center, c.n, "problem.domain.center");
    check(d.radius > 0.0, "problem.domain.radius", "must be positive");
  } else if (d.kind == "box") {
    check_dim(d.lo, c.n, "problem.domain.lo");
    check_dim(d.hi, c.n, "problem.domain.hi");
    for (std::size_t i = 0; i < c.n; ++i) check(d.lo[i] < d.hi[i], "problem.domain.hi", "requires lo < hi on every axis");
  } else if (d.kind == "annulus") {
    check_dim(d.center, c.n, "problem.domain.center");
    check(d.inner_radius > 0.0, "problem.domain.inner_radius", "must be positive");
    check(d.outer_radius > d.inner_radius, "problem.domain.outer_radius", "must exceed inner_radius");
  } else {
    throw ConfigError("problem.domain.kind", "unknown domain kind '" + d.kind + "'");
  }

  const auto& b = c.boundary;
  const std::string bp = "problem.boundary.";
  if (b.family == "constant") {
  } else if (b.family == "affine") {
    check_dim(b.a, c.n, bp + "a");
  } else if (b.family == "quadratic") {
    check_dim(b.center, c.n, bp + "center");
  } else if (b.family == "radial_pharmonic") {
    check_dim(b.center, c.n, bp + "center");
    check(b.p > 1.0, bp + "p", "p must exceed 1");
  } else if (b.family == "cone") {
    check_dim(b.vertex, c.n, bp + "vertex");
  } else if (b.family == "tabulated") {
    check(!b.points.empty(), bp + "points", "needs at least one point");
    check(b.points.size() == b.values.size(), bp + "values", "needs one value per point");
    for (std::size_t i = 0; i < b.points.size(); ++i) check_dim(b.points[i], c.n, bp + "points[" + std::to_string(i) + "]");
    check(b.lipschitz >= 0.0, bp + "lipschitz", "must be nonnegative");
  } else {
    throw ConfigError(bp + "family", "unknown boundary family '" + b.family + "'");
  }

  check(c.h >= 0.0 && c.h <= c.epsilon / 4.0 * (1.0 + 1e-12), "numerics.h", "must satisfy 0 < h <= epsilon / 4 (0 selects epsilon / 8)");
  check(c.directions == 0 || (c.directions >= 2 && c.directions % 2 == 0), "numerics.directions",
        "must be an even count >= 2 (0 selects the default)");
  if (c.n == 3) check(c.directions == 0 || c.directions >= 6, "numerics.directions", "must be >= 6 in three dimensions");
  check(c.quadrature >= 1, "numerics.quadrature", "must be at least 1");
  check(c.tol > 0.0, "numerics.tol", "must be positive");
  check(c.max_iter >= 1, "numerics.max_iter", "must be at least 1");
  check(c.workers >= 1, "numerics.workers", "must be at least 1");

  const auto& g = c.game;
  check(g.runs >= kMinPlayouts, "game.runs", "at least 100 playouts are required");
  check(g.cap >= 1, "game.cap", "must be at least 1");
  auto strategy = [&](const StrategyConfig& s, const std::string& path) {
    static const std::set<std::string> kinds{"greedy_max", "greedy_min", "pull_toward", "uniform_random"};
    check(kinds.count(s.kind) == 1, path + ".kind", "unknown strategy '" + s.kind + "'");
    if (s.kind == "pull_toward") check_dim(s.target, c.n, path + ".target");
  };
  strategy(g.first, "game.first");
  strategy(g.second, "game.second");
  check(!g.points.empty(), "game.points", "needs at least one start point");
  for (std::size_t i = 0; i < g.points.size(); ++i) check_dim(g.points[i], c.n, "game.points[" + std::to_string(i) + "]");

  const auto& v = c.verify;
  check(v.trials >= 1, "verify.trials", "must be at least 1");
  check(v.lipschitz_trials >= 1, "verify.lipschitz_trials", "must be at least 1");
  for (std::size_t i = 0; i < v.bracket_points.size(); ++i)
    check_dim(v.bracket_points[i], c.n, "verify.bracket_points[" + std::to_string(i) + "]");
  check(v.bracket_runs >= kMinPlayouts, "verify.bracket_runs", "at least 100 playouts are required");
  check(v.termination_runs >= kMinPlayouts, "verify.termination_runs", "at least 100 playouts are required");
  check(v.supermartingale_trajectories >= 1, "verify.supermartingale_trajectories", "must be at least 1");
  check(v.bins_per_axis >= 1, "verify.bins_per_axis", "must be at least 1");

  static const std::set<std::string> axes{"epsilon", "h", "M", "K", "p"};
  check(axes.count(c.sweep.axis) == 1, "sweep.axis", "must be one of epsilon, h, M, K, p");
  check(!c.sweep.values.empty(), "sweep.values", "needs at least one value");
  check(!c.output.empty(), "output", "must name a directory");
}

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::ObjectReader;
  RunConfig c;
  ObjectReader root(j, "");
  if (const auto* pj = root.get("problem")) {
    ObjectReader r(*pj, "problem");
    r.count("n", c.n);
    if (const auto* p = r.get("p")) {
      if (p->is_string() && p->get<std::string>() == "alpha_zero") c.p.reset();
      else if (p->is_number()) c.p = p->get<double>();
      else throw ConfigError("problem.p", "expected a number or \"alpha_zero\"");
    }
    r.number("epsilon", c.epsilon);
    // Default centres follow the dimension.
    c.domain.center.assign(c.n, 0.0);
    c.boundary.a.assign(c.n, 0.0);
    c.boundary.a[0] = 1.0;
    c.boundary.center.assign(c.n, 0.0);
    c.boundary.vertex.assign(c.n, 0.0);
    if (const auto* dj = r.get("domain")) {
      ObjectReader d(*dj, "problem.domain");
      d.text("kind", c.domain.kind);
      d.vector("center", c.domain.center);
      d.number("radius", c.domain.radius);
      d.vector("lo", c.domain.lo);
      d.vector("hi", c.domain.hi);
      d.number("inner_radius", c.domain.inner_radius);
      d.number("outer_radius", c.domain.outer_radius);
      d.finish();
    }
    if (const auto* bj = r.get("boundary")) {
      ObjectReader b(*bj, "problem.boundary");
      auto& B = c.boundary;
      b.text("family", B.family);
      b.number("value", B.value);
      b.vector("a", B.a);
      b.number("b", B.b);
      b.vector("center", B.center);
      b.number("scale", B.scale);
      b.number("offset", B.offset);
      b.number("p", B.p);
      b.vector("vertex", B.vertex);
      b.number("slope", B.slope);
      b.vectors("points", B.points);
      b.vector("values", B.values);
      b.number("lipschitz", B.lipschitz);
      b.finish();
    }
    r.finish();
  }
  c.game.points.assign(1, std::vector<double>(c.n, 0.0));
  if (const auto* nj = root.get("numerics")) {
    ObjectReader r(*nj, "numerics");
    r.number("h", c.h);
    r.count("directions", c.directions);
    r.count("quadrature", c.quadrature);
    r.number("tol", c.tol);
    r.count("max_iter", c.max_iter);
    r.count("workers", c.workers);
    r.finish();
  }
  if (const auto* gj = root.get("game")) {
    ObjectReader r(*gj, "game");
    r.count("runs", c.game.runs);
    r.count("seed", c.game.seed);
    r.count("cap", c.game.cap);
    if (const auto* s = r.get("first")) c.game.first = detail::read_strategy(*s, "game.first");
    if (const auto* s = r.get("second")) c.game.second = detail::read_strategy(*s, "game.second");
    r.vectors("points", c.game.points);
    r.text("solution_dir", c.game.solution_dir);
    r.count("trajectories", c.game.trajectories);
    r.finish();
  }
  if (const auto* vj = root.get("verify")) {
    ObjectReader r(*vj, "verify");
    r.count("trials", c.verify.trials);
    r.count("lipschitz_trials", c.verify.lipschitz_trials);
    r.flag("games", c.verify.games);
    r.vectors("bracket_points", c.verify.bracket_points);
    r.count("bracket_runs", c.verify.bracket_runs);
    r.count("supermartingale_trajectories", c.verify.supermartingale_trajectories);
    r.count("bins_per_axis", c.verify.bins_per_axis);
    r.count("min_samples", c.verify.min_samples);
    r.count("termination_runs", c.verify.termination_runs);
    r.flag("negative_control", c.verify.negative_control);
    r.finish();
  }
  if (const auto* sj = root.get("sweep")) {
    ObjectReader r(*sj, "sweep");
    r.text("axis", c.sweep.axis);
    r.vector("values", c.sweep.values);
    r.flag("reference", c.sweep.reference);
    r.finish();
  }
  root.text("output", c.output);
  root.finish();
  validate(c);
  return c;
}

inline nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  json domain{{"kind", c.domain.kind}};
  if (c.domain.kind == "ball") domain["center"] = c.domain.center, domain["radius"] = c.domain.radius;
  if (c.domain.kind == "box") domain["lo"] = c.domain.lo, domain["hi"] = c.domain.hi;
  if (c.domain.kind == "annulus")
    domain["center"] = c.domain.center, domain["inner_radius"] = c.domain.inner_radius,
    domain["outer_radius"] = c.domain.outer_radius;

  const auto& B = c.boundary;
  json boundary{{"family", B.family}};
  if (B.family == "constant") boundary["value"] = B.value;
  if (B.family == "affine") boundary["a"] = B.a, boundary["b"] = B.b;
  if (B.family == "quadratic" || B.family == "radial_pharmonic")
    boundary["center"] = B.center, boundary["scale"] = B.scale, boundary["offset"] = B.offset;
  if (B.family == "radial_pharmonic") boundary["p"] = B.p;
  if (B.family == "cone") boundary["vertex"] = B.vertex, boundary["slope"] = B.slope, boundary["offset"] = B.offset;
  if (B.family == "tabulated") boundary["points"] = B.points, boundary["values"] = B.values, boundary["lipschitz"] = B.lipschitz;

  auto strategy = [](const StrategyConfig& s) {
    json j{{"kind", s.kind}};
    if (s.kind == "pull_toward") j["target"] = s.target;
    return j;
  };
  return {
      {"problem",
       {{"n", c.n}, {"p", c.p ? json(*c.p) : json("alpha_zero")}, {"epsilon", c.epsilon}, {"domain", domain},
        {"boundary", boundary}}},
      {"numerics",
       {{"h", c.h}, {"directions", c.directions}, {"quadrature", c.quadrature}, {"tol", c.tol},
        {"max_iter", c.max_iter}, {"workers", c.workers}}},
      {"game",
       {{"runs", c.game.runs}, {"seed", c.game.seed}, {"cap", c.game.cap}, {"first", strategy(c.game.first)},
        {"second", strategy(c.game.second)}, {"points", c.game.points}, {"solution_dir", c.game.solution_dir},
        {"trajectories", c.game.trajectories}}},
      {"verify",
       {{"trials", c.verify.trials}, {"lipschitz_trials", c.verify.lipschitz_trials}, {"games", c.verify.games},
        {"bracket_points", c.verify.bracket_points}, {"bracket_runs", c.verify.bracket_runs},
        {"supermartingale_trajectories", c.verify.supermartingale_trajectories},
        {"bins_per_axis", c.verify.bins_per_axis}, {"min_samples", c.verify.min_samples},
        {"termination_runs", c.verify.termination_runs}, {"negative_control", c.verify.negative_control}}},
      {"sweep", {{"axis", c.sweep.axis}, {"values", c.sweep.values}, {"reference", c.sweep.reference}}},
      {"output", c.output}};
}

template <std::size_t N>
Vec<N> to_vec(const std::vector<double>& v) {
  require(v.size() == N, "coordinate count does not match the dimension");
  Vec<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = v[i];
  return out;
}

template <std::size_t N>
Domain<N> make_domain(const DomainConfig& d) {
  if (d.kind == "box") return Domain<N>::box(to_vec<N>(d.lo), to_vec<N>(d.hi));
  if (d.kind == "annulus") return Domain<N>::annulus(to_vec<N>(d.center), d.inner_radius, d.outer_radius);
  return Domain<N>::ball(to_vec<N>(d.center), d.radius);
}

template <std::size_t N>
BoundarySpec<N> make_boundary(const BoundaryConfig& b) {
  if (b.family == "constant") return BoundarySpec<N>::constant(b.value);
  if (b.family == "quadratic") return BoundarySpec<N>::quadratic(to_vec<N>(b.center), b.scale, b.offset);
  if (b.family == "radial_pharmonic")
    return BoundarySpec<N>::radial_pharmonic(to_vec<N>(b.center), b.p, b.scale, b.offset);
  if (b.family == "cone") return BoundarySpec<N>::cone(to_vec<N>(b.vertex), b.slope, b.offset);
  if (b.family == "tabulated") {
    std::vector<Vec<N>> pts;
    for (const auto& p : b.points) pts.push_back(to_vec<N>(p));
    return BoundarySpec<N>::tabulated(std::move(pts), b.values, b.lipschitz);
  }
  return BoundarySpec<N>::affine(to_vec<N>(b.a), b.b);
}

template <std::size_t N>
ProblemSpec<N> make_problem_spec(const RunConfig& c) {
  ProblemSpec<N> s;
  s.p = c.p;
  s.epsilon = c.epsilon;
  s.domain = make_domain<N>(c.domain);
  s.boundary = make_boundary<N>(c.boundary);
  s.h = c.h;
  if (c.directions != 0) s.directions = c.directions;
  s.quadrature = c.quadrature;
  s.workers = c.workers;
  return s;
}

}  // namespace orthonoise
