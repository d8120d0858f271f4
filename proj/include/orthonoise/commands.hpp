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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthonoise/config.hpp"
#include "orthonoise/io.hpp"
#include "orthonoise/solver.hpp"
#include "orthonoise/verify.hpp"

namespace orthonoise {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailure = 1,
  kExitNonConvergence = 2,
  kExitMissingArtifact = 3,
  kExitInvalidConfig = 4,
};

struct CommandOptions {
  std::filesystem::path out;  // empty: the config's output directory
  bool quiet = false;
};

class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::filesystem::path output_dir(const RunConfig& c, const CommandOptions& o) {
  std::filesystem::path dir = o.out.empty() ? std::filesystem::path(c.output) : o.out;
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

template <std::size_t N>
void write_field(const std::filesystem::path& path, const ScalarField<N>& f) {
  std::ofstream os(path);
  write_field_csv(os, f);
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

template <std::size_t N>
ScalarField<N> load_field(const std::filesystem::path& path, const Problem<N>& problem) {
  std::ifstream is(path);
  if (!is) throw MissingArtifact("missing solution field " + path.string());
  try {
    return read_field_csv<N>(is, problem.lattice());
  } catch (const ContractViolation& e) {
    throw MissingArtifact(path.string() + " does not match the configured problem: " + e.what());
  }
}

template <std::size_t N>
void check_points(const std::vector<std::vector<double>>& pts, const Problem<N>& problem, const std::string& key,
                  bool interior) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Region r = problem.region(to_vec<N>(pts[i]));
    if (interior ? !in_domain(r) : !in_thickened(r))
      throw ConfigError(key + "[" + std::to_string(i) + "]",
                        interior ? "point must lie in the domain" : "point must lie in the thickened domain");
  }
}

inline nlohmann::json provenance(const RunConfig& c) { return {{"config", to_json(c)}, {"seed", c.game.seed}}; }

}  // namespace detail

template <std::size_t N>
int cmd_solve(const RunConfig& c, const CommandOptions& o, std::ostream& log = std::cout) {
  const Problem<N> problem(make_problem_spec<N>(c));
  const auto s = solve(problem, c.tol, c.max_iter);
  const auto dir = detail::output_dir(c, o);
  detail::write_field(dir / "lower.csv", s.lower);
  detail::write_field(dir / "upper.csv", s.upper);
  auto summary = solution_summary(s, problem, c.tol);
  summary.update(detail::provenance(c));
  detail::write_json(dir / "summary.json", summary);
  if (!o.quiet)
    log << "gap " << format_double(s.gap) << " (tol " << format_double(s.gap_tol) << ")  residual lower "
        << format_double(s.residual_lower) << " upper " << format_double(s.residual_upper) << "  iterations "
        << s.iterations_lower << "/" << s.iterations_upper << '\n';
  if (!s.converged()) return kExitNonConvergence;
  return s.certified() ? kExitOk : kExitCheckFailure;
}

template <std::size_t N>
Strategy<N> make_strategy(const StrategyConfig& s, const ScalarField<N>* field) {
  if (s.kind == "greedy_max") return Strategy<N>::greedy_max(*field);
  if (s.kind == "greedy_min") return Strategy<N>::greedy_min(*field);
  if (s.kind == "pull_toward") return Strategy<N>::pull_toward(to_vec<N>(s.target));
  return Strategy<N>::uniform_random();
}

inline bool is_greedy(const StrategyConfig& s) { return s.kind == "greedy_max" || s.kind == "greedy_min"; }

// Greedy strategies read the lower solution field from game.solution_dir.
template <std::size_t N>
int cmd_game(const RunConfig& c, const CommandOptions& o, std::ostream& log = std::cout) {
  const Problem<N> problem(make_problem_spec<N>(c));
  detail::check_points(c.game.points, problem, "game.points", false);
  std::optional<ScalarField<N>> field;
  if (is_greedy(c.game.first) || is_greedy(c.game.second)) {
    if (c.game.solution_dir.empty()) throw MissingArtifact("greedy strategies need game.solution_dir");
    field = detail::load_field(std::filesystem::path(c.game.solution_dir) / "lower.csv", problem);
  }
  const auto* fp = field ? &*field : nullptr;
  const auto first = make_strategy<N>(c.game.first, fp);
  const auto second = make_strategy<N>(c.game.second, fp);
  const auto dir = detail::output_dir(c, o);

  nlohmann::json rows = nlohmann::json::array();
  bool ok = true;
  std::ofstream traj;
  if (c.game.trajectories > 0) traj.open(dir / "trajectories.jsonl");
  for (std::size_t i = 0; i < c.game.points.size(); ++i) {
    const Vec<N> x0 = to_vec<N>(c.game.points[i]);
    const std::uint64_t seed = derive_seed(c.game.seed, i);
    const auto e = estimate_value(x0, first, second, problem, c.game.runs, seed, c.game.cap);
    ok = ok && e.valid;
    nlohmann::json row{{"x", to_json(x0)}, {"estimate", to_json(e)}};
    if (fp && in_domain(problem.region(x0))) row["solution_lower"] = sample(*fp, x0);
    rows.push_back(row);
    if (!o.quiet)
      log << "x0 " << to_json(x0).dump() << "  mean " << format_double(e.mean) << " +- " << format_double(e.ci95)
          << "  truncated " << e.truncated << '\n';
    for (std::size_t k = 0; k < std::min(c.game.trajectories, c.game.runs); ++k) {
      const auto t = play(x0, first, second, problem, derive_seed(seed, k), c.game.cap);
      write_trajectory_jsonl(traj, t, {{"point", i}, {"run", k}});
    }
  }
  nlohmann::json out = detail::provenance(c);
  out["strategies"] = {{"first", first.name()}, {"second", second.name()}};
  out["estimates"] = rows;
  detail::write_json(dir / "game_estimates.json", out);
  return ok ? kExitOk : kExitCheckFailure;
}

template <std::size_t N>
std::vector<Pairing<N>> adversarial_pairings(const Problem<N>& problem, const ScalarField<N>& field) {
  const auto b = problem.domain().bounds();
  Vec<N> far_lo = b.lo, far_hi = b.hi;
  return {{"greedy_x_greedy", Strategy<N>::greedy_max(field), Strategy<N>::greedy_min(field)},
          {"pull_x_pull", Strategy<N>::pull_toward(far_hi), Strategy<N>::pull_toward(far_lo)},
          {"random_x_random", Strategy<N>::uniform_random(), Strategy<N>::uniform_random()}};
}

// Runs every applicable check; a failed solve certificate is itself a
// reported check.
template <std::size_t N>
int cmd_verify(const RunConfig& c, const CommandOptions& o, std::ostream& log = std::cout) {
  const Problem<N> problem(make_problem_spec<N>(c));
  auto s = solve(problem, c.tol, c.max_iter);
  if (!s.converged()) {
    if (!o.quiet) log << "solve did not converge; no checks run\n";
    return kExitNonConvergence;
  }
  if (c.verify.negative_control) {
    std::size_t node = s.lower.size() / 2;
    while (!in_domain(s.lower.region(node))) ++node;
    s.lower[node] = problem.sup_F() + 1.0;
  }
  const std::uint64_t seed = c.game.seed;
  std::vector<CheckReport> reports;
  {
    CheckReport cert = decide("solve_certificate", s.gap, s.gap_tol);
    cert.witness = detail::node_witness(s.lower, s.gap_node);
    reports.push_back(cert);
  }
  reports.push_back(check_max_principle(s, problem));
  reports.push_back(check_operator_monotone(problem, c.verify.trials, seed));
  reports.push_back(check_range_preservation(problem, c.verify.trials, seed));
  reports.push_back(check_lipschitz_bounds(problem, c.verify.lipschitz_trials, seed));
  reports.push_back(check_analytic(s, problem));
  if (c.verify.games) {
    const auto& pts = c.verify.bracket_points.empty() ? c.game.points : c.verify.bracket_points;
    detail::check_points(pts, problem, c.verify.bracket_points.empty() ? "game.points" : "verify.bracket_points", true);
    std::vector<Vec<N>> xs;
    for (const auto& p : pts) xs.push_back(to_vec<N>(p));
    reports.push_back(check_uniqueness_bracket(problem, s, xs, c.verify.bracket_runs, derive_seed(seed, 1), c.game.cap));
    reports.push_back(check_supermartingale(problem, s.lower, Strategy<N>::greedy_max(s.lower),
                                            Strategy<N>::greedy_min(s.lower), c.verify.supermartingale_trajectories,
                                            derive_seed(seed, 2), c.verify.bins_per_axis, c.verify.min_samples,
                                            c.game.cap));
    reports.push_back(check_termination(problem, adversarial_pairings(problem, s.lower), xs.front(),
                                        c.verify.termination_runs, derive_seed(seed, 3), c.game.cap));
  }
  nlohmann::json arr = nlohmann::json::array();
  bool failed = false;
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    failed = failed || r.failed();
    if (!o.quiet) log << to_string(r.status) << "  " << r.id << "  measured " << format_double(r.measured) << '\n';
  }
  const auto dir = detail::output_dir(c, o);
  detail::write_json(dir / "checks.json", arr);
  return failed ? kExitCheckFailure : kExitOk;
}

namespace detail {

inline RunConfig with_axis(RunConfig c, const std::string& axis, double v) {
  if (axis == "epsilon") c.epsilon = v;
  else if (axis == "h") c.h = v;
  else if (axis == "M") c.directions = static_cast<std::size_t>(std::llround(v));
  else if (axis == "K") c.quadrature = static_cast<std::size_t>(std::llround(v));
  else if (axis == "p") c.p = v;
  return c;
}

}  // namespace detail

// One solve per axis value; every row is recorded, failures included.
template <std::size_t N>
int cmd_sweep(const RunConfig& c, const CommandOptions& o, std::ostream& log = std::cout) {
  const auto dir = detail::output_dir(c, o);
  std::ofstream csv(dir / "sweep.csv");
  csv << "axis,value,status,gap,residual_lower,residual_upper,dpp_residual,iterations_lower,iterations_upper,"
         "linf_vs_reference,l2_vs_reference,residual_refined\n";
  // residual_refined: DPP residual of the lower field under one shared, much
  // richer direction set.
  std::size_t refined = N == 2 ? 256 : 512;
  for (double v : c.sweep.values) {
    try {
      refined = std::max(refined, 4 * make_problem_spec<N>(detail::with_axis(c, c.sweep.axis, v)).directions);
    } catch (const std::exception&) {
    }
  }
  bool ok = true;
  for (double v : c.sweep.values) {
    std::string status = "ok";
    std::ostringstream row;
    try {
      const RunConfig rc = detail::with_axis(c, c.sweep.axis, v);
      validate(rc);
      const Problem<N> problem(make_problem_spec<N>(rc));
      const auto s = solve(problem, rc.tol, rc.max_iter);
      if (!s.converged()) status = "not_converged";
      else if (!s.certified()) status = "gap_exceeded";
      row << format_double(s.gap) << ',' << format_double(s.residual_lower) << ',' << format_double(s.residual_upper)
          << ',' << format_double(residual(problem, s.lower)) << ',' << s.iterations_lower << ',' << s.iterations_upper
          << ',';
      if (c.sweep.reference) {
        const auto t = compare_analytic(s.lower, problem.boundary());
        row << format_double(t.linf) << ',' << format_double(t.l2);
      } else {
        row << ',';
      }
      auto fine = make_problem_spec<N>(rc);
      fine.directions = refined;
      row << ',' << format_double(residual(Problem<N>(fine), s.lower));
    } catch (const std::exception& e) {
      status = "error";
      row.str("");
      row << ",,,,,,,,";
      if (!o.quiet) log << c.sweep.axis << "=" << format_double(v) << ": " << e.what() << '\n';
    }
    ok = ok && status == "ok";
    csv << c.sweep.axis << ',' << format_double(v) << ',' << status << ',' << row.str() << '\n';
    if (!o.quiet) log << c.sweep.axis << "=" << format_double(v) << "  " << status << "  " << row.str() << '\n';
  }
  nlohmann::json meta = detail::provenance(c);
  detail::write_json(dir / "sweep_config.json", meta);
  return ok ? kExitOk : kExitCheckFailure;
}

// Parses and validates a config document, applies the seed override and
// runs one subcommand. Errors map onto the exit codes above.
inline int run_command(const std::string& command, const nlohmann::json& doc, std::optional<std::uint64_t> seed,
                       const CommandOptions& o, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  try {
    c = parse_config(doc);
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
  if (seed) c.game.seed = *seed;
  try {
    auto dispatch = [&]<std::size_t N>() -> int {
      if (command == "solve") return cmd_solve<N>(c, o, log);
      if (command == "game") return cmd_game<N>(c, o, log);
      if (command == "verify") return cmd_verify<N>(c, o, log);
      if (command == "sweep") return cmd_sweep<N>(c, o, log);
      throw ConfigError("command", "unknown command '" + command + "'");
    };
    return c.n == 2 ? dispatch.template operator()<2>() : dispatch.template operator()<3>();
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const MissingArtifact& e) {
    err << "missing artifact: " << e.what() << '\n';
    return kExitMissingArtifact;
  } catch (const ContractViolation& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
}

}  // namespace orthonoise
