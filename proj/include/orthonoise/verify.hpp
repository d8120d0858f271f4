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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "orthonoise/dpp.hpp"
#include "orthonoise/game.hpp"
#include "orthonoise/io.hpp"
#include "orthonoise/rng.hpp"
#include "orthonoise/solver.hpp"

namespace orthonoise {

enum class CheckStatus { Pass, Fail, Inconclusive };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

// pass <=> measured <= tolerance, unless the check could not decide.
struct CheckReport {
  std::string id;
  CheckStatus status = CheckStatus::Pass;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string witness;
  nlohmann::json detail = nlohmann::json::object();

  bool passed() const { return status == CheckStatus::Pass; }
  bool failed() const { return status == CheckStatus::Fail; }
};

inline nlohmann::json to_json(const CheckReport& r) {
  return {{"id", r.id},
          {"status", to_string(r.status)},
          {"measured", std::isfinite(r.measured) ? nlohmann::json(r.measured) : nlohmann::json(nullptr)},
          {"tolerance", std::isfinite(r.tolerance) ? nlohmann::json(r.tolerance) : nlohmann::json(nullptr)},
          {"witness", r.witness},
          {"detail", r.detail}};
}

inline CheckReport decide(std::string id, double measured, double tolerance) {
  CheckReport r;
  r.id = std::move(id);
  r.measured = measured;
  r.tolerance = tolerance;
  r.status = measured <= tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  return r;
}

namespace detail {

template <std::size_t N>
std::string node_witness(const ScalarField<N>& f, std::size_t l) {
  return "node " + std::to_string(l) + " at " + to_json(f.grid().position(l)).dump();
}

// Uniform point of Ω by rejection from the bounding box.
template <std::size_t N>
Vec<N> random_point_in_domain(const Domain<N>& domain, Stream& rng) {
  const auto b = domain.bounds();
  for (;;) {
    Vec<N> x{};
    for (std::size_t a = 0; a < N; ++a) x[a] = b.lo[a] + (b.hi[a] - b.lo[a]) * rng.uniform();
    if (domain.signed_distance(x) < 0.0) return x;
  }
}

}  // namespace detail

// inf F <= u <= sup F (within 1e-9) on both one-sided limits.
template <std::size_t N>
CheckReport check_max_principle(const Solution<N>& s, const Problem<N>& problem) {
  constexpr double kTol = 1e-9;
  double worst = -INFINITY;
  std::size_t worst_node = 0;
  std::string worst_side = "lower";
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto* side : {&s.lower, &s.upper}) {
    const auto& f = *side;
    for (std::size_t l = 0; l < f.size(); ++l) {
      if (!in_thickened(f.region(l))) continue;
      lo = std::min(lo, f[l]);
      hi = std::max(hi, f[l]);
      const double excess = std::max(problem.inf_F() - f[l], f[l] - problem.sup_F());
      if (excess > worst) {
        worst = excess;
        worst_node = l;
        worst_side = side == &s.lower ? "lower" : "upper";
      }
    }
  }
  CheckReport r = decide("max_principle", worst, kTol);
  r.witness = worst_side + " " + detail::node_witness(s.lower, worst_node);
  r.detail = {{"field_min", lo}, {"field_max", hi}, {"inf_F", problem.inf_F()}, {"sup_F", problem.sup_F()},
              {"witness_region", to_string(s.lower.region(worst_node))}};
  return r;
}

namespace detail {

template <std::size_t N>
ScalarField<N> random_field(const Problem<N>& problem, Stream& rng, double lo, double hi) {
  ScalarField<N> f = problem.constant_field(0.0);
  for (std::size_t l = 0; l < f.size(); ++l)
    if (in_thickened(f.region(l))) f[l] = lo + (hi - lo) * rng.uniform();
  return f;
}

}  // namespace detail

// Random ordered pairs u <= v must map to I u <= I v at every node, with no
// tolerance. `reverse_order` builds v = u - bump instead (negative control).
template <std::size_t N>
CheckReport check_operator_monotone(const Problem<N>& problem, std::size_t trials, std::uint64_t seed,
                                    bool reverse_order = false) {
  require(trials >= 1, "at least one trial is required");
  Stream rng(splitmix64(seed));
  const double spread = std::max(1.0, problem.sup_F() - problem.inf_F());
  double worst = -INFINITY;
  std::size_t worst_trial = 0;
  std::size_t worst_node = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto u = detail::random_field(problem, rng, problem.inf_F() - spread, problem.sup_F() + spread);
    ScalarField<N> v = u;
    for (std::size_t l = 0; l < v.size(); ++l) {
      if (!in_thickened(v.region(l))) continue;
      const double bump = rng.uniform() < 0.3 ? 0.0 : spread * rng.uniform();
      v[l] += reverse_order ? -bump : bump;
    }
    const auto Iu = apply_I(u, problem);
    const auto Iv = apply_I(v, problem);
    for (std::size_t l = 0; l < Iu.size(); ++l) {
      if (!in_thickened(Iu.region(l))) continue;
      const double d = Iu[l] - Iv[l];
      if (d > worst) worst = d, worst_trial = t, worst_node = l;
    }
  }
  CheckReport r = decide("operator_monotone", worst, 0.0);
  r.witness = "trial " + std::to_string(worst_trial) + " " + detail::node_witness(problem.constant_field(0.0), worst_node);
  r.detail = {{"trials", trials}, {"max_Iu_minus_Iv", worst}};
  return r;
}

// Fields with values in [inf F, sup F] map into [inf F, sup F].
template <std::size_t N>
CheckReport check_range_preservation(const Problem<N>& problem, std::size_t trials, std::uint64_t seed,
                                     double widen = 0.0) {
  require(trials >= 1, "at least one trial is required");
  Stream rng(splitmix64(seed ^ 0x2545f4914f6cdd1dULL));
  double worst = -INFINITY;
  std::size_t worst_trial = 0;
  std::size_t worst_node = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto u = detail::random_field(problem, rng, problem.inf_F() - widen, problem.sup_F() + widen);
    const auto Iu = apply_I(u, problem);
    for (std::size_t l = 0; l < Iu.size(); ++l) {
      if (!in_thickened(Iu.region(l))) continue;
      const double e = std::max(problem.inf_F() - Iu[l], Iu[l] - problem.sup_F());
      if (e > worst) worst = e, worst_trial = t, worst_node = l;
    }
  }
  CheckReport r = decide("range_preservation", worst, 0.0);
  r.witness = "trial " + std::to_string(worst_trial) + " " + detail::node_witness(problem.constant_field(0.0), worst_node);
  r.detail = {{"trials", trials}};
  return r;
}

// A random Lipschitz test function: sum of cones plus an affine part, with
// its analytic Lipschitz constant. An optional jump (negative control)
// breaks the declared constant.
template <std::size_t N>
struct ConeMixture {
  std::vector<Vec<N>> vertices;
  std::vector<double> slopes;
  Vec<N> linear{};
  double offset = 0.0;
  double jump = 0.0;  // added on {x_1 > 0}

  double operator()(const Vec<N>& x) const {
    double v = dot(linear, x) + offset;
    for (std::size_t i = 0; i < vertices.size(); ++i) v += slopes[i] * distance(x, vertices[i]);
    if (jump != 0.0 && x[0] > 0.0) v += jump;
    return v;
  }

  double lipschitz() const {
    double l = norm(linear);
    for (double s : slopes) l += std::abs(s);
    return l;
  }

  static ConeMixture random(const Domain<N>& domain, Stream& rng) {
    ConeMixture m;
    const std::size_t cones = 1 + static_cast<std::size_t>(rng.uniform() * 3.0);
    for (std::size_t i = 0; i < cones; ++i) {
      m.vertices.push_back(detail::random_point_in_domain(domain, rng));
      m.slopes.push_back(2.0 * rng.uniform() - 1.0);
    }
    for (std::size_t a = 0; a < N; ++a) m.linear[a] = 2.0 * rng.uniform() - 1.0;
    m.offset = 2.0 * rng.uniform() - 1.0;
    return m;
  }
};

struct LipschitzTrial {
  double lip_u = 0.0;           // declared constant of u
  double lip_mean_sweep = 0.0;  // discrete estimate of the mean-operator sweep (Ω nodes)
  double bound_mean = 0.0;
  double lip_full_sweep = 0.0;  // discrete estimate of the full operator sweep (Ω_ε nodes)
  double bound_full = 0.0;
};

template <std::size_t N, typename Fn>
LipschitzTrial lipschitz_trial(const Problem<N>& problem, const Fn& u, double lip_u) {
  LipschitzTrial t;
  t.lip_u = lip_u;
  const double tol = 10.0 * problem.h() * lip_u;
  const auto mean_sweep = tilde_I_sweep(u, problem);
  t.lip_mean_sweep = lipschitz_estimate(mean_sweep, [](Region r) { return in_domain(r); });
  t.bound_mean = 3.0 * lip_u + tol;

  const auto full_sweep = apply_I_sweep(u, problem);
  t.lip_full_sweep = lipschitz_estimate(full_sweep);
  double u_sup = 0.0;
  for (std::size_t l = 0; l < full_sweep.size(); ++l)
    if (in_thickened(full_sweep.region(l))) u_sup = std::max(u_sup, std::abs(u(full_sweep.grid().position(l))));
  const double f_sup = std::max(std::abs(problem.inf_F()), std::abs(problem.sup_F()));
  const double lip_F = boundary_lipschitz(problem.boundary(), problem.domain(), problem.epsilon());
  t.bound_full = std::max(3.0 * lip_u, lip_F) + (f_sup + u_sup) / problem.epsilon() + tol;
  return t;
}

template <std::size_t N>
CheckReport check_lipschitz_bounds(const Problem<N>& problem, std::size_t trials, std::uint64_t seed,
                                   double jump = 0.0) {
  require(trials >= 1, "at least one trial is required");
  Stream rng(splitmix64(seed ^ 0x9e3779b97f4a7c15ULL));
  double worst = -INFINITY;
  std::size_t worst_trial = 0;
  double worst_mean_ratio = 0.0;
  double worst_full_ratio = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    auto u = ConeMixture<N>::random(problem.domain(), rng);
    u.jump = jump;
    const auto t = lipschitz_trial(problem, u, u.lipschitz());
    const double excess = std::max(t.lip_mean_sweep - t.bound_mean, t.lip_full_sweep - t.bound_full);
    worst_mean_ratio = std::max(worst_mean_ratio, t.lip_mean_sweep / t.bound_mean);
    worst_full_ratio = std::max(worst_full_ratio, t.lip_full_sweep / t.bound_full);
    if (excess > worst) worst = excess, worst_trial = k;
  }
  CheckReport r = decide("lipschitz_bounds", worst, 0.0);
  r.witness = "trial " + std::to_string(worst_trial);
  r.detail = {{"trials", trials}, {"max_ratio_mean_sweep", worst_mean_ratio},
              {"max_ratio_full_sweep", worst_full_ratio}};
  return r;
}

// Monte Carlo value under (greedy_max(upper), greedy_min(lower)) against
// both one-sided limits at each point.
template <std::size_t N>
CheckReport check_uniqueness_bracket(const Problem<N>& problem, const Solution<N>& s,
                                     const std::vector<Vec<N>>& points, std::size_t runs,
                                     std::uint64_t seed, std::size_t cap = kDefaultCap) {
  const double range = problem.sup_F() - problem.inf_F();
  const double band = 0.02 * range;
  const double gap_tol = 1e-5 * range;
  const auto first = Strategy<N>::greedy_max(s.upper);
  const auto second = Strategy<N>::greedy_min(s.lower);
  CheckReport r;
  r.id = "uniqueness_bracket";
  r.tolerance = band;
  r.measured = -INFINITY;
  bool inconclusive = false;
  bool gap_ok = true;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& x = points[i];
    require(in_domain(problem.region(x)), "bracket points must lie in the domain");
    const auto e = estimate_value(x, first, second, problem, runs, derive_seed(seed, i), cap);
    const IterateView<N> lo(s.lower, problem);
    const IterateView<N> up(s.upper, problem);
    const double ul = lo(x);
    const double uu = up(x);
    const double dev = std::max(std::abs(e.mean - ul), std::abs(e.mean - uu)) - 3.0 * e.std_error;
    if (!e.valid || (range > 0.0 && 3.0 * e.std_error > band)) inconclusive = true;
    if (uu - ul > gap_tol) gap_ok = false;
    if (dev > r.measured) {
      r.measured = dev;
      r.witness = "point " + std::to_string(i) + " at " + to_json(x).dump();
    }
    rows.push_back({{"x", to_json(x)}, {"lower", ul}, {"upper", uu}, {"estimate", to_json(e)}});
  }
  r.detail = {{"points", rows}, {"gap_tolerance", gap_tol}, {"gap_ok", gap_ok}};
  if (!gap_ok) r.status = CheckStatus::Fail;
  else if (inconclusive) r.status = CheckStatus::Inconclusive;
  else r.status = r.measured <= band ? CheckStatus::Pass : CheckStatus::Fail;
  return r;
}

struct SupermartingaleBin {
  std::size_t count = 0;
  double mean_increment = 0.0;
  double std_error = 0.0;
};

// Binned increments u(x_{k+1}) - u(x_k) along games where Player II plays
// greedy_min(field). Bins with fewer than min_samples are skipped.
template <std::size_t N>
CheckReport check_supermartingale(const Problem<N>& problem, const ScalarField<N>& field,
                                  const Strategy<N>& first, const Strategy<N>& second,
                                  std::size_t trajectories, std::uint64_t seed,
                                  std::size_t bins_per_axis = 10, std::size_t min_samples = 200,
                                  std::size_t cap = kDefaultCap) {
  Stream starts(splitmix64(seed ^ 0xd1b54a32d192ed03ULL));
  std::vector<Vec<N>> x0(trajectories);
  for (auto& x : x0) x = detail::random_point_in_domain(problem.domain(), starts);
  std::vector<std::vector<Transition<N>>> per_run(trajectories);
  parallel_for(trajectories, problem.workers(), [&](std::size_t i) {
    const auto t = play(x0[i], first, second, problem, derive_seed(seed, i), cap);
    collect_transitions(t, field, problem, per_run[i]);
  });

  const auto b = problem.domain().bounds();
  std::size_t nbins = 1;
  for (std::size_t a = 0; a < N; ++a) nbins *= bins_per_axis;
  std::vector<CompensatedSum> sum(nbins), sq(nbins);
  std::vector<std::size_t> count(nbins, 0);
  auto bin_of = [&](const Vec<N>& x) {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < N; ++a) {
      const double s = (x[a] - b.lo[a]) / (b.hi[a] - b.lo[a]) * static_cast<double>(bins_per_axis);
      const auto c = std::min(bins_per_axis - 1, static_cast<std::size_t>(std::max(0.0, s)));
      idx = idx * bins_per_axis + c;
    }
    return idx;
  };
  std::size_t total = 0;
  for (const auto& run : per_run)
    for (const auto& tr : run) {
      const std::size_t k = bin_of(tr.from);
      const double d = tr.after - tr.before;
      sum[k].add(d);
      sq[k].add(d * d);
      ++count[k];
      ++total;
    }

  CheckReport r;
  r.id = "supermartingale";
  r.tolerance = 0.0;
  r.measured = -INFINITY;
  std::size_t used = 0;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < nbins; ++k) {
    if (count[k] < min_samples) continue;
    ++used;
    const double n = static_cast<double>(count[k]);
    const double mean = sum[k].value() / n;
    const double var = std::max(0.0, (sq[k].value() - n * mean * mean) / (n - 1.0));
    const double se = std::sqrt(var / n);
    // Allow a few ulps of rounding when every increment is identical.
    const double excess = mean - 3.0 * se - 1e-12;
    rows.push_back({{"bin", k}, {"count", count[k]}, {"mean_increment", mean}, {"std_error", se}});
    if (excess > r.measured) {
      r.measured = excess;
      r.witness = "bin " + std::to_string(k);
    }
  }
  r.detail = {{"transitions", total}, {"bins_used", used}, {"bins", rows}};
  if (used == 0) r.status = CheckStatus::Inconclusive;
  else r.status = r.measured <= r.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  return r;
}

template <std::size_t N>
struct Pairing {
  std::string name;
  Strategy<N> first;
  Strategy<N> second;
};

// Every pairing: no truncations, survival nonincreasing in m, positive
// fitted geometric rate.
template <std::size_t N>
CheckReport check_termination(const Problem<N>& problem, const std::vector<Pairing<N>>& pairings,
                              const Vec<N>& x0, std::size_t runs, std::uint64_t seed,
                              std::size_t cap = kDefaultCap) {
  CheckReport r;
  r.id = "game_termination";
  r.tolerance = 0.0;
  r.measured = 0.0;
  bool ok = true;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < pairings.size(); ++i) {
    const auto& pr = pairings[i];
    const auto st = exit_time_stats(x0, pr.first, pr.second, problem, runs, derive_seed(seed, i), cap);
    bool monotone = true;
    for (std::size_t m = 1; m < st.survival.size(); ++m)
      if (st.survival[m] > st.survival[m - 1]) monotone = false;
    const bool pass = st.truncated == 0 && monotone && st.theta > 0.0;
    if (!pass) {
      ok = false;
      r.witness = pr.name;
    }
    r.measured = std::max(r.measured, static_cast<double>(st.truncated) / static_cast<double>(runs));
    nlohmann::json row = to_json(st);
    row["pairing"] = pr.name;
    row["monotone"] = monotone;
    rows.push_back(row);
  }
  r.detail = {{"pairings", rows}};
  r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
  return r;
}

struct ErrorTable {
  double linf = 0.0;
  double l2 = 0.0;
  std::size_t worst_node = 0;
};

// Error of a computed field against a closed form over the nodes of Ω_ε.
// The discrete L2 norm is sqrt(h^n sum e^2).
template <std::size_t N, typename Fn>
ErrorTable compare_analytic(const ScalarField<N>& field, const Fn& reference) {
  ErrorTable t;
  CompensatedSum sq;
  for (std::size_t l = 0; l < field.size(); ++l) {
    if (!in_thickened(field.region(l))) continue;
    const double e = std::abs(field[l] - reference(field.grid().position(l)));
    sq.add(e * e);
    if (e > t.linf) t.linf = e, t.worst_node = l;
  }
  t.l2 = std::sqrt(sq.value() * std::pow(field.grid().h, static_cast<double>(N)));
  return t;
}

// Affine (and constant) data are exact fixed points: error <= 1e-6.
// Other closed forms are only reported.
template <std::size_t N>
CheckReport check_analytic(const Solution<N>& s, const Problem<N>& problem) {
  const auto& F = problem.boundary();
  const auto t = compare_analytic(s.lower, F);
  const bool exact = F.kind() == "affine" || F.kind() == "constant";
  CheckReport r = decide("compare_analytic", t.linf, exact ? 1e-6 : INFINITY);
  r.witness = detail::node_witness(s.lower, t.worst_node);
  r.detail = {{"reference", F.kind()}, {"linf", t.linf}, {"l2", t.l2}, {"thresholded", exact}};
  return r;
}

}  // namespace orthonoise
