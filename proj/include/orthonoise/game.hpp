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
#include <numbers>
#include <string>
#include <vector>

#include "orthonoise/dpp.hpp"
#include "orthonoise/error.hpp"
#include "orthonoise/field.hpp"
#include "orthonoise/parallel.hpp"
#include "orthonoise/rng.hpp"

namespace orthonoise {

enum class Status { Running, EndedInnerStrip, EndedOuterStrip };
enum class Player { I, II };
enum class MoveKind { Direct, Noise };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Running: return "Running";
    case Status::EndedInnerStrip: return "EndedInnerStrip";
    case Status::EndedOuterStrip: return "EndedOuterStrip";
  }
  return "?";
}
inline const char* to_string(Player p) { return p == Player::I ? "I" : "II"; }
inline const char* to_string(MoveKind k) { return k == MoveKind::Direct ? "direct" : "noise"; }

template <std::size_t N>
struct GameState {
  Vec<N> position{};
  std::size_t turn = 0;
  Status status = Status::Running;
};

template <std::size_t N>
struct TurnRecord {
  std::size_t turn = 0;  // 1-based
  Vec<N> position{};     // token position after the move
  Player coin = Player::I;
  MoveKind kind = MoveKind::Direct;
  Status status = Status::Running;
};

template <std::size_t N>
struct Trajectory {
  std::vector<Vec<N>> positions;  // x_0 .. x_tau
  std::vector<TurnRecord<N>> turns;
  double payoff = std::numeric_limits<double>::quiet_NaN();
  bool truncated = false;
  bool ended_at_start = false;  // x_0 in the inner strip and the first check stopped the game

  std::size_t length() const { return turns.size(); }
};

// Number of uniforms one step consumes: coin, move kind, n - 1 for the
// noise displacement, termination check. Drawn whether used or not.
template <std::size_t N>
constexpr std::size_t draws_per_step() {
  return N + 2;
}

// Uniform sample from the closed (n-1)-disk of radius ε orthogonal to v,
// driven by n - 1 uniforms.
template <std::size_t N>
Vec<N> disk_displacement(const Vec<N>& v, double epsilon, const std::array<double, N - 1>& u) {
  const auto basis = orthonormal_complement(v);
  if constexpr (N == 2) {
    return (epsilon * (2.0 * u[0] - 1.0)) * basis[0];
  } else {
    static_assert(N == 3, "noise sampling is provided for n = 2 and n = 3");
    const double r = epsilon * std::sqrt(u[0]);
    const double theta = 2.0 * std::numbers::pi * u[1];
    return (r * std::cos(theta)) * basis[0] + (r * std::sin(theta)) * basis[1];
  }
}

struct StepOutcome {
  Player coin = Player::I;
  MoveKind kind = MoveKind::Direct;
};

// One turn: coin toss, move kind, displacement, then the stopping rule at
// the new position.
template <std::size_t N>
GameState<N> step(const GameState<N>& state, const Vec<N>& v_first, const Vec<N>& v_second,
                  const Problem<N>& problem, Stream& rng, StepOutcome* outcome = nullptr) {
  require(state.status == Status::Running, "cannot step a finished game");
  std::array<double, draws_per_step<N>()> u{};
  for (auto& d : u) d = rng.uniform();

  const Player coin = u[0] < 0.5 ? Player::I : Player::II;
  const Vec<N>& v = coin == Player::I ? v_first : v_second;
  const MoveKind kind = u[1] < problem.coeffs().alpha ? MoveKind::Direct : MoveKind::Noise;
  std::array<double, N - 1> disk{};
  for (std::size_t i = 0; i + 1 < N; ++i) disk[i] = u[2 + i];

  GameState<N> next = state;
  next.turn = state.turn + 1;
  next.position = state.position +
                  (kind == MoveKind::Direct ? v : disk_displacement(v, problem.epsilon(), disk));
  const double sd = problem.domain().signed_distance(next.position);
  if (sd > 0.0) {
    next.status = Status::EndedOuterStrip;
  } else if (-sd <= problem.epsilon()) {
    const double delta = cutoff_from_signed_distance(sd, problem.epsilon());
    if (u[N + 1] < delta) next.status = Status::EndedInnerStrip;
  }
  if (outcome) *outcome = {coin, kind};
  return next;
}

// Position-only strategies choosing from the problem's direction set.
template <std::size_t N>
class Strategy {
 public:
  enum class Kind { GreedyMax, GreedyMin, PullToward, UniformRandom };

  static Strategy greedy_max(const ScalarField<N>& field) { return Strategy(Kind::GreedyMax, &field, {}); }
  static Strategy greedy_min(const ScalarField<N>& field) { return Strategy(Kind::GreedyMin, &field, {}); }
  static Strategy pull_toward(const Vec<N>& target) { return Strategy(Kind::PullToward, nullptr, target); }
  static Strategy uniform_random() { return Strategy(Kind::UniformRandom, nullptr, {}); }

  Kind kind() const { return kind_; }

  std::string name() const {
    switch (kind_) {
      case Kind::GreedyMax: return "greedy_max";
      case Kind::GreedyMin: return "greedy_min";
      case Kind::PullToward: return "pull_toward";
      case Kind::UniformRandom: return "uniform_random";
    }
    return "?";
  }

  // Index into the problem's direction set. `rng` is only read by the
  // random strategy.
  std::size_t choose(const Vec<N>& x, const Problem<N>& problem, Stream& rng) const {
    const auto& dirs = problem.stencil().directions;
    switch (kind_) {
      case Kind::GreedyMax:
      case Kind::GreedyMin: {
        const auto e = direction_extrema(IterateView<N>(*field_, problem), x, problem.stencil(),
                                         problem.coeffs());
        return kind_ == Kind::GreedyMax ? e.argmax : e.argmin;
      }
      case Kind::PullToward: {
        const Vec<N> want = target_ - x;
        std::size_t best = 0;
        double best_score = -INFINITY;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
          const double s = dot(dirs.vectors[i], want);
          if (s > best_score) best_score = s, best = i;
        }
        return best;
      }
      case Kind::UniformRandom:
        return std::min(dirs.size() - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(dirs.size())));
    }
    return 0;
  }

 private:
  Strategy(Kind k, const ScalarField<N>* f, Vec<N> t) : kind_(k), field_(f), target_(t) {}

  Kind kind_;
  const ScalarField<N>* field_;
  Vec<N> target_;
};

// argmax / argmin of W(x, .) over the direction set.
template <std::size_t N>
std::size_t greedy_move(const ScalarField<N>& field, const Vec<N>& x, bool maximize,
                        const Problem<N>& problem) {
  require(in_domain(problem.region(x)), "greedy move requested outside the domain");
  const auto e = direction_extrema(IterateView<N>(field, problem), x, problem.stencil(), problem.coeffs());
  return maximize ? e.argmax : e.argmin;
}

// Plays one game from x0. The step stream draws one uniform for the
// stopping check at x0 and then draws_per_step<N>() per turn; each player
// has its own strategy stream.
template <std::size_t N>
Trajectory<N> play(const Vec<N>& x0, const Strategy<N>& first, const Strategy<N>& second,
                   const Problem<N>& problem, std::uint64_t seed, std::size_t cap,
                   bool record_turns = true) {
  require(cap >= 1, "turn cap must be at least 1");
  const Region r0 = problem.region(x0);
  require(in_thickened(r0), "game must start inside the thickened domain");
  Trajectory<N> t;
  t.positions.push_back(x0);
  if (r0 == Region::OuterStrip) {
    t.payoff = problem.boundary()(x0);
    return t;
  }
  Stream rng(splitmix64(seed));
  Stream rng_first(splitmix64(seed ^ 0x5851f42d4c957f2dULL));
  Stream rng_second(splitmix64(seed ^ 0x14057b7ef767814fULL));

  const double start_check = rng.uniform();
  if (r0 == Region::InnerStrip && start_check < problem.cutoff(x0)) {
    t.ended_at_start = true;
    t.payoff = problem.boundary()(x0);
    return t;
  }

  const auto& dirs = problem.stencil().directions;
  GameState<N> state{x0, 0, Status::Running};
  while (state.status == Status::Running) {
    if (state.turn >= cap) {
      t.truncated = true;
      return t;
    }
    const Vec<N>& v1 = dirs.vectors[first.choose(state.position, problem, rng_first)];
    const Vec<N>& v2 = dirs.vectors[second.choose(state.position, problem, rng_second)];
    StepOutcome o;
    state = step(state, v1, v2, problem, rng, &o);
    t.positions.push_back(state.position);
    if (record_turns) t.turns.push_back({state.turn, state.position, o.coin, o.kind, state.status});
    else t.turns.push_back({state.turn, {}, o.coin, o.kind, state.status});
  }
  t.payoff = problem.boundary()(state.position);
  return t;
}

struct ValueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci95 = 0.0;
  std::size_t runs = 0;
  std::size_t truncated = 0;
  double truncation_fraction = 0.0;
  double mean_turns = 0.0;
  bool valid = true;  // false when more than 1e-3 of the runs hit the cap
};

inline constexpr std::size_t kMinPlayouts = 100;
inline constexpr std::size_t kDefaultCap = 1'000'000;

template <std::size_t N>
std::vector<Trajectory<N>> play_many(const Vec<N>& x0, const Strategy<N>& first,
                                     const Strategy<N>& second, const Problem<N>& problem,
                                     std::size_t runs, std::uint64_t seed, std::size_t cap) {
  std::vector<Trajectory<N>> out(runs);
  parallel_for(runs, problem.workers(), [&](std::size_t i) {
    out[i] = play(x0, first, second, problem, derive_seed(seed, i), cap);
  });
  return out;
}

// Monte Carlo estimate of E[F(x_tau)]; truncated runs are counted and left
// out of the mean.
template <std::size_t N>
ValueEstimate estimate_value(const Vec<N>& x0, const Strategy<N>& first, const Strategy<N>& second,
                             const Problem<N>& problem, std::size_t runs, std::uint64_t seed,
                             std::size_t cap = kDefaultCap) {
  require(runs >= kMinPlayouts, "at least 100 playouts are required");
  std::vector<double> payoff(runs);
  std::vector<std::size_t> turns(runs);
  std::vector<char> cut(runs);
  parallel_for(runs, problem.workers(), [&](std::size_t i) {
    const auto t = play(x0, first, second, problem, derive_seed(seed, i), cap, false);
    payoff[i] = t.payoff;
    turns[i] = t.length();
    cut[i] = t.truncated ? 1 : 0;
  });
  ValueEstimate e;
  e.runs = runs;
  CompensatedSum sum;
  CompensatedSum turn_sum;
  std::size_t used = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    turn_sum.add(static_cast<double>(turns[i]));
    if (cut[i]) {
      ++e.truncated;
      continue;
    }
    sum.add(payoff[i]);
    ++used;
  }
  e.truncation_fraction = static_cast<double>(e.truncated) / static_cast<double>(runs);
  e.valid = e.truncation_fraction <= 1e-3;
  e.mean_turns = turn_sum.value() / static_cast<double>(runs);
  if (used == 0) {
    e.valid = false;
    e.mean = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  e.mean = sum.value() / static_cast<double>(used);
  if (used > 1) {
    CompensatedSum sq;
    for (std::size_t i = 0; i < runs; ++i)
      if (!cut[i]) sq.add((payoff[i] - e.mean) * (payoff[i] - e.mean));
    const double var = sq.value() / static_cast<double>(used - 1);
    e.std_error = std::sqrt(var / static_cast<double>(used));
  }
  e.ci95 = 1.96 * e.std_error;
  return e;
}

struct ExitTimeStats {
  double radius = 0.0;
  std::size_t block = 0;             // ceil(16 r^2 / eps^2)
  std::vector<double> survival;      // S(m), m = 1..10
  double theta = 0.0;                // averaged 1 - S(m+1)/S(m), with S(0) = 1
  std::size_t runs = 0;
  std::size_t truncated = 0;
  std::size_t max_turns = 0;
  double mean_turns = 0.0;
};

inline std::size_t exit_block_length(double radius, double epsilon) {
  const double x = 16.0 * radius * radius / (epsilon * epsilon);
  return static_cast<std::size_t>(std::ceil(x * (1.0 - 1e-12)));
}

template <std::size_t N>
ExitTimeStats exit_time_stats(const Vec<N>& x0, const Strategy<N>& first, const Strategy<N>& second,
                              const Problem<N>& problem, std::size_t runs, std::uint64_t seed,
                              std::size_t cap = kDefaultCap) {
  require(runs >= kMinPlayouts, "at least 100 playouts are required");
  ExitTimeStats s;
  s.runs = runs;
  s.radius = problem.domain().bounding_radius(x0);
  s.block = exit_block_length(s.radius, problem.epsilon());
  std::vector<std::size_t> turns(runs);
  std::vector<char> cut(runs);
  parallel_for(runs, problem.workers(), [&](std::size_t i) {
    const auto t = play(x0, first, second, problem, derive_seed(seed, i), cap, false);
    turns[i] = t.length();
    cut[i] = t.truncated ? 1 : 0;
  });
  CompensatedSum turn_sum;
  for (std::size_t i = 0; i < runs; ++i) {
    s.truncated += cut[i] ? 1 : 0;
    s.max_turns = std::max(s.max_turns, turns[i]);
    turn_sum.add(static_cast<double>(turns[i]));
  }
  s.mean_turns = turn_sum.value() / static_cast<double>(runs);
  std::vector<double> S{1.0};
  for (std::size_t m = 1; m <= 10; ++m) {
    std::size_t alive = 0;
    for (std::size_t i = 0; i < runs; ++i)
      if (cut[i] || turns[i] > m * s.block) ++alive;
    S.push_back(static_cast<double>(alive) / static_cast<double>(runs));
  }
  s.survival.assign(S.begin() + 1, S.end());
  double acc = 0.0;
  std::size_t terms = 0;
  for (std::size_t m = 0; m < 10; ++m) {
    if (S[m] <= 0.0) break;
    acc += 1.0 - S[m + 1] / S[m];
    ++terms;
  }
  s.theta = terms ? acc / static_cast<double>(terms) : 0.0;
  return s;
}

// (position, u at position, u one transition later) for every transition
// out of a point of Ω along a trajectory. A stop in the inner strip at x_j
// pairs u(x_j) with F(x_j).
template <std::size_t N>
struct Transition {
  Vec<N> from{};
  double before = 0.0;
  double after = 0.0;
};

template <std::size_t N>
void collect_transitions(const Trajectory<N>& t, const ScalarField<N>& field, const Problem<N>& problem,
                         std::vector<Transition<N>>& out) {
  const IterateView<N> u(field, problem);
  const auto& xs = t.positions;
  if (problem.region(xs[0]) == Region::OuterStrip) return;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const bool stopped_here =
        j == 0 ? t.ended_at_start : t.turns[j - 1].status == Status::EndedInnerStrip;
    const bool outer = j > 0 && t.turns[j - 1].status == Status::EndedOuterStrip;
    if (outer) return;
    if (stopped_here) {
      out.push_back({xs[j], u(xs[j]), problem.boundary()(xs[j])});
      return;
    }
    if (j + 1 >= xs.size()) return;  // truncated
    out.push_back({xs[j], u(xs[j]), u(xs[j + 1])});
  }
}

}  // namespace orthonoise
