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
#include <functional>
#include <optional>
#include <tuple>
#include <utility>

#include "orthonoise/dpp.hpp"
#include "orthonoise/error.hpp"
#include "orthonoise/field.hpp"

namespace orthonoise {

enum class Side { Below, Above };

template <std::size_t N>
struct IterationResult {
  ScalarField<N> field;
  std::size_t iterations = 0;
  double residual = 0.0;  // last successive sup-norm difference
  bool converged = false;
  // Largest step against the expected direction (u_k - u_{k+1} from below).
  double monotone_violation = 0.0;
};

namespace detail {

template <std::size_t N>
double sup_difference(const ScalarField<N>& a, const ScalarField<N>& b) {
  double d = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l)
    if (in_thickened(a.region(l))) d = std::max(d, std::abs(a[l] - b[l]));
  return d;
}

// max over nodes of (lower - upper); <= 0 when lower <= upper everywhere.
template <std::size_t N>
double order_violation(const ScalarField<N>& lower, const ScalarField<N>& upper) {
  double d = -INFINITY;
  for (std::size_t l = 0; l < lower.size(); ++l)
    if (in_thickened(lower.region(l))) d = std::max(d, lower[l] - upper[l]);
  return d;
}

}  // namespace detail

template <std::size_t N>
ScalarField<N> initial_iterate(const Problem<N>& problem, Side side) {
  return problem.constant_field(side == Side::Below ? problem.inf_F() : problem.sup_F());
}

// Callback seeing each consecutive pair (k, u_k, u_{k+1}).
template <std::size_t N>
using SweepObserver = std::function<void(std::size_t, const ScalarField<N>&, const ScalarField<N>&)>;

// Monotone iteration u_{k+1} = I u_k from the constant inf F (below) or
// sup F (above), stopped when the sup-norm step drops to tol.
template <std::size_t N>
IterationResult<N> iterate(const Problem<N>& problem, Side side, double tol, std::size_t max_iter,
                           const SweepObserver<N>& observer = {}) {
  require(tol > 0.0, "tolerance must be positive");
  require(max_iter >= 1, "max_iter must be at least 1");
  IterationResult<N> r;
  r.field = initial_iterate(problem, side);
  const double sign = side == Side::Below ? 1.0 : -1.0;
  for (std::size_t k = 0; k < max_iter; ++k) {
    ScalarField<N> next = apply_I(r.field, problem);
    for (std::size_t l = 0; l < next.size(); ++l)
      if (in_thickened(next.region(l)))
        r.monotone_violation = std::max(r.monotone_violation, sign * (r.field[l] - next[l]));
    r.residual = detail::sup_difference(r.field, next);
    if (observer) observer(k, r.field, next);
    r.field = std::move(next);
    r.iterations = k + 1;
    if (r.residual <= tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

// sup over Ω_ε of |I u - u|.
template <std::size_t N>
double residual(const Problem<N>& problem, const ScalarField<N>& field) {
  return detail::sup_difference(apply_I(field, problem), field);
}

template <std::size_t N>
struct Solution {
  ScalarField<N> lower;
  ScalarField<N> upper;
  double gap = 0.0;
  std::size_t gap_node = 0;
  double gap_tol = 0.0;
  double residual_lower = 0.0;
  double residual_upper = 0.0;
  std::size_t iterations_lower = 0;
  std::size_t iterations_upper = 0;
  bool converged_lower = false;
  bool converged_upper = false;
  double monotone_violation_lower = 0.0;
  double monotone_violation_upper = 0.0;
  // max over sweeps and nodes of (below_k - above_k).
  double bracket_violation = -INFINITY;

  bool converged() const { return converged_lower && converged_upper; }
  bool certified() const { return converged() && gap <= gap_tol; }
};

// Callback seeing both sides after every lockstep sweep.
template <std::size_t N>
using BracketObserver = std::function<void(std::size_t, const ScalarField<N>&, const ScalarField<N>&)>;

namespace detail {

template <std::size_t N>
std::pair<double, std::size_t> max_gap(const ScalarField<N>& lower, const ScalarField<N>& upper) {
  double gap = -INFINITY;
  std::size_t node = 0;
  for (std::size_t l = 0; l < lower.size(); ++l) {
    if (!in_thickened(lower.region(l))) continue;
    const double d = upper[l] - lower[l];
    if (d > gap) gap = d, node = l;
  }
  return {gap, node};
}

}  // namespace detail

// Runs both monotone iterations in lockstep. A side that has met the
// tolerance holds its iterate; once both have, sweeping resumes on both
// sides until the gap is within gap_tol = 10 tol or max_iter is reached.
template <std::size_t N>
Solution<N> solve(const Problem<N>& problem, double tol, std::size_t max_iter,
                  const BracketObserver<N>& observer = {}) {
  require(tol > 0.0, "tolerance must be positive");
  require(max_iter >= 1, "max_iter must be at least 1");
  Solution<N> s;
  s.gap_tol = 10.0 * tol;
  s.lower = initial_iterate(problem, Side::Below);
  s.upper = initial_iterate(problem, Side::Above);
  s.bracket_violation = detail::order_violation(s.lower, s.upper);
  std::tie(s.gap, s.gap_node) = detail::max_gap(s.lower, s.upper);
  auto sweep = [&](ScalarField<N>& u, double sign, double& violation, double& res) {
    ScalarField<N> next = apply_I(u, problem);
    for (std::size_t l = 0; l < next.size(); ++l)
      if (in_thickened(next.region(l))) violation = std::max(violation, sign * (u[l] - next[l]));
    res = detail::sup_difference(u, next);
    u = std::move(next);
  };
  for (std::size_t k = 0; k < max_iter; ++k) {
    const bool refine = s.converged() && s.gap > s.gap_tol;
    if (s.converged() && !refine) break;
    if (!s.converged_lower || refine) {
      sweep(s.lower, 1.0, s.monotone_violation_lower, s.residual_lower);
      s.iterations_lower = k + 1;
      s.converged_lower = s.residual_lower <= tol;
    }
    if (!s.converged_upper || refine) {
      sweep(s.upper, -1.0, s.monotone_violation_upper, s.residual_upper);
      s.iterations_upper = k + 1;
      s.converged_upper = s.residual_upper <= tol;
    }
    s.bracket_violation = std::max(s.bracket_violation, detail::order_violation(s.lower, s.upper));
    std::tie(s.gap, s.gap_node) = detail::max_gap(s.lower, s.upper);
    if (observer) observer(k, s.lower, s.upper);
  }
  return s;
}

}  // namespace orthonoise
