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
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "orthonoise/boundary.hpp"
#include "orthonoise/error.hpp"
#include "orthonoise/field.hpp"
#include "orthonoise/geometry.hpp"
#include "orthonoise/parallel.hpp"
#include "orthonoise/vec.hpp"

namespace orthonoise {

// Weights of the deterministic move (alpha) and of the orthogonal noise
// (beta). alpha + beta == 1.
struct Coefficients {
  double alpha = 0.0;
  double beta = 1.0;
};

inline Coefficients coefficients(double p, std::size_t n) {
  require(p > 1.0 && std::isfinite(p), "p must lie in (1, inf)");
  require(n >= 2, "dimension must be at least 2");
  const double denom = p + static_cast<double>(n);
  return {(p - 1.0) / denom, (static_cast<double>(n) + 1.0) / denom};
}

inline Coefficients alpha_zero_coefficients() { return {0.0, 1.0}; }

// Direction set plus one disk rule per direction.
template <std::size_t N>
struct Stencil {
  DirectionSet<N> directions;
  std::vector<DiskRule<N>> rules;

  static Stencil make(double epsilon, std::size_t m, std::size_t k) {
    Stencil s;
    s.directions = make_direction_set<N>(epsilon, m);
    s.rules.reserve(m);
    for (const auto& v : s.directions.vectors) s.rules.push_back(disk_quadrature(v, epsilon, k));
    return s;
  }
};

template <std::size_t N>
struct ProblemSpec {
  std::optional<double> p = 2.0;  // empty means the alpha = 0 variant
  double epsilon = 0.3;
  Domain<N> domain = Domain<N>::ball(Vec<N>{}, 1.0);
  BoundarySpec<N> boundary;
  double h = 0.0;  // 0 selects epsilon / 8
  std::size_t directions = N == 2 ? 16 : 32;
  std::size_t quadrature = 8;
  unsigned workers = 1;
};

// A fully discretized instance: coefficients, lattice over Ω_ε, stencil and
// the range of the boundary data.
template <std::size_t N>
class Problem {
 public:
  explicit Problem(ProblemSpec<N> spec) : spec_(std::move(spec)) {
    require(spec_.epsilon > 0.0 && std::isfinite(spec_.epsilon), "epsilon must be positive");
    if (spec_.h == 0.0) spec_.h = spec_.epsilon / 8.0;
    require(spec_.h > 0.0 && spec_.h <= spec_.epsilon / 4.0 * (1.0 + 1e-12),
            "grid spacing h must satisfy 0 < h <= epsilon / 4");
    coeffs_ = spec_.p ? coefficients(*spec_.p, N) : alpha_zero_coefficients();
    require(coeffs_.beta > 0.0, "beta must be positive");
    stencil_ = std::make_shared<const Stencil<N>>(
        Stencil<N>::make(spec_.epsilon, spec_.directions, spec_.quadrature));
    lattice_ = Lattice<N>::build(spec_.domain, spec_.epsilon, spec_.h);
    range_ = inf_sup_boundary(spec_.boundary, spec_.domain, spec_.epsilon, spec_.h);
  }

  const ProblemSpec<N>& spec() const { return spec_; }
  const Domain<N>& domain() const { return spec_.domain; }
  const BoundarySpec<N>& boundary() const { return spec_.boundary; }
  double epsilon() const { return spec_.epsilon; }
  double h() const { return spec_.h; }
  Coefficients coeffs() const { return coeffs_; }
  const Stencil<N>& stencil() const { return *stencil_; }
  const std::shared_ptr<const Lattice<N>>& lattice() const { return lattice_; }
  double inf_F() const { return range_.first; }
  double sup_F() const { return range_.second; }
  unsigned workers() const { return spec_.workers; }
  void set_workers(unsigned w) { spec_.workers = w; }

  Region region(const Vec<N>& x) const { return classify_region(spec_.domain, spec_.epsilon, x); }
  double cutoff(const Vec<N>& x) const { return cutoff_delta(spec_.domain, spec_.epsilon, x); }
  double F(const Vec<N>& x) const { return boundary_value(spec_.boundary, spec_.domain, spec_.epsilon, x); }

  ScalarField<N> constant_field(double c) const { return ScalarField<N>(lattice_, c); }

 private:
  ProblemSpec<N> spec_;
  Coefficients coeffs_;
  std::shared_ptr<const Stencil<N>> stencil_;
  std::shared_ptr<const Lattice<N>> lattice_;
  std::pair<double, double> range_;
};

// Reads an iterate at an arbitrary point of Ω_ε: interpolation inside Ω,
// the boundary data itself on the outer strip (where every iterate after
// the first equals F).
template <std::size_t N>
class IterateView {
 public:
  IterateView(const ScalarField<N>& field, const Problem<N>& problem)
      : field_(&field), problem_(&problem) {}

  double operator()(const Vec<N>& y) const {
    const double sd = problem_->domain().signed_distance(y);
    if (sd > 0.0) {
      if (sd > problem_->epsilon() * (1.0 + 1e-12))
        throw ContractViolation("operator stencil escaped the thickened domain");
      return problem_->boundary()(y);
    }
    return sample(*field_, y);
  }

 private:
  const ScalarField<N>* field_;
  const Problem<N>* problem_;
};

// W(x, v) = alpha u(x + v) + beta * (disk average of u around x, orthogonal to v).
template <std::size_t N, typename Eval>
double direction_value(const Eval& u, const Vec<N>& x, const Vec<N>& v, const DiskRule<N>& rule,
                       Coefficients c) {
  double disk = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) disk += rule.weights[k] * u(x + rule.nodes[k]);
  if (c.alpha == 0.0) return c.beta * disk;
  return c.alpha * u(x + v) + c.beta * disk;
}

template <std::size_t N>
double direction_value(const ScalarField<N>& field, const Vec<N>& x, const Vec<N>& v,
                       const DiskRule<N>& rule, const Problem<N>& problem) {
  return direction_value(IterateView<N>(field, problem), x, v, rule, problem.coeffs());
}

struct DirectionExtrema {
  double max = -std::numeric_limits<double>::infinity();
  double min = std::numeric_limits<double>::infinity();
  std::size_t argmax = 0;
  std::size_t argmin = 0;
};

// Max and min of W(x, .) over the direction set; ties go to the lowest index.
template <std::size_t N, typename Eval>
DirectionExtrema direction_extrema(const Eval& u, const Vec<N>& x, const Stencil<N>& stencil,
                                   Coefficients c) {
  require(stencil.directions.size() > 0, "empty direction set");
  DirectionExtrema e;
  for (std::size_t i = 0; i < stencil.directions.size(); ++i) {
    const double w = direction_value(u, x, stencil.directions.vectors[i], stencil.rules[i], c);
    if (w > e.max) e.max = w, e.argmax = i;
    if (w < e.min) e.min = w, e.argmin = i;
  }
  return e;
}

template <std::size_t N, typename Eval>
double tilde_I(const Eval& u, const Vec<N>& x, const Stencil<N>& stencil, Coefficients c) {
  const auto e = direction_extrema(u, x, stencil, c);
  return 0.5 * (e.max + e.min);
}

template <std::size_t N>
double tilde_I(const ScalarField<N>& field, const Vec<N>& x, const Problem<N>& problem) {
  return tilde_I(IterateView<N>(field, problem), x, problem.stencil(), problem.coeffs());
}

// Boundary-corrected operator at one point of Ω_ε for an arbitrary
// evaluator of u.
template <std::size_t N, typename Eval>
double apply_I_point(const Eval& u, const Vec<N>& x, const Problem<N>& problem) {
  const double sd = problem.domain().signed_distance(x);
  const Region r = classify_signed_distance(sd, problem.epsilon());
  switch (r) {
    case Region::Outside:
      throw ContractViolation("operator applied outside the thickened domain");
    case Region::OuterStrip:
      return problem.boundary()(x);
    case Region::InteriorBulk:
      return tilde_I(u, x, problem.stencil(), problem.coeffs());
    case Region::InnerStrip:
      break;
  }
  const double delta = cutoff_from_signed_distance(sd, problem.epsilon());
  const double inner = tilde_I(u, x, problem.stencil(), problem.coeffs());
  return (1.0 - delta) * inner + delta * problem.boundary()(x);
}

template <std::size_t N>
double apply_I_point(const ScalarField<N>& field, const Vec<N>& x, const Problem<N>& problem) {
  return apply_I_point(IterateView<N>(field, problem), x, problem);
}

// One Jacobi sweep u -> I u over every node of Ω_ε. Outside nodes stay 0.
template <std::size_t N>
ScalarField<N> apply_I(const ScalarField<N>& field, const Problem<N>& problem) {
  require(field.lattice() == problem.lattice() || field.grid() == problem.lattice()->grid,
          "field does not live on the problem lattice");
  ScalarField<N> out(field.lattice(), 0.0);
  const IterateView<N> view(field, problem);
  parallel_for(field.size(), problem.workers(), [&](std::size_t l) {
    if (!in_thickened(field.region(l))) return;
    out[l] = apply_I_point(view, field.grid().position(l), problem);
  });
  return out;
}

// Node sweeps of an arbitrary evaluator: the mean operator on the nodes of
// Ω, and the full operator on the nodes of Ω_ε.
template <std::size_t N, typename Eval>
ScalarField<N> tilde_I_sweep(const Eval& u, const Problem<N>& problem) {
  ScalarField<N> out(problem.lattice(), 0.0);
  parallel_for(out.size(), problem.workers(), [&](std::size_t l) {
    if (!in_domain(out.region(l))) return;
    out[l] = tilde_I(u, out.grid().position(l), problem.stencil(), problem.coeffs());
  });
  return out;
}

template <std::size_t N, typename Eval>
ScalarField<N> apply_I_sweep(const Eval& u, const Problem<N>& problem) {
  ScalarField<N> out(problem.lattice(), 0.0);
  parallel_for(out.size(), problem.workers(), [&](std::size_t l) {
    if (!in_thickened(out.region(l))) return;
    out[l] = apply_I_point(u, out.grid().position(l), problem);
  });
  return out;
}

}  // namespace orthonoise
