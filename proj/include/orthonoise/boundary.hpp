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
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "orthonoise/error.hpp"
#include "orthonoise/geometry.hpp"
#include "orthonoise/vec.hpp"

namespace orthonoise {

// Boundary data families. Every closed form is defined on all of R^n (the
// radial family away from its center); the strip restriction is enforced by
// the checked evaluation below.
namespace boundary {

template <std::size_t N>
struct Affine {
  Vec<N> a{};
  double b = 0.0;
};

// scale * |x - center|^2 + offset
template <std::size_t N>
struct Quadratic {
  Vec<N> center{};
  double scale = 1.0;
  double offset = 0.0;
};

// scale * phi(|x - center|) + offset with phi(r) = r^((p-n)/(p-1)), or
// log r when p = n: the radial p-harmonic profiles.
template <std::size_t N>
struct RadialPHarmonic {
  Vec<N> center{};
  double p = 2.0;
  double scale = 1.0;
  double offset = 0.0;
};

// slope * |x - vertex| + offset
template <std::size_t N>
struct Cone {
  Vec<N> vertex{};
  double slope = 1.0;
  double offset = 0.0;
};

// Nearest-sample lookup with a declared Lipschitz constant.
template <std::size_t N>
struct Tabulated {
  std::vector<Vec<N>> points;
  std::vector<double> values;
  double lipschitz = 0.0;
};

}  // namespace boundary

template <std::size_t N>
class BoundarySpec {
 public:
  using Family = std::variant<boundary::Affine<N>, boundary::Quadratic<N>,
                              boundary::RadialPHarmonic<N>, boundary::Cone<N>,
                              boundary::Tabulated<N>>;

  BoundarySpec() : family_(boundary::Affine<N>{}) {}
  explicit BoundarySpec(Family f) : family_(std::move(f)) { validate(); }

  static BoundarySpec constant(double c) { return BoundarySpec(boundary::Affine<N>{Vec<N>{}, c}); }
  static BoundarySpec affine(const Vec<N>& a, double b) {
    return BoundarySpec(boundary::Affine<N>{a, b});
  }
  static BoundarySpec quadratic(const Vec<N>& center, double scale = 1.0, double offset = 0.0) {
    return BoundarySpec(boundary::Quadratic<N>{center, scale, offset});
  }
  static BoundarySpec radial_pharmonic(const Vec<N>& center, double p, double scale = 1.0,
                                       double offset = 0.0) {
    return BoundarySpec(boundary::RadialPHarmonic<N>{center, p, scale, offset});
  }
  static BoundarySpec cone(const Vec<N>& vertex, double slope = 1.0, double offset = 0.0) {
    return BoundarySpec(boundary::Cone<N>{vertex, slope, offset});
  }
  static BoundarySpec tabulated(std::vector<Vec<N>> points, std::vector<double> values,
                                double lipschitz) {
    return BoundarySpec(boundary::Tabulated<N>{std::move(points), std::move(values), lipschitz});
  }

  const Family& family() const { return family_; }

  std::string kind() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, boundary::Affine<N>>) return "affine";
          else if constexpr (std::is_same_v<F, boundary::Quadratic<N>>) return "quadratic";
          else if constexpr (std::is_same_v<F, boundary::RadialPHarmonic<N>>) return "radial_pharmonic";
          else if constexpr (std::is_same_v<F, boundary::Cone<N>>) return "cone";
          else return "tabulated";
        },
        family_);
  }

  // Closed-form evaluation with no strip check.
  double operator()(const Vec<N>& x) const {
    return std::visit([&](const auto& f) { return eval(f, x); }, family_);
  }

 private:
  void validate() const {
    if (const auto* r = std::get_if<boundary::RadialPHarmonic<N>>(&family_))
      require(r->p > 1.0, "radial p-harmonic data needs p > 1");
    if (const auto* t = std::get_if<boundary::Tabulated<N>>(&family_)) {
      require(!t->points.empty() && t->points.size() == t->values.size(),
              "tabulated data needs matching, nonempty points and values");
      require(t->lipschitz >= 0.0, "tabulated Lipschitz constant must be nonnegative");
    }
  }

  static double eval(const boundary::Affine<N>& f, const Vec<N>& x) { return dot(f.a, x) + f.b; }
  static double eval(const boundary::Quadratic<N>& f, const Vec<N>& x) {
    const Vec<N> d = x - f.center;
    return f.scale * dot(d, d) + f.offset;
  }
  static double eval(const boundary::RadialPHarmonic<N>& f, const Vec<N>& x) {
    return f.scale * radial_profile(f.p, distance(x, f.center)) + f.offset;
  }
  static double eval(const boundary::Cone<N>& f, const Vec<N>& x) {
    return f.slope * distance(x, f.vertex) + f.offset;
  }
  static double eval(const boundary::Tabulated<N>& f, const Vec<N>& x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.points.size(); ++i) {
      const double d = distance(x, f.points[i]);
      if (d < best_d) best_d = d, best = i;
    }
    return f.values[best];
  }

 public:
  // Radial p-harmonic profile in dimension N.
  static double radial_profile(double p, double r) {
    require(r > 0.0, "radial p-harmonic data evaluated at its center");
    if (p == static_cast<double>(N)) return std::log(r);
    return std::pow(r, (p - static_cast<double>(N)) / (p - 1.0));
  }
  static double radial_profile_derivative(double p, double r) {
    if (p == static_cast<double>(N)) return 1.0 / r;
    const double e = (p - static_cast<double>(N)) / (p - 1.0);
    return e * std::pow(r, e - 1.0);
  }

 private:
  Family family_;
};

// Checked evaluation: F is only defined on the boundary strip Γ_ε.
template <std::size_t N>
double boundary_value(const BoundarySpec<N>& F, const Domain<N>& domain, double epsilon,
                      const Vec<N>& x) {
  const Region r = classify_region(domain, epsilon, x);
  require(in_boundary_strip(r), "boundary data evaluated off the boundary strip");
  return F(x);
}

template <std::size_t N>
double boundary_value(const BoundarySpec<N>& F, const Vec<N>& x) {
  return F(x);
}

// Exact range of |x - c| over Γ_ε.
template <std::size_t N>
std::pair<double, double> strip_radial_range(const Domain<N>& domain, double epsilon,
                                             const Vec<N>& c) {
  const double rmin = std::max(0.0, std::abs(domain.signed_distance(c)) - epsilon);
  double rmax = 0.0;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball<N>>) {
          rmax = distance(c, s.center) + s.radius;
        } else if constexpr (std::is_same_v<S, Annulus<N>>) {
          rmax = distance(c, s.center) + s.r_outer;
        } else {
          for (std::size_t corner = 0; corner < (std::size_t{1} << N); ++corner) {
            Vec<N> q{};
            for (std::size_t a = 0; a < N; ++a) q[a] = (corner >> a) & 1U ? s.hi[a] : s.lo[a];
            rmax = std::max(rmax, distance(c, q));
          }
        }
      },
      domain.shape());
  return {rmin, rmax + epsilon};
}

namespace detail {

template <std::size_t N>
std::optional<std::pair<double, double>> analytic_range(const BoundarySpec<N>& F,
                                                        const Domain<N>& domain, double epsilon) {
  using Range = std::pair<double, double>;
  auto monotone = [](double lo_val, double hi_val) -> Range {
    return {std::min(lo_val, hi_val), std::max(lo_val, hi_val)};
  };
  return std::visit(
      [&](const auto& f) -> std::optional<Range> {
        using Fam = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<Fam, boundary::Affine<N>>) {
          const double la = norm(f.a);
          double hi = -INFINITY;
          double lo = INFINITY;
          std::visit(
              [&](const auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Box<N>>) {
                  for (std::size_t corner = 0; corner < (std::size_t{1} << N); ++corner) {
                    Vec<N> q{};
                    for (std::size_t a = 0; a < N; ++a) q[a] = (corner >> a) & 1U ? s.hi[a] : s.lo[a];
                    hi = std::max(hi, dot(f.a, q) + la * epsilon + f.b);
                    lo = std::min(lo, dot(f.a, q) - la * epsilon + f.b);
                  }
                } else {
                  double r;
                  if constexpr (std::is_same_v<S, Ball<N>>) r = s.radius;
                  else r = s.r_outer;
                  const double mid = dot(f.a, s.center) + f.b;
                  hi = mid + la * (r + epsilon);
                  lo = mid - la * (r + epsilon);
                }
              },
              domain.shape());
          return Range{lo, hi};
        } else if constexpr (std::is_same_v<Fam, boundary::Quadratic<N>>) {
          const auto [r0, r1] = strip_radial_range(domain, epsilon, f.center);
          return monotone(f.scale * r0 * r0 + f.offset, f.scale * r1 * r1 + f.offset);
        } else if constexpr (std::is_same_v<Fam, boundary::Cone<N>>) {
          const auto [r0, r1] = strip_radial_range(domain, epsilon, f.vertex);
          return monotone(f.slope * r0 + f.offset, f.slope * r1 + f.offset);
        } else if constexpr (std::is_same_v<Fam, boundary::RadialPHarmonic<N>>) {
          const auto [r0, r1] = strip_radial_range(domain, epsilon, f.center);
          require(r0 > 0.0, "radial p-harmonic data needs its center away from the strip");
          return monotone(F(f.center + r0 * unit_vector<N>(0)), F(f.center + r1 * unit_vector<N>(0)));
        } else {
          return std::nullopt;
        }
      },
      F.family());
}

}  // namespace detail

// Lipschitz constant of F on Γ_ε.
template <std::size_t N>
double boundary_lipschitz(const BoundarySpec<N>& F, const Domain<N>& domain, double epsilon) {
  return std::visit(
      [&](const auto& f) -> double {
        using Fam = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<Fam, boundary::Affine<N>>) {
          return norm(f.a);
        } else if constexpr (std::is_same_v<Fam, boundary::Quadratic<N>>) {
          return 2.0 * std::abs(f.scale) * strip_radial_range(domain, epsilon, f.center).second;
        } else if constexpr (std::is_same_v<Fam, boundary::Cone<N>>) {
          return std::abs(f.slope);
        } else if constexpr (std::is_same_v<Fam, boundary::RadialPHarmonic<N>>) {
          const auto [r0, r1] = strip_radial_range(domain, epsilon, f.center);
          require(r0 > 0.0, "radial p-harmonic data needs its center away from the strip");
          return std::abs(f.scale) * std::max(std::abs(BoundarySpec<N>::radial_profile_derivative(f.p, r0)),
                                              std::abs(BoundarySpec<N>::radial_profile_derivative(f.p, r1)));
        } else {
          return f.lipschitz;
        }
      },
      F.family());
}

// inf and sup of F over Γ_ε: dense sampling of the strip at spacing h/2,
// merged with the exact extrema where the family allows.
template <std::size_t N>
std::pair<double, double> inf_sup_boundary(const BoundarySpec<N>& F, const Domain<N>& domain,
                                           double epsilon, double h) {
  require(epsilon > 0.0 && h > 0.0, "inf_sup_boundary needs positive epsilon and h");
  const double step = 0.5 * h;
  const auto b = domain.bounds();
  std::array<std::size_t, N> count{};
  std::size_t total = 1;
  for (std::size_t a = 0; a < N; ++a) {
    count[a] = static_cast<std::size_t>(std::ceil((b.hi[a] - b.lo[a] + 2.0 * epsilon) / step)) + 1;
    total *= count[a];
  }
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t l = 0; l < total; ++l) {
    std::size_t rem = l;
    Vec<N> x{};
    for (std::size_t a = N; a-- > 0;) {
      x[a] = std::min(b.lo[a] - epsilon + static_cast<double>(rem % count[a]) * step, b.hi[a] + epsilon);
      rem /= count[a];
    }
    if (std::abs(domain.signed_distance(x)) > epsilon) continue;
    const double v = F(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (const auto exact = detail::analytic_range(F, domain, epsilon)) {
    lo = std::min(lo, exact->first);
    hi = std::max(hi, exact->second);
  }
  require(std::isfinite(lo) && std::isfinite(hi), "boundary strip sampling found no points");
  return {lo, hi};
}

}  // namespace orthonoise
