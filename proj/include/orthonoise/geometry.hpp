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
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "orthonoise/error.hpp"
#include "orthonoise/vec.hpp"

namespace orthonoise {

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

template <std::size_t N>
struct Ball {
  Vec<N> center{};
  double radius = 1.0;
};

template <std::size_t N>
struct Box {
  Vec<N> lo{};
  Vec<N> hi{};
};

template <std::size_t N>
struct Annulus {
  Vec<N> center{};
  double r_inner = 0.5;
  double r_outer = 1.0;
};

template <std::size_t N>
struct Bounds {
  Vec<N> lo{};
  Vec<N> hi{};
};

// A bounded domain with an exact signed distance. Negative inside.
template <std::size_t N>
class Domain {
 public:
  using Shape = std::variant<Ball<N>, Box<N>, Annulus<N>>;

  static Domain ball(const Vec<N>& center, double radius) {
    require(radius > 0.0 && std::isfinite(radius), "ball radius must be positive");
    return Domain(Ball<N>{center, radius});
  }

  static Domain box(const Vec<N>& lo, const Vec<N>& hi) {
    for (std::size_t i = 0; i < N; ++i)
      require(lo[i] < hi[i], "box requires lo < hi on every axis");
    return Domain(Box<N>{lo, hi});
  }

  static Domain annulus(const Vec<N>& center, double r_inner, double r_outer) {
    require(0.0 < r_inner && r_inner < r_outer, "annulus requires 0 < r_inner < r_outer");
    return Domain(Annulus<N>{center, r_inner, r_outer});
  }

  const Shape& shape() const { return shape_; }

  std::string kind() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Ball<N>>) return "ball";
          else if constexpr (std::is_same_v<S, Box<N>>) return "box";
          else return "annulus";
        },
        shape_);
  }

  double signed_distance(const Vec<N>& x) const {
    return std::visit([&](const auto& s) { return sd(s, x); }, shape_);
  }

  Bounds<N> bounds() const {
    return std::visit([](const auto& s) { return box_of(s); }, shape_);
  }

  // Radius of the smallest ball about x0 that contains the domain's
  // bounding box (used for the block length of exit-time bounds).
  double bounding_radius(const Vec<N>& x0) const {
    const auto b = bounds();
    double r2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double d = std::max(std::abs(b.lo[i] - x0[i]), std::abs(b.hi[i] - x0[i]));
      r2 += d * d;
    }
    if (const auto* ball = std::get_if<Ball<N>>(&shape_))
      return std::min(std::sqrt(r2), distance(x0, ball->center) + ball->radius);
    if (const auto* ann = std::get_if<Annulus<N>>(&shape_))
      return std::min(std::sqrt(r2), distance(x0, ann->center) + ann->r_outer);
    return std::sqrt(r2);
  }

 private:
  explicit Domain(Shape s) : shape_(std::move(s)) {}

  static double sd(const Ball<N>& b, const Vec<N>& x) { return distance(x, b.center) - b.radius; }

  static double sd(const Box<N>& b, const Vec<N>& x) {
    double outside2 = 0.0;
    double inside = -INFINITY;
    for (std::size_t i = 0; i < N; ++i) {
      const double c = 0.5 * (b.lo[i] + b.hi[i]);
      const double half = 0.5 * (b.hi[i] - b.lo[i]);
      const double q = std::abs(x[i] - c) - half;
      if (q > 0.0) outside2 += q * q;
      inside = std::max(inside, q);
    }
    return std::sqrt(outside2) + std::min(inside, 0.0);
  }

  static double sd(const Annulus<N>& a, const Vec<N>& x) {
    const double rho = distance(x, a.center);
    return std::max(a.r_inner - rho, rho - a.r_outer);
  }

  static Bounds<N> box_of(const Ball<N>& b) {
    Bounds<N> r;
    for (std::size_t i = 0; i < N; ++i) {
      r.lo[i] = b.center[i] - b.radius;
      r.hi[i] = b.center[i] + b.radius;
    }
    return r;
  }
  static Bounds<N> box_of(const Box<N>& b) { return {b.lo, b.hi}; }
  static Bounds<N> box_of(const Annulus<N>& a) {
    Bounds<N> r;
    for (std::size_t i = 0; i < N; ++i) {
      r.lo[i] = a.center[i] - a.r_outer;
      r.hi[i] = a.center[i] + a.r_outer;
    }
    return r;
  }

  Shape shape_;
};

template <std::size_t N>
double signed_distance(const Domain<N>& domain, const Vec<N>& x) {
  return domain.signed_distance(x);
}

// ---------------------------------------------------------------------------
// Boundary strips and the cutoff
// ---------------------------------------------------------------------------

enum class Region { InteriorBulk, InnerStrip, OuterStrip, Outside };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::InteriorBulk: return "InteriorBulk";
    case Region::InnerStrip: return "InnerStrip";
    case Region::OuterStrip: return "OuterStrip";
    case Region::Outside: return "Outside";
  }
  return "?";
}

inline Region region_from_string(const std::string& s) {
  if (s == "InteriorBulk") return Region::InteriorBulk;
  if (s == "InnerStrip") return Region::InnerStrip;
  if (s == "OuterStrip") return Region::OuterStrip;
  if (s == "Outside") return Region::Outside;
  throw ContractViolation("unknown region name: " + s);
}

// Closed domain: points with sd == 0 belong to Ω (and to the inner strip).
inline bool in_domain(Region r) { return r == Region::InteriorBulk || r == Region::InnerStrip; }
inline bool in_thickened(Region r) { return r != Region::Outside; }
inline bool in_boundary_strip(Region r) { return r == Region::InnerStrip || r == Region::OuterStrip; }

inline Region classify_signed_distance(double sd, double epsilon) {
  if (sd <= 0.0) return -sd <= epsilon ? Region::InnerStrip : Region::InteriorBulk;
  return sd <= epsilon ? Region::OuterStrip : Region::Outside;
}

template <std::size_t N>
Region classify_region(const Domain<N>& domain, double epsilon, const Vec<N>& x) {
  require(epsilon > 0.0, "epsilon must be positive");
  return classify_signed_distance(domain.signed_distance(x), epsilon);
}

// δ = 0 in the bulk, 1 - dist/ε on the inner strip, 1 on the outer strip.
inline double cutoff_from_signed_distance(double sd, double epsilon) {
  switch (classify_signed_distance(sd, epsilon)) {
    case Region::InteriorBulk: return 0.0;
    case Region::InnerStrip: return 1.0 + sd / epsilon;
    case Region::OuterStrip: return 1.0;
    case Region::Outside: break;
  }
  throw ContractViolation("cutoff requested outside the thickened domain");
}

template <std::size_t N>
double cutoff_delta(const Domain<N>& domain, double epsilon, const Vec<N>& x) {
  require(epsilon > 0.0, "epsilon must be positive");
  return cutoff_from_signed_distance(domain.signed_distance(x), epsilon);
}

// ---------------------------------------------------------------------------
// Move sphere
// ---------------------------------------------------------------------------

// Finite antipodally closed subset of the sphere of radius ε. The second
// half of `vectors` is the exact negation of the first half.
template <std::size_t N>
struct DirectionSet {
  double epsilon = 0.0;
  std::vector<Vec<N>> vectors;

  std::size_t size() const { return vectors.size(); }
  std::size_t antipode(std::size_t i) const {
    const std::size_t half = vectors.size() / 2;
    return i < half ? i + half : i - half;
  }
};

namespace detail {

inline std::pair<double, double> exact_unit_circle(std::size_t k, std::size_t m) {
  if ((4 * k) % m == 0) {
    switch ((4 * k / m) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace detail

template <std::size_t N>
DirectionSet<N> make_direction_set(double epsilon, std::size_t count) {
  static_assert(N == 2 || N == 3, "direction sets are provided for n = 2 and n = 3");
  require(epsilon > 0.0, "epsilon must be positive");
  require(count % 2 == 0, "direction count must be even for antipodal closure");
  require(count >= 2 * N, "direction count must be at least 2n");

  const std::size_t half = count / 2;
  std::vector<Vec<N>> first;
  first.reserve(half);
  if constexpr (N == 2) {
    for (std::size_t k = 0; k < half; ++k) {
      const auto [c, s] = detail::exact_unit_circle(k, count);
      first.push_back({epsilon * c, epsilon * s});
    }
  } else {
    for (std::size_t i = 0; i < 3; ++i) first.push_back(epsilon * unit_vector<3>(i));
    // Fibonacci lattice on the open upper hemisphere for the remainder.
    const std::size_t rest = half - 3;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < rest; ++i) {
      const double z = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(rest);
      const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i) + 0.25;
      Vec<3> u{rxy * std::cos(phi), rxy * std::sin(phi), z};
      first.push_back((epsilon / norm(u)) * u);
    }
  }

  DirectionSet<N> set{epsilon, first};
  for (std::size_t k = 0; k < half; ++k) set.vectors.push_back(-first[k]);
  return set;
}

// Orthonormal basis of the complement of v. In the plane this is v rotated
// by a quarter turn; in space the Householder reflection that sends v to
// its dominant axis supplies the other two columns.
template <std::size_t N>
std::array<Vec<N>, N - 1> orthonormal_complement(const Vec<N>& v) {
  const double len = norm(v);
  require(len > 0.0, "orthonormal complement of the zero vector");
  const Vec<N> u = (1.0 / len) * v;
  std::array<Vec<N>, N - 1> basis{};
  if constexpr (N == 2) {
    basis[0] = {-u[1], u[0]};
  } else {
    std::size_t k = 0;
    for (std::size_t i = 1; i < N; ++i)
      if (std::abs(u[i]) > std::abs(u[k])) k = i;
    const double s = u[k] >= 0.0 ? 1.0 : -1.0;
    Vec<N> w = u;
    w[k] += s;
    const double ww = dot(w, w);
    std::size_t out = 0;
    for (std::size_t j = 0; j < N; ++j) {
      if (j == k) continue;
      Vec<N> col = unit_vector<N>(j);
      col = col - (2.0 * w[j] / ww) * w;
      basis[out++] = col;
    }
  }
  return basis;
}

// Rotation in the plane spanned by unit vectors a and b that maps a to b,
// applied to z. Requires a != -b.
template <std::size_t N>
Vec<N> rotate_between(const Vec<N>& a, const Vec<N>& b, const Vec<N>& z) {
  const double c = dot(a, b);
  require(c > -1.0 + 1e-12, "rotation between antipodal vectors is not unique");
  // R z = z + (b a^T - a b^T) z + (b a^T - a b^T)^2 z / (1 + c)
  const double az = dot(a, z);
  const double bz = dot(b, z);
  const Vec<N> kz = az * b - bz * a;
  const double akz = dot(a, kz);
  const double bkz = dot(b, kz);
  const Vec<N> k2z = akz * b - bkz * a;
  return z + kz + (1.0 / (1.0 + c)) * k2z;
}

// ---------------------------------------------------------------------------
// Quadrature for the orthogonal disk measure
// ---------------------------------------------------------------------------

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss–Legendre on [-1, 1]. Nodes are mirrored so the rule is exactly
// symmetric.
inline GaussRule gauss_legendre(std::size_t k) {
  require(k >= 1, "Gauss rule needs at least one node");
  GaussRule rule{std::vector<double>(k), std::vector<double>(k)};
  const double n = static_cast<double>(k);
  // Returns (P_k(z), P_k'(z)).
  auto legendre = [&](double z) {
    double p1 = 1.0;
    double p2 = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
    }
    return std::pair{p1, n * (z * p1 - p2) / (z * z - 1.0)};
  };
  const std::size_t m = (k + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(z);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) <= 1e-16) break;
    }
    if (2 * i + 1 == k) z = 0.0;
    const double dp = legendre(z).second;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[k - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[k - 1 - i] = w;
  }
  return rule;
}

// Discrete stand-in for the uniform probability measure on the (n-1)-disk
// of radius ε orthogonal to a direction. Nodes come in ±z pairs.
template <std::size_t N>
struct DiskRule {
  std::vector<Vec<N>> nodes;
  std::vector<double> weights;
};

template <std::size_t N>
DiskRule<N> disk_quadrature(const Vec<N>& v, double epsilon, std::size_t k) {
  static_assert(N >= 2, "the orthogonal disk degenerates to a point for n = 1");
  require(epsilon > 0.0, "epsilon must be positive");
  require(k >= 2, "disk quadrature needs K >= 2");
  require(std::abs(norm(v) - epsilon) <= 1e-12 * epsilon, "direction must have length epsilon");
  const auto basis = orthonormal_complement(v);
  DiskRule<N> rule;
  if constexpr (N == 2) {
    const GaussRule g = gauss_legendre(k);
    const std::size_t m = (k + 1) / 2;
    rule.nodes.resize(k);
    rule.weights.resize(k);
    for (std::size_t i = 0; i < m; ++i) {
      const Vec<N> z = (epsilon * g.nodes[k - 1 - i]) * basis[0];
      rule.nodes[k - 1 - i] = z;
      rule.nodes[i] = (2 * i + 1 == k) ? z : -z;
      rule.weights[i] = 0.5 * g.weights[i];
      rule.weights[k - 1 - i] = 0.5 * g.weights[k - 1 - i];
    }
  } else {
    static_assert(N == 3, "disk quadrature is provided for n = 2 and n = 3");
    const std::size_t radial = (k + 1) / 2;
    const std::size_t angular = 2 * ((k + 1) / 2);
    const GaussRule g = gauss_legendre(radial);
    const std::size_t half = angular / 2;
    for (std::size_t i = 0; i < radial; ++i) {
      const double t = 0.5 * (1.0 + g.nodes[i]);
      const double r = epsilon * t;
      // radial density 2r/ε² on [0, ε], mapped from [-1, 1]
      const double wr = g.weights[i] * t / static_cast<double>(angular);
      std::vector<Vec<N>> ring;
      for (std::size_t j = 0; j < half; ++j) {
        const auto [c, s] = detail::exact_unit_circle(j, angular);
        ring.push_back(r * ((c * basis[0]) + (s * basis[1])));
      }
      for (std::size_t j = 0; j < half; ++j) {
        rule.nodes.push_back(ring[j]);
        rule.weights.push_back(wr);
      }
      for (std::size_t j = 0; j < half; ++j) {
        rule.nodes.push_back(-ring[j]);
        rule.weights.push_back(wr);
      }
    }
  }
  return rule;
}

}  // namespace orthonoise
