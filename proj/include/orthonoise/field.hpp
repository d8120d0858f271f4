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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "orthonoise/error.hpp"
#include "orthonoise/geometry.hpp"
#include "orthonoise/vec.hpp"

namespace orthonoise {

// Uniform lattice aligned with the origin: node i along axis a sits at
// (first[a] + i) * h.
template <std::size_t N>
struct Grid {
  double h = 0.0;
  std::array<std::int64_t, N> first{};
  std::array<std::size_t, N> count{};

  // Lattice over the bounding box of Ω_ε plus one extra cell on every side.
  static Grid covering(const Domain<N>& domain, double epsilon, double h) {
    require(h > 0.0, "grid spacing must be positive");
    require(epsilon > 0.0, "epsilon must be positive");
    const auto b = domain.bounds();
    Grid g;
    g.h = h;
    for (std::size_t a = 0; a < N; ++a) {
      const auto lo = static_cast<std::int64_t>(std::floor((b.lo[a] - epsilon) / h)) - 1;
      const auto hi = static_cast<std::int64_t>(std::ceil((b.hi[a] + epsilon) / h)) + 1;
      g.first[a] = lo;
      g.count[a] = static_cast<std::size_t>(hi - lo + 1);
    }
    return g;
  }

  std::size_t size() const {
    std::size_t s = 1;
    for (auto c : count) s *= c;
    return s;
  }

  std::size_t linear(const std::array<std::size_t, N>& idx) const {
    std::size_t l = 0;
    for (std::size_t a = 0; a < N; ++a) l = l * count[a] + idx[a];
    return l;
  }

  std::array<std::size_t, N> multi(std::size_t l) const {
    std::array<std::size_t, N> idx{};
    for (std::size_t a = N; a-- > 0;) {
      idx[a] = l % count[a];
      l /= count[a];
    }
    return idx;
  }

  Vec<N> position(const std::array<std::size_t, N>& idx) const {
    Vec<N> x{};
    for (std::size_t a = 0; a < N; ++a)
      x[a] = static_cast<double>(first[a] + static_cast<std::int64_t>(idx[a])) * h;
    return x;
  }

  Vec<N> position(std::size_t l) const { return position(multi(l)); }

  bool operator==(const Grid&) const = default;
};

// A grid together with the region class of every node for a fixed (Ω, ε).
template <std::size_t N>
struct Lattice {
  Grid<N> grid;
  std::vector<Region> regions;

  static std::shared_ptr<const Lattice> build(const Domain<N>& domain, double epsilon, double h) {
    auto lat = std::make_shared<Lattice>();
    lat->grid = Grid<N>::covering(domain, epsilon, h);
    lat->regions.resize(lat->grid.size());
    for (std::size_t l = 0; l < lat->regions.size(); ++l)
      lat->regions[l] = classify_region(domain, epsilon, lat->grid.position(l));
    return lat;
  }
};

// Grid sample of a function on Ω_ε. Outside nodes hold 0 and are never read
// by `sample`. Copies share the lattice.
template <std::size_t N>
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(std::shared_ptr<const Lattice<N>> lattice, double fill)
      : lattice_(std::move(lattice)), values_(lattice_->grid.size(), 0.0) {
    for (std::size_t l = 0; l < values_.size(); ++l)
      if (in_thickened(lattice_->regions[l])) values_[l] = fill;
  }

  template <typename Fn>
  static ScalarField from_function(std::shared_ptr<const Lattice<N>> lattice, Fn&& fn) {
    ScalarField f(std::move(lattice), 0.0);
    for (std::size_t l = 0; l < f.values_.size(); ++l)
      if (in_thickened(f.region(l))) f.values_[l] = fn(f.grid().position(l));
    return f;
  }

  const Grid<N>& grid() const { return lattice_->grid; }
  const std::shared_ptr<const Lattice<N>>& lattice() const { return lattice_; }
  Region region(std::size_t l) const { return lattice_->regions[l]; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t l) const { return values_[l]; }
  double& operator[](std::size_t l) { return values_[l]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  std::shared_ptr<const Lattice<N>> lattice_;
  std::vector<double> values_;
};

// Multilinear interpolation. Coordinates within 1e-10 cells of a lattice
// line snap onto it so node values are reproduced exactly.
template <std::size_t N>
double sample(const ScalarField<N>& field, const Vec<N>& x) {
  const auto& g = field.grid();
  std::array<std::size_t, N> cell{};
  std::array<double, N> t{};
  for (std::size_t a = 0; a < N; ++a) {
    double s = x[a] / g.h - static_cast<double>(g.first[a]);
    const double r = std::round(s);
    if (std::abs(s - r) <= 1e-10) s = r;
    const double last = static_cast<double>(g.count[a] - 1);
    if (!(s >= 0.0 && s <= last))
      throw ContractViolation("sample point outside the covered box");
    double c = std::floor(s);
    if (c >= last) c = last - 1.0;
    cell[a] = static_cast<std::size_t>(c);
    t[a] = s - c;
  }
  double result = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << N); ++corner) {
    double w = 1.0;
    std::array<std::size_t, N> idx = cell;
    for (std::size_t a = 0; a < N; ++a) {
      if (corner & (std::size_t{1} << a)) {
        w *= t[a];
        idx[a] += 1;
      } else {
        w *= 1.0 - t[a];
      }
    }
    if (w == 0.0) continue;
    const std::size_t l = g.linear(idx);
    if (!in_thickened(field.region(l)))
      throw ContractViolation("sample stencil touches a node outside the thickened domain");
    result += w * field[l];
  }
  return result;
}

// Largest difference quotient over neighbouring node pairs (axis and
// diagonal neighbours) whose both ends satisfy `keep`. A lower bound for the
// true Lipschitz constant.
template <std::size_t N>
double lipschitz_estimate(const ScalarField<N>& field, const std::function<bool(Region)>& keep) {
  const auto& g = field.grid();
  for (std::size_t a = 0; a < N; ++a)
    require(g.count[a] >= 2, "lipschitz estimate needs two nodes per axis");
  // Offsets in {-1,0,1}^N whose first nonzero entry is +1.
  std::vector<std::array<int, N>> offsets;
  std::size_t total = 1;
  for (std::size_t a = 0; a < N; ++a) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::array<int, N> o{};
    std::size_t c = code;
    for (std::size_t a = 0; a < N; ++a) {
      o[a] = static_cast<int>(c % 3) - 1;
      c /= 3;
    }
    int lead = 0;
    for (std::size_t a = 0; a < N && lead == 0; ++a) lead = o[a];
    if (lead == 1) offsets.push_back(o);
  }
  double best = 0.0;
  for (std::size_t l = 0; l < g.size(); ++l) {
    if (!keep(field.region(l))) continue;
    const auto idx = g.multi(l);
    for (const auto& o : offsets) {
      std::array<std::size_t, N> j{};
      bool valid = true;
      double len2 = 0.0;
      for (std::size_t a = 0; a < N && valid; ++a) {
        const auto v = static_cast<std::int64_t>(idx[a]) + o[a];
        if (v < 0 || v >= static_cast<std::int64_t>(g.count[a])) valid = false;
        j[a] = static_cast<std::size_t>(v);
        len2 += static_cast<double>(o[a] * o[a]);
      }
      if (!valid) continue;
      const std::size_t m = g.linear(j);
      if (!keep(field.region(m))) continue;
      best = std::max(best, std::abs(field[m] - field[l]) / (g.h * std::sqrt(len2)));
    }
  }
  return best;
}

template <std::size_t N>
double lipschitz_estimate(const ScalarField<N>& field) {
  return lipschitz_estimate(field, [](Region r) { return in_thickened(r); });
}

}  // namespace orthonoise
