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

#include <cmath>

#include <gtest/gtest.h>

#include "orthonoise/dpp.hpp"
#include "orthonoise/rng.hpp"

namespace orthonoise {
namespace {

TEST(Coefficients, Examples) {
  auto c = coefficients(2.0, 2);
  EXPECT_DOUBLE_EQ(c.alpha, 0.25);
  EXPECT_DOUBLE_EQ(c.beta, 0.75);
  c = coefficients(3.0, 2);
  EXPECT_DOUBLE_EQ(c.alpha, 0.4);
  EXPECT_DOUBLE_EQ(c.beta, 0.6);
  c = alpha_zero_coefficients();
  EXPECT_EQ(c.alpha, 0.0);
  EXPECT_EQ(c.beta, 1.0);
  for (double p : {1.01, 1.5, 2.0, 7.0, 1e6})
    for (std::size_t n : {2, 3, 5}) {
      c = coefficients(p, n);
      EXPECT_NEAR(c.alpha + c.beta, 1.0, 1e-15);
      EXPECT_GE(c.alpha, 0.0);
      EXPECT_GT(c.beta, 0.0);
    }
  EXPECT_THROW(coefficients(1.0, 2), ContractViolation);
  EXPECT_THROW(coefficients(0.5, 2), ContractViolation);
  EXPECT_THROW(coefficients(2.0, 1), ContractViolation);
}

// Independent sampler for the uniform measure on the (n-1)-ball of radius
// eps orthogonal to v: rejection in the cube, then an orthonormal frame
// from Gram-Schmidt on random vectors.
template <std::size_t N>
Vec<N> sample_mu(const Vec<N>& v, double eps, Stream& rng) {
  std::array<Vec<N>, N> frame{};
  frame[0] = (1.0 / norm(v)) * v;
  for (std::size_t k = 1; k < N; ++k) {
    Vec<N> w;
    do {
      for (auto& c : w) c = rng.uniform() - 0.5;
      for (std::size_t j = 0; j < k; ++j) w = w - dot(w, frame[j]) * frame[j];
    } while (norm(w) < 1e-3);
    frame[k] = (1.0 / norm(w)) * w;
  }
  std::array<double, N - 1> t{};
  double r2;
  do {
    r2 = 0.0;
    for (auto& c : t) c = 2 * rng.uniform() - 1, r2 += c * c;
  } while (r2 > 1.0);
  Vec<N> z{};
  for (std::size_t k = 1; k < N; ++k) z = z + (eps * t[k - 1]) * frame[k];
  return z;
}

struct McValue {
  double mean;
  double se;
};

template <std::size_t N, typename Fn>
McValue mc_direction_value(const Fn& u, const Vec<N>& x, const Vec<N>& v, double eps, Coefficients c,
                           Stream& rng, int samples) {
  CompensatedSum s, s2;
  for (int i = 0; i < samples; ++i) {
    const double y = u(x + sample_mu(v, eps, rng));
    s.add(y);
    s2.add(y * y);
  }
  const double m = s.value() / samples;
  const double var = (s2.value() - samples * m * m) / (samples - 1);
  return {c.alpha * u(x + v) + c.beta * m, c.beta * std::sqrt(var / samples)};
}

Problem<2> ball_problem(BoundarySpec<2> F, double eps = 0.3, std::optional<double> p = 2.0) {
  ProblemSpec<2> s;
  s.p = p;
  s.epsilon = eps;
  s.boundary = std::move(F);
  return Problem<2>(s);
}

TEST(DirectionValue, ConstantAndAffine) {
  const auto P = ball_problem(BoundarySpec<2>::constant(0.0), 0.3, 3.0);
  const auto cst = P.constant_field(-2.25);
  const Vec<2> a{0.7, -1.3};
  const auto aff = ScalarField<2>::from_function(P.lattice(), [&](const Vec<2>& x) { return dot(a, x) + 0.4; });
  const Vec<2> x{0.2, -0.35};
  for (std::size_t i = 0; i < P.stencil().directions.size(); ++i) {
    const auto& v = P.stencil().directions.vectors[i];
    EXPECT_NEAR(direction_value(cst, x, v, P.stencil().rules[i], P), -2.25, 1e-14);
    EXPECT_NEAR(direction_value(aff, x, v, P.stencil().rules[i], P), dot(a, x) + 0.4 + P.coeffs().alpha * dot(a, v),
                1e-12);
  }
}

TEST(DirectionValue, SecondMomentAtOrigin) {
  for (auto p : {std::optional<double>(2.0), std::optional<double>(5.0), std::optional<double>()}) {
    const double eps = 0.3;
    const auto P = ball_problem(BoundarySpec<2>::constant(0.0), eps, p);
    const auto c = P.coeffs();
    const double expected = c.alpha * eps * eps + c.beta * eps * eps / 3.0;
    auto sq = [](const Vec<2>& y) { return dot(y, y); };
    Stream rng(11);
    const auto mc = mc_direction_value(sq, Vec<2>{0, 0}, P.stencil().directions.vectors[3], eps, c, rng, 200000);
    // Monte Carlo oracle agrees with the closed form.
    EXPECT_NEAR(mc.mean, expected, 4 * mc.se);
    const auto field = ScalarField<2>::from_function(P.lattice(), sq);
    const double h = P.h();
    for (std::size_t i = 0; i < P.stencil().directions.size(); ++i) {
      const auto& v = P.stencil().directions.vectors[i];
      EXPECT_NEAR(direction_value(sq, Vec<2>{0, 0}, v, P.stencil().rules[i], c), expected, 1e-15);
      // Multilinear interpolation of |x|^2 overshoots by at most h^2/4 per axis.
      EXPECT_NEAR(direction_value(field, Vec<2>{0, 0}, v, P.stencil().rules[i], P), expected, h * h / 2);
    }
    EXPECT_NEAR(tilde_I(sq, Vec<2>{0, 0}, P.stencil(), c), expected, 1e-15);
  }
}

TEST(DirectionValue, AgreesWithMonteCarloOnCubics) {
  auto u = [](const Vec<3>& y) { return y[0] * y[0] * y[1] - 0.5 * y[2] * y[2] * y[2] + y[0] * y[1] * y[2] + y[1]; };
  const double eps = 0.4;
  const auto st = Stencil<3>::make(eps, 8, 6);
  const auto c = coefficients(3.0, 3);
  Stream rng(12);
  const Vec<3> x{0.1, -0.2, 0.3};
  for (std::size_t i : {0, 3, 5}) {
    const auto& v = st.directions.vectors[i];
    const auto mc = mc_direction_value(u, x, v, eps, c, rng, 400000);
    EXPECT_NEAR(direction_value(u, x, v, st.rules[i], c), mc.mean, 4 * mc.se);
  }
}

TEST(TildeI, ConstantAndAffine) {
  const Vec<2> a{-1.1, 0.6};
  const auto P = ball_problem(BoundarySpec<2>::affine(a, -0.25), 0.3, 4.0);
  const auto Q = ball_problem(BoundarySpec<2>::constant(3.0), 0.3, 4.0);
  EXPECT_NEAR(tilde_I(Q.constant_field(3.0), Vec<2>{0.1, 0.1}, Q), 3.0, 1e-14);
  auto u = [&](const Vec<2>& y) { return dot(a, y) - 0.25; };
  const auto field = ScalarField<2>::from_function(P.lattice(), u);
  Stream rng(13);
  for (int t = 0; t < 100; ++t) {
    const Vec<2> x{1.2 * rng.uniform() - 0.6, 1.2 * rng.uniform() - 0.6};
    EXPECT_NEAR(tilde_I(u, x, P.stencil(), P.coeffs()), u(x), 1e-14);
    EXPECT_NEAR(tilde_I(field, x, P), u(x), 1e-12);
  }
}

TEST(TildeI, RejectsEmptyDirectionSet) {
  Stencil<2> empty;
  auto u = [](const Vec<2>&) { return 0.0; };
  EXPECT_THROW(tilde_I(u, Vec<2>{0, 0}, empty, coefficients(2, 2)), ContractViolation);
}

TEST(ApplyIPoint, RegionCases) {
  const auto P = ball_problem(BoundarySpec<2>::constant(4.0), 0.3);
  auto two = [](const Vec<2>&) { return 2.0; };
  // delta = 1 - dist / eps = 0.5 at distance 0.15 inside the boundary.
  EXPECT_NEAR(apply_I_point(two, Vec<2>{0.85, 0}, P), 3.0, 1e-14);
  EXPECT_EQ(apply_I_point(two, Vec<2>{0.2, 0.1}, P), 2.0);
  EXPECT_EQ(apply_I_point(two, Vec<2>{1.1, 0}, P), 4.0);
  EXPECT_THROW(apply_I_point(two, Vec<2>{1.31, 0}, P), ContractViolation);
  // No reads on the outer strip.
  auto trap = [](const Vec<2>&) -> double { throw std::runtime_error("read"); };
  EXPECT_EQ(apply_I_point(trap, Vec<2>{0, -1.2}, P), 4.0);
}

TEST(ApplyI, FixedPoints) {
  const auto P = ball_problem(BoundarySpec<2>::constant(1.75));
  const auto out = apply_I(P.constant_field(1.75), P);
  for (std::size_t l = 0; l < out.size(); ++l)
    if (in_thickened(out.region(l))) EXPECT_NEAR(out[l], 1.75, 1e-14);

  const auto Q = ball_problem(BoundarySpec<2>::affine({0.8, -0.3}, 0.1), 0.3, 3.0);
  const auto aff = ScalarField<2>::from_function(Q.lattice(), [&](const Vec<2>& x) { return Q.boundary()(x); });
  const auto next = apply_I(aff, Q);
  for (std::size_t l = 0; l < next.size(); ++l) {
    if (!in_thickened(next.region(l))) continue;
    EXPECT_NEAR(next[l], aff[l], 1e-10);
    if (next.region(l) == Region::OuterStrip) EXPECT_EQ(next[l], Q.boundary()(next.grid().position(l)));
  }
}

TEST(ApplyI, OuterStripHoldsBoundaryDataForAnyField) {
  const auto P = ball_problem(BoundarySpec<2>::quadratic({0.2, 0}), 0.3);
  Stream rng(14);
  auto f = P.constant_field(0.0);
  for (std::size_t l = 0; l < f.size(); ++l) f[l] = 10 * rng.uniform();
  const auto out = apply_I(f, P);
  for (std::size_t l = 0; l < out.size(); ++l)
    if (out.region(l) == Region::OuterStrip) EXPECT_EQ(out[l], P.boundary()(out.grid().position(l)));
}

ScalarField<2> random_field(const Problem<2>& P, double lo, double hi, Stream& rng) {
  auto f = P.constant_field(0.0);
  for (std::size_t l = 0; l < f.size(); ++l)
    if (in_thickened(f.region(l))) f[l] = lo + (hi - lo) * rng.uniform();
  return f;
}

TEST(ApplyI, MonotoneAndRangePreserving) {
  const auto P = ball_problem(BoundarySpec<2>::cone({0.3, 0.2}, 1.0, -0.5), 0.25, 4.0);
  Stream rng(15);
  for (int t = 0; t < 4; ++t) {
    const auto u = random_field(P, P.inf_F(), P.sup_F(), rng);
    auto v = u;
    for (std::size_t l = 0; l < v.size(); ++l)
      if (in_thickened(v.region(l)) && rng.uniform() < 0.5) v[l] += rng.uniform() * (t % 2 ? 1e-9 : 0.3);
    const auto Iu = apply_I(u, P);
    const auto Iv = apply_I(v, P);
    for (std::size_t l = 0; l < Iu.size(); ++l) {
      if (!in_thickened(Iu.region(l))) continue;
      EXPECT_LE(Iu[l], Iv[l]);
      EXPECT_GE(Iu[l], P.inf_F());
      EXPECT_LE(Iu[l], P.sup_F());
    }
  }
}

TEST(ApplyI, LipschitzPropagation) {
  const auto P = ball_problem(BoundarySpec<2>::affine({0.5, 0.5}, 0.0), 0.3, 2.0);
  Stream rng(16);
  auto interior = [](Region r) { return in_domain(r); };
  for (int t = 0; t < 3; ++t) {
    std::vector<Vec<2>> vertices{{rng.uniform() - 0.5, rng.uniform() - 0.5}, {rng.uniform() - 0.5, rng.uniform()}};
    auto u = [&](const Vec<2>& x) { return 0.8 * distance(x, vertices[0]) - 0.6 * distance(x, vertices[1]) + x[1]; };
    const auto field = ScalarField<2>::from_function(P.lattice(), u);
    const double lip_u = lipschitz_estimate(field);
    const double tol = 10 * P.h() * lip_u;
    const IterateView<2> view(field, P);
    const auto mean = tilde_I_sweep(view, P);
    EXPECT_LE(lipschitz_estimate(mean, interior), 3 * lip_u + tol);
    const auto full = apply_I(field, P);
    double sup_u = 0.0;
    for (std::size_t l = 0; l < field.size(); ++l)
      if (in_thickened(field.region(l))) sup_u = std::max(sup_u, std::abs(field[l]));
    const double sup_F = std::max(std::abs(P.inf_F()), std::abs(P.sup_F()));
    const double lip_F = boundary_lipschitz(P.boundary(), P.domain(), P.epsilon());
    EXPECT_LE(lipschitz_estimate(full), std::max(3 * lip_u, lip_F) + (sup_F + sup_u) / P.epsilon() + tol);
  }
}

TEST(ApplyI, TranslationEquivariance) {
  const double eps = 0.25;
  const double h = 1.0 / 32;
  const Vec<2> shift{5 * h, -3 * h};
  ProblemSpec<2> a;
  a.p = 3.0;
  a.epsilon = eps;
  a.h = h;
  a.domain = Domain<2>::box({-0.5, -0.75}, {0.75, 0.5});
  a.boundary = BoundarySpec<2>::cone({0.25, -0.125}, 1.5, 0.0);
  ProblemSpec<2> b = a;
  b.domain = Domain<2>::box(Vec<2>{-0.5, -0.75} + shift, Vec<2>{0.75, 0.5} + shift);
  b.boundary = BoundarySpec<2>::cone(Vec<2>{0.25, -0.125} + shift, 1.5, 0.0);
  const Problem<2> PA(a), PB(b);
  Stream rng(17);
  const auto ua = random_field(PA, 0.0, 1.0, rng);
  auto ub = PB.constant_field(0.0);
  for (std::size_t l = 0; l < ub.size(); ++l) {
    if (!in_thickened(ub.region(l))) continue;
    auto m = ub.grid().multi(l);
    std::array<std::int64_t, 2> idx{};
    for (std::size_t k = 0; k < 2; ++k) {
      const std::int64_t off = k == 0 ? 5 : -3;
      idx[k] = ub.grid().first[k] + static_cast<std::int64_t>(m[k]) - off - ua.grid().first[k];
    }
    std::array<std::size_t, 2> ma{static_cast<std::size_t>(idx[0]), static_cast<std::size_t>(idx[1])};
    const std::size_t la = ua.grid().linear(ma);
    ASSERT_EQ(ua.region(la), ub.region(l));
    ub[l] = ua[la];
  }
  const auto ra = apply_I(ua, PA);
  const auto rb = apply_I(ub, PB);
  std::size_t compared = 0;
  for (std::size_t l = 0; l < rb.size(); ++l) {
    if (!in_thickened(rb.region(l))) continue;
    const auto pb = rb.grid().position(l);
    const auto pa = pb - shift;
    std::array<std::size_t, 2> ma{};
    for (std::size_t k = 0; k < 2; ++k)
      ma[k] = static_cast<std::size_t>(std::llround(pa[k] / h) - ra.grid().first[k]);
    EXPECT_NEAR(rb[l], ra[ra.grid().linear(ma)], 1e-12);
    ++compared;
  }
  EXPECT_GT(compared, 1000u);
}

TEST(ApplyI, WorkerCountDoesNotChangeBits) {
  auto P = ball_problem(BoundarySpec<2>::quadratic({0.1, 0.1}), 0.3, 2.5);
  Stream rng(18);
  const auto u = random_field(P, 0.0, 1.0, rng);
  const auto one = apply_I(u, P);
  P.set_workers(4);
  const auto four = apply_I(u, P);
  for (std::size_t l = 0; l < one.size(); ++l) EXPECT_EQ(one[l], four[l]);
}

TEST(ApplyI, InputIsUnmodified) {
  const auto P = ball_problem(BoundarySpec<2>::constant(1.0));
  Stream rng(19);
  const auto u = random_field(P, 0.0, 1.0, rng);
  const auto copy = u;
  (void)apply_I(u, P);
  for (std::size_t l = 0; l < u.size(); ++l) EXPECT_EQ(u[l], copy[l]);
}

}  // namespace
}  // namespace orthonoise
