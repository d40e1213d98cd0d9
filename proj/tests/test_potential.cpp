#include <doctest.h>

#include <cmath>

#include "acfb/errors.hpp"
#include "acfb/potential.hpp"
#include "acfb/rng.hpp"

using namespace acfb;

namespace {

Potential two_wells_1d(double alpha) {
  return Potential::make(1, {{-1.0}, {1.0}}, alpha);
}

}  // namespace

TEST_CASE("eval_W on the scalar double well") {
  Potential p = two_wells_1d(1.0);
  const double at_well = 1.0;
  CHECK(p.value({&at_well, 1}) == 0.0);

  const double mid = 0.0;
  CHECK(p.value({&mid, 1}) == doctest::Approx(1.0).epsilon(1e-15));

  Potential ph = two_wells_1d(0.5);
  const double u = 0.5;
  CHECK(ph.value({&u, 1}) == doctest::Approx(std::sqrt(1.5 * 0.5)).epsilon(1e-14));
}

TEST_CASE("eval_gradW: wells, symmetry point, interior") {
  Potential p = two_wells_1d(1.0);
  const auto pol = SingularityPolicy::subgradient();
  double g = 0.0;

  double u = -1.0;  // exactly at well 0
  p.grad({&u, 1}, pol, {&g, 1});
  CHECK(g == 0.0);

  u = 0.0;  // symmetric midpoint
  p.grad({&u, 1}, pol, {&g, 1});
  CHECK(g == doctest::Approx(0.0).epsilon(1e-15));

  u = 0.5;  // W = (1+u)(1-u) here, so W' = -2u
  p.grad({&u, 1}, pol, {&g, 1});
  CHECK(g == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("epsilon smoothing regularizes the gradient at wells") {
  Potential p = two_wells_1d(0.5);
  const auto pol = SingularityPolicy::smoothed(1e-3);
  double g = 0.0;
  double u = 1.0;
  p.grad({&u, 1}, pol, {&g, 1});
  CHECK(std::isfinite(g));
  u = 1.0 + 1e-6;
  p.grad({&u, 1}, pol, {&g, 1});
  CHECK(g > 0.0);
}

TEST_CASE("well_distance picks the nearest well, lowest index on ties") {
  Potential p = two_wells_1d(1.0);
  double u = 1.0;
  auto [i0, d0] = p.well_distance({&u, 1});
  CHECK(i0 == 1);
  CHECK(d0 == 0.0);

  u = 0.25;
  auto [i1, d1] = p.well_distance({&u, 1});
  CHECK(i1 == 1);
  CHECK(d1 == doctest::Approx(0.75));

  // Three wells on the unit circle with exactly representable coordinates;
  // the origin ties all three and the lowest index wins.
  Potential tri = Potential::make(2, {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}}, 1.0);
  const double origin[2] = {0.0, 0.0};
  auto [i2, d2] = tri.well_distance({origin, 2});
  CHECK(i2 == 0);
  CHECK(d2 == 1.0);
}

TEST_CASE("validate: passes constants, rejects bad alpha, samples bumps") {
  Potential p = two_wells_1d(1.0);
  p.g_lower_bound = 0.5;
  const auto rep = validate(p, 2.0);
  CHECK(rep.ok);
  CHECK(rep.paper_faithful);
  CHECK(rep.min_g_sampled == doctest::Approx(1.0));

  Potential bad = two_wells_1d(2.5);
  CHECK_THROWS_WITH_AS(validate(bad, 2.0), doctest::Contains("alpha out of range"),
                       ValidationFailure);

  Potential bump = two_wells_1d(1.0);
  bump.g.kind = Modulation::Kind::quadratic_bump;
  bump.g.base = 1.0;
  bump.g.amp = 1.0;
  bump.g_lower_bound = 1.0;
  const auto rep2 = validate(bump, 2.0);
  CHECK(rep2.ok);
  CHECK(rep2.min_g_sampled == doctest::Approx(1.0));  // minimum of 1+u^2 at u=0

  Potential single = Potential::make(1, {{0.0}}, 1.0);
  const auto rep3 = validate(single, 1.0);
  CHECK(rep3.ok);
  CHECK_FALSE(rep3.paper_faithful);
}

TEST_CASE("gradient matches central differences away from the wells") {
  const double co = std::cos(2.0 * M_PI / 3.0), si = std::sin(2.0 * M_PI / 3.0);
  Potential p = Potential::make(2, {{1.0, 0.0}, {co, si}, {co, -si}}, 1.0);
  p.g.kind = Modulation::Kind::quadratic_bump;
  p.g.base = 1.0;
  p.g.amp = 0.3;

  Rng rng(17);
  const auto pol = SingularityPolicy::subgradient();
  int tested = 0;
  while (tested < 100) {
    double u[2] = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    if (p.well_distance({u, 2}).second < 0.01) continue;
    ++tested;
    double g[2];
    p.grad({u, 2}, pol, {g, 2});
    const double step = 1e-6 * (1.0 + std::sqrt(norm2({u, 2})));
    for (int c = 0; c < 2; ++c) {
      double up[2] = {u[0], u[1]}, dn[2] = {u[0], u[1]};
      up[c] += step;
      dn[c] -= step;
      const double fd = (p.value({up, 2}) - p.value({dn, 2})) / (2.0 * step);
      const double scale = std::max(1.0, std::fabs(fd));
      CHECK(std::fabs(g[c] - fd) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("W and gradW are invariant under well permutations") {
  const double co = std::cos(2.0 * M_PI / 3.0), si = std::sin(2.0 * M_PI / 3.0);
  Potential a = Potential::make(2, {{1.0, 0.0}, {co, si}, {co, -si}}, 0.75);
  Potential b = Potential::make(2, {{co, -si}, {1.0, 0.0}, {co, si}}, 0.75);
  Rng rng(3);
  const auto pol = SingularityPolicy::subgradient();
  for (int t = 0; t < 50; ++t) {
    double u[2] = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    CHECK(a.value({u, 2}) == doctest::Approx(b.value({u, 2})).epsilon(1e-13));
    double ga[2], gb[2];
    a.grad({u, 2}, pol, {ga, 2});
    b.grad({u, 2}, pol, {gb, 2});
    for (int c = 0; c < 2; ++c)
      CHECK(ga[c] == doctest::Approx(gb[c]).epsilon(1e-12));
  }
}

TEST_CASE("gradient decay toward wells tracks the |u-a|^(alpha-1) factor") {
  // alpha > 1: |W_u| -> 0 through the well. alpha = 1: |W_u| stays bounded by
  // the neighboring-well product (the subdifferential radius), no blowup.
  const auto pol = SingularityPolicy::subgradient();
  for (double alpha : {1.5, 2.0}) {
    Potential p = two_wells_1d(alpha);
    double prev = 1e300;
    for (double d = 1e-2; d >= 1e-8; d *= 1e-2) {
      double u = 1.0 - d, g = 0.0;
      p.grad({&u, 1}, pol, {&g, 1});
      CHECK(std::fabs(g) < prev);
      prev = std::fabs(g);
    }
    // |W_u| ~ alpha d^(alpha-1) prod, so d = 1e-8 leaves ~4e-4 at alpha=1.5.
    CHECK(prev < 5.0 * alpha * std::pow(1e-8, alpha - 1.0) * std::pow(2.0, alpha));
  }
  Potential p1 = two_wells_1d(1.0);
  for (double d = 1e-3; d >= 1e-9; d *= 1e-3) {
    double u = 1.0 - d, g = 0.0;
    p1.grad({&u, 1}, pol, {&g, 1});
    CHECK(std::fabs(g) <= 2.0 * 1.01);  // prod_{k != i}|a_i - a_k| = 2
    CHECK(std::fabs(g) >= 2.0 * 0.99);
  }
}
