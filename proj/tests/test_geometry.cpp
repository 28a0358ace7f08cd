#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cavflow/geometry.hpp"

using namespace cavflow;
using doctest::Approx;

namespace {

Configuration single_centered() {
  Configuration cfg;
  cfg.R0 = 1.0;
  cfg.centers = {{0.0, 0.0}};
  cfg.areas = {3.0 * pi};
  return cfg;
}

Configuration symmetric_pair(double spread, double v_each) {
  Configuration cfg;
  cfg.R0 = 1.0;
  cfg.centers = {{-spread, 0.0}, {spread, 0.0}};
  cfg.areas = {v_each, v_each};
  return cfg;
}

// nine boundary disks in a tight ring plus two interior disks on midgap
// rays 160 degrees apart; every touching distance equals 2r exactly
Configuration melissen_eleven(double total_volume) {
  const double s = std::sin(pi / 9.0);
  const double r = s / (1.0 + s);
  const double rho = 2.0 * std::sin(pi / 18.0) / (1.0 + s);
  Configuration cfg;
  cfg.R0 = 1.0;
  for (int j = 0; j < 9; ++j)
    cfg.centers.push_back(unit_dir((2.0 * j + 1.0) * pi / 9.0) * (1.0 - r));
  cfg.centers.push_back(unit_dir(4.0 * pi / 9.0) * rho);
  cfg.centers.push_back(unit_dir(-4.0 * pi / 9.0) * rho);
  cfg.areas.assign(11, total_volume / 11.0);
  return cfg;
}

}  // namespace

TEST_CASE("stretch factor from volumes") {
  CHECK(lambda_from_volumes(1.0, std::vector<double>{3.0 * pi}) == Approx(2.0).epsilon(1e-15));
  CHECK(lambda_from_volumes(1.0, std::vector<double>{}) == 1.0);
  const std::vector<double> two{pi, 3.0 * pi};
  CHECK(lambda_from_volumes(2.0, two) == Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(lambda_from_volumes(-1.0, two), std::domain_error);
  CHECK_THROWS_AS(lambda_from_volumes(1.0, std::vector<double>{-1.0}),
                  std::domain_error);
}

TEST_CASE("configuration validation") {
  Configuration cfg = symmetric_pair(0.5, 1.0);
  CHECK_NOTHROW(cfg.validate());

  Configuration outside = cfg;
  outside.centers[1] = {1.5, 0.0};
  CHECK_THROWS_AS(outside.validate(), std::domain_error);

  Configuration dup = cfg;
  dup.centers[1] = dup.centers[0];
  CHECK_THROWS_AS(dup.validate(), std::domain_error);

  Configuration bad_area = cfg;
  bad_area.areas[0] = 0.0;
  CHECK_THROWS_AS(bad_area.validate(), std::domain_error);
}

TEST_CASE("placement margin examples") {
  CHECK(sigma(single_centered()) == 1.0);

  // boundary term (1-0.5)^2/(1/2) = 0.5 ties the pairwise term
  // 1 / (2 sqrt(1/2))^2 = 0.5
  CHECK(sigma(symmetric_pair(0.5, 1.0)) == Approx(0.5).epsilon(1e-14));

  // boundary term (1-0.9)^2/(1/2) = 0.02 dominates
  CHECK(sigma(symmetric_pair(0.9, 1.0)) == Approx(0.02).epsilon(1e-13));
}

TEST_CASE("placement margin invariances") {
  const Configuration base = symmetric_pair(0.5, 0.7);
  const double ref = sigma(base);

  Configuration rotated = base;
  const double c = std::cos(0.7), s = std::sin(0.7);
  for (Vec2& a : rotated.centers) a = {c * a.x - s * a.y, s * a.x + c * a.y};
  CHECK(sigma(rotated) == Approx(ref).epsilon(1e-14));

  Configuration scaled = base;
  const double sc = 2.5;
  scaled.R0 *= sc;
  for (Vec2& a : scaled.centers) a = a * sc;
  for (double& v : scaled.areas) v *= sc * sc;
  CHECK(sigma(scaled) == Approx(ref).epsilon(1e-14));
}

TEST_CASE("straight-line admissibility criterion") {
  // sigma = 0.5 admits lambda^2 < 2: total volume pi gives lambda^2 = 2
  CHECK(straight_line_admissible(symmetric_pair(0.5, pi / 4.0)));       // 1.5
  CHECK(straight_line_admissible(symmetric_pair(0.5, 0.99 * pi / 2)));  // 1.99
  CHECK_FALSE(straight_line_admissible(symmetric_pair(0.5, 1.01 * pi / 2)));
  CHECK_FALSE(straight_line_admissible(symmetric_pair(0.5, pi)));  // 3

  CHECK_THROWS_AS(straight_line_evolution(symmetric_pair(0.5, pi)),
                  InfeasibleError);

  // sigma >= 1 admits every volume
  CHECK(straight_line_admissible(single_centered()));
}

TEST_CASE("straight-line evolution closed form") {
  const Evolution e = straight_line_evolution(single_centered());
  CHECK(e.lambda == Approx(2.0).epsilon(1e-15));
  const CavityPath& c = e.cavities[0];
  CHECK(c.center(1.7).norm() == 0.0);
  CHECK(c.sq_radius(1.5) == Approx(1.25).epsilon(1e-14));  // t^2 - 1
  CHECK(c.sq_radius(1.0) == Approx(0.0));
  CHECK(pi * c.sq_radius(e.lambda) == Approx(3.0 * pi).epsilon(1e-13));
  CHECK(c.sq_radius_rate(1.5) == Approx(3.0).epsilon(1e-13));  // 2t

  const Evolution p = straight_line_evolution(symmetric_pair(0.5, pi / 4.0));
  CHECK(p.lambda == Approx(std::sqrt(1.5)).epsilon(1e-15));
  CHECK(p.cavities[1].center(1.2).x == Approx(0.6).epsilon(1e-14));
  CHECK(p.cavities[1].center_rate(1.2).x == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("evolution validation report") {
  const Evolution e = straight_line_evolution(symmetric_pair(0.5, pi / 4.0));
  const std::vector<double> grid = uniform_time_grid(e.lambda, 64);
  CHECK(grid.size() == 64);
  CHECK(grid.front() == 1.0);
  CHECK(grid.back() == Approx(e.lambda).epsilon(1e-15));

  const EvolutionReport ok = validate_evolution(e, 1.0, grid);
  CHECK(ok.pass);
  CHECK(ok.max_area_residual <= 1e-12);
  CHECK(ok.min_gap > 0.0);
  CHECK(ok.min_clearance > 0.0);

  // doubling one L^2 breaks the area identity by its share of the growth
  Evolution skewed = e;
  const auto sq = skewed.cavities[0].sq_radius;
  const auto sq_rate = skewed.cavities[0].sq_radius_rate;
  skewed.cavities[0].sq_radius = [sq](double t) { return 2.0 * sq(t); };
  skewed.cavities[0].sq_radius_rate = [sq_rate](double t) {
    return 2.0 * sq_rate(t);
  };
  const EvolutionReport bad = validate_evolution(skewed, 1.0, grid);
  CHECK_FALSE(bad.pass);
  const double expected =
      (skewed.lambda * skewed.lambda - 1.0) * pi * 0.5;  // v1/V = 1/2
  CHECK(bad.max_area_residual == Approx(expected).epsilon(1e-12));

  // forcing the second cavity onto the first ends with overlapping disks
  Evolution collide = e;
  const Vec2 a1 = collide.cavities[0].a, a2 = collide.cavities[1].a;
  const double span = collide.lambda - 1.0;
  collide.cavities[1].center = [=](double t) {
    return a2 + (a1 - a2 + Vec2{0.02, 0.0}) * ((t - 1.0) / span);
  };
  collide.cavities[1].center_rate = [=](double) {
    return (a1 - a2 + Vec2{0.02, 0.0}) / span;
  };
  const EvolutionReport overlap = validate_evolution(collide, 1.0, grid);
  CHECK_FALSE(overlap.pass);
  CHECK(overlap.min_gap < 0.0);
}

TEST_CASE("pad selection against closed-form feasibility limits") {
  // centered cavity: clearance 2 - sqrt(3 + rho^2) vanishes at rho = 1,
  // so the bisection settles at rho*/2 = 1/2
  const Evolution e1 = straight_line_evolution(single_centered());
  const std::vector<double> grid = uniform_time_grid(e1.lambda, 64);
  const PadRadii pads1 = choose_pads(e1, 1.0, grid);
  REQUIRE(pads1.R.size() == 1);
  CHECK(pads1.R[0] == Approx(0.5).epsilon(1e-10));
  const double clearance1 = 2.0 - std::sqrt(3.0 + 0.25);
  CHECK(pads1.d == Approx(0.5 * clearance1 * (1.0 - 1e-6)).epsilon(1e-9));
  CHECK(pads1.delta ==
        Approx(pads1.d / (2.0 * e1.lambda * 1.0)).epsilon(1e-12));

  // symmetric pair: the inter-hole gap at t = lambda pins rho* = sqrt(1/8)
  const Evolution e2 = straight_line_evolution(symmetric_pair(0.5, pi / 4.0));
  const PadRadii pads2 = choose_pads(e2, 1.0, uniform_time_grid(e2.lambda, 64));
  CHECK(pads2.R[0] == Approx(0.5 * std::sqrt(0.125)).epsilon(1e-9));
  const double lam = e2.lambda;
  const double clearance2 =
      lam - 0.5 * lam - std::sqrt(0.5 * (lam * lam - 1.0) + 0.03125);
  CHECK(pads2.d == Approx(0.5 * clearance2 * (1.0 - 1e-6)).epsilon(1e-8));
  CHECK(pads2.d > 0.0);

  // an evolution whose disks end up overlapping admits no pads at all
  Evolution collide = e2;
  const Vec2 a1 = collide.cavities[0].a, a2 = collide.cavities[1].a;
  const double span = collide.lambda - 1.0;
  collide.cavities[1].center = [=](double t) {
    return a2 + (a1 - a2 + Vec2{0.02, 0.0}) * ((t - 1.0) / span);
  };
  CHECK_THROWS_AS(
      choose_pads(collide, 1.0, uniform_time_grid(collide.lambda, 64)),
      InfeasibleError);
}

TEST_CASE("domains along the evolution") {
  const Evolution e = straight_line_evolution(single_centered());
  PadRadii pads;
  pads.R = {0.1};
  pads.d = 0.05;
  pads.delta = 0.0125;

  const HoleDomain at1 = domain_at(e, pads, 1.0);
  CHECK(at1.holes[0].radius == Approx(0.1).epsilon(1e-14));
  CHECK(at1.r0 == 1.0);

  const HoleDomain mid = domain_at(e, pads, std::sqrt(2.0));
  CHECK(mid.holes[0].radius == Approx(std::sqrt(1.01)).epsilon(1e-13));

  const HoleDomain end = domain_at(e, pads, e.lambda);
  CHECK(end.holes[0].radius == Approx(std::sqrt(3.0 + 0.01)).epsilon(1e-13));
  CHECK(end.r0 == Approx(2.0).epsilon(1e-15));

  // the shape constant stays above the recorded margin along the whole grid
  const Evolution p = straight_line_evolution(symmetric_pair(0.5, pi / 4.0));
  const std::vector<double> grid = uniform_time_grid(p.lambda, 64);
  const PadRadii pp = choose_pads(p, 1.0, grid);
  for (double t : grid) {
    const HoleDomain dom = domain_at(p, pp, t);
    CHECK(dom.shape_constant() >= pp.delta);
  }
}

TEST_CASE("hole domain geometry primitives") {
  const HoleDomain ann = make_hole_domain(1.0, {{{0.0, 0.0}, 0.45}}, 0.1);
  CHECK(ann.area() == Approx(pi * (1.0 - 0.45 * 0.45)).epsilon(1e-14));
  CHECK(ann.shape_constant() == Approx(0.225).epsilon(1e-14));
  CHECK(ann.signed_distance({0.7, 0.0}) == Approx(0.25).epsilon(1e-14));
  CHECK(ann.signed_distance({0.2, 0.0}) == Approx(-0.25).epsilon(1e-14));
  CHECK(ann.signed_distance({1.2, 0.0}) == Approx(-0.2).epsilon(1e-14));
  CHECK(ann.contains({0.7, 0.0}));
  CHECK_FALSE(ann.contains({0.2, 0.0}));

  // touching pads violate the padded-disjointness property
  CHECK_THROWS_AS(
      make_hole_domain(1.0, {{{-0.4, 0.0}, 0.25}, {{0.4, 0.0}, 0.25}}, 0.2),
      InfeasibleError);
}

TEST_CASE("eleven-cavity packing closed forms") {
  const double s = std::sin(pi / 9.0);
  const double density = equal_packing_density_11();
  CHECK(density ==
        Approx(11.0 * s * s / ((1.0 + s) * (1.0 + s))).epsilon(1e-15));
  CHECK(std::round(density * 1e4) / 1e4 == Approx(0.7145));

  const double bound = lambda_bound_from_sigma(density);
  CHECK(bound == Approx(1.0 / std::sqrt(1.0 - density)).epsilon(1e-15));
  CHECK(std::round(bound * 1e4) / 1e4 == Approx(1.8714));

  CHECK(lambda_bound_from_sigma(1.0) == inf);
  CHECK(lambda_bound_from_sigma(1.5) == inf);

  // the realized packing attains sigma = density exactly: every touching
  // pair sits at distance 2r and the ring sits at depth r from the rim
  const Configuration eleven = melissen_eleven(0.2 * pi);
  CHECK_NOTHROW(eleven.validate());
  CHECK(sigma(eleven) == Approx(density).epsilon(1e-13));
  CHECK(straight_line_admissible(eleven));  // lambda^2 = 1.2 < 1/(1-sigma)
  CHECK_NOTHROW(straight_line_evolution(eleven));
}

TEST_CASE("two-cavity volume necessary condition") {
  // v1 = v2 = pi/2 makes 2 sqrt(v1 v2) = pi R0^2 exactly tight
  CHECK(pair_volume_slack(symmetric_pair(0.5, pi / 2.0)) ==
        Approx(0.0).epsilon(1e-14));
  CHECK(pair_volume_slack(symmetric_pair(0.5, pi / 4.0)) < 0.0);
  CHECK(pair_volume_slack(symmetric_pair(0.5, 2.0)) ==
        Approx(4.0 - pi).epsilon(1e-14));
}
