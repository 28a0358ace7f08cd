#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cavflow/harmonic.hpp"
#include "cavflow/quadrature.hpp"

using namespace cavflow;
using doctest::Approx;

namespace {

BoundaryData radial_annulus_data(double c, double r_in, double r_out) {
  BoundaryData g;
  g.holes.push_back(CircleFourier::constant(c));
  g.outer = CircleFourier::constant(c * r_in / r_out);
  return g;
}

}  // namespace

TEST_CASE("fourier traces") {
  CircleFourier f;
  f.mean = 0.5;
  f.cos_coef = {1.0, 0.25};
  f.sin_coef = {0.0, -0.5};
  const double th = 0.8;
  CHECK(f.eval(th) == Approx(0.5 + std::cos(th) + 0.25 * std::cos(2 * th) -
                             0.5 * std::sin(2 * th))
                          .epsilon(1e-15));
  CHECK(f.derivative(th) == Approx(-std::sin(th) - 0.5 * std::sin(2 * th) -
                                   std::cos(2 * th))
                                .epsilon(1e-14));
  CHECK(f.sup_bound() ==
        Approx(0.5 + 1.0 + std::sqrt(0.0625 + 0.25)).epsilon(1e-15));
  CHECK(f.order() == 2);
}

TEST_CASE("flux compatibility bookkeeping") {
  const HoleDomain dom = make_hole_domain(2.0, {{{0.0, 0.0}, 1.0}}, 0.2);
  CHECK(compatibility_residual(dom, radial_annulus_data(0.7, 1.0, 2.0)) ==
        Approx(0.0).scale(1.0).epsilon(1e-14));

  BoundaryData off;
  off.holes.push_back(CircleFourier::constant(1.0));
  off.outer = CircleFourier::constant(0.0);
  CHECK(compatibility_residual(dom, off) ==
        Approx(-2.0 * pi).epsilon(1e-14));
  CHECK(data_sup_norm(off) == 1.0);
  CHECK_THROWS_AS(solve_neumann(dom, off), CompatibilityError);

  try {
    solve_neumann(dom, off);
  } catch (const CompatibilityError& err) {
    CHECK(std::abs(err.mismatch) == Approx(2.0 * pi).epsilon(1e-12));
  }
}

TEST_CASE("disk reflection") {
  const Vec2 image = reflect_point({0.3, 0.4}, 1.0);
  CHECK(image.x == Approx(1.2).epsilon(1e-15));
  CHECK(image.y == Approx(1.6).epsilon(1e-15));

  const Vec2 x{0.37, -0.21};
  const double R = 1.7;
  const Vec2 back = reflect_point(reflect_point(x, R), R);
  CHECK((back - x).norm() <= 1e-12);
  CHECK(reflect_point(x, R).norm() * x.norm() == Approx(R * R).epsilon(1e-13));
}

TEST_CASE("disk Neumann kernel identities") {
  const double R = 1.3;
  const Vec2 x{0.3, 0.2}, y{-0.5, 0.1};

  // antisymmetric defect of the kernel has a closed form
  const double diff = green_neumann_disk(x, y, R) - green_neumann_disk(y, x, R);
  const double expected = -std::log(y.norm() / x.norm()) / (2.0 * pi) +
                          (y.norm2() - x.norm2()) / (4.0 * pi * R * R);
  CHECK(diff == Approx(expected).epsilon(1e-12));

  // the correction term carries a uniform source: -lap phi^x = 1/(pi R^2)
  const double h = 1e-3;
  const auto phi = [&](const Vec2& p) { return disk_green_correction(x, p, R); };
  const auto lap = [&](const Vec2& p) {
    double s = 0.0;
    const Vec2 dirs[2] = {{1.0, 0.0}, {0.0, 1.0}};
    for (const Vec2& e : dirs)
      s += (-phi(p + e * (2 * h)) + 16 * phi(p + e * h) - 30 * phi(p) +
            16 * phi(p - e * h) - phi(p - e * (2 * h))) /
           (12 * h * h);
    return s;
  };
  CHECK(-lap({0.6, -0.4}) == Approx(1.0 / (pi * R * R)).epsilon(1e-6));
  CHECK(-lap({-0.1, 0.8}) == Approx(1.0 / (pi * R * R)).epsilon(1e-6));

  // normal derivative of the kernel vanishes on the rim
  const double hr = 1e-4;
  for (double phi_angle : {0.1, 1.3, 2.9, 4.4}) {
    const Vec2 e = unit_dir(phi_angle);
    const auto radial = [&](double s) {
      return green_neumann_disk(x, e * (R + s), R);
    };
    const double dn = (-radial(2 * hr) + 8 * radial(hr) - 8 * radial(-hr) +
                       radial(-2 * hr)) /
                      (12 * hr);
    CHECK(std::abs(dn) <= 1e-10);
  }
}

TEST_CASE("radial annulus solution") {
  const double c = 0.7;
  const HoleDomain dom = make_hole_domain(2.0, {{{0.0, 0.0}, 1.0}}, 0.2);
  const HarmonicSolution u = solve_neumann(dom, radial_annulus_data(c, 1.0, 2.0));

  CHECK(u.neumann_residual() <= u.tolerance());
  CHECK_FALSE(u.conditioning_warning());
  CHECK(u.log_strength(0) == Approx(c).epsilon(1e-10));
  CHECK(u.hole_coef_norm(0) <= 1e-8);
  CHECK(u.outer_coef_norm() <= 1e-8);

  for (double rho : {1.1, 1.4, 1.9}) {
    for (double th : {0.0, 0.9, 2.5}) {
      const Vec2 p = unit_dir(th) * rho;
      const Vec2 grad = u.gradient(p);
      CHECK(grad.norm() == Approx(c / rho).epsilon(1e-8));
      CHECK(grad.dot(unit_dir(th)) == Approx(c / rho).epsilon(1e-8));
      CHECK(std::abs(u.hessian(p).trace()) <= 1e-10);
    }
  }
  CHECK(u.value({1.8, 0.0}) - u.value({0.0, 1.2}) ==
        Approx(c * std::log(1.8 / 1.2)).epsilon(1e-8));

  // mean-zero normalization over the domain, probed at the solver's own
  // quadrature resolution
  const DomainQuadrature quad = domain_quadrature(dom, 256, 256);
  const double mean = quad.integrate([&](const Vec2& p) { return u.value(p); }) /
                      quad.total_weight;
  CHECK(std::abs(mean) <= 1e-6 * data_sup_norm(radial_annulus_data(c, 1.0, 2.0)));
}

TEST_CASE("concentric dipole solution") {
  // g_hole = cos, g_outer = cos/4 on radii 1 and 2 force u = -cos(theta)/rho
  const HoleDomain dom = make_hole_domain(2.0, {{{0.0, 0.0}, 1.0}}, 0.2);
  BoundaryData g;
  CircleFourier hole;
  hole.cos_coef = {1.0};
  hole.sin_coef = {0.0};
  CircleFourier outer;
  outer.cos_coef = {0.25};
  outer.sin_coef = {0.0};
  g.holes.push_back(hole);
  g.outer = outer;

  const HarmonicSolution u = solve_neumann(dom, g);
  CHECK(u.log_strength(0) == Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(u.hole_coef_norm(0) == Approx(1.0).epsilon(1e-8));
  CHECK(u.outer_coef_norm() <= 1e-8);

  for (double rho : {1.2, 1.6, 1.9}) {
    for (double th : {0.3, 1.8, 3.6, 5.1}) {
      const Vec2 p = unit_dir(th) * rho;
      CHECK(u.value(p) ==
            Approx(-std::cos(th) / rho).epsilon(1e-8).scale(1.0));
    }
  }
  // gradient of -x/|x|^2 at (1.5, 0) is (1/rho^2, 0) with rho = 1.5
  const Vec2 grad = u.gradient({1.5, 0.0});
  CHECK(grad.x == Approx(1.0 / 2.25).epsilon(1e-8));
  CHECK(std::abs(grad.y) <= 1e-9);
}

TEST_CASE("off-center truncation self-convergence") {
  const HoleDomain dom = make_hole_domain(1.0, {{{0.3, 0.0}, 0.2}}, 0.05);
  BoundaryData g;
  CircleFourier hole;
  hole.mean = 1.0;
  hole.cos_coef = {1.0};
  hole.sin_coef = {-0.4};
  CircleFourier outer;
  outer.mean = 0.2;  // flux match: 1 * 2pi * 0.2 = 0.2 * 2pi * 1
  outer.cos_coef = {0.0, 0.0};
  outer.sin_coef = {0.0, 0.3};
  g.holes.push_back(hole);
  g.outer = outer;

  NeumannOptions o8, o16, o64;
  o8.modes = 8;
  o16.modes = 16;
  o64.modes = 64;
  const HarmonicSolution u8 = solve_neumann(dom, g, o8);
  const HarmonicSolution u16 = solve_neumann(dom, g, o16);
  const HarmonicSolution u64 = solve_neumann(dom, g, o64);

  std::vector<Vec2> probes;
  for (double rho : {0.62, 0.75, 0.9})
    for (int k = 0; k < 8; ++k) probes.push_back(unit_dir(k * pi / 4.0) * rho);

  double d8 = 0.0, d16 = 0.0;
  for (const Vec2& p : probes) {
    d8 = std::max(d8, std::abs(u8.value(p) - u64.value(p)));
    d16 = std::max(d16, std::abs(u16.value(p) - u64.value(p)));
  }
  CHECK(d8 <= 1e-4 * data_sup_norm(g));
  CHECK(d16 < d8);

  // analytic derivatives agree with finite differences of the value
  const double h = 1e-5;
  for (const Vec2& p : probes) {
    const Vec2 grad = u64.gradient(p);
    const double gx =
        (u64.value({p.x + h, p.y}) - u64.value({p.x - h, p.y})) / (2 * h);
    const double gy =
        (u64.value({p.x, p.y + h}) - u64.value({p.x, p.y - h})) / (2 * h);
    CHECK(grad.x == Approx(gx).epsilon(1e-5).scale(1.0));
    CHECK(grad.y == Approx(gy).epsilon(1e-5).scale(1.0));

    const Mat2 hess = u64.hessian(p);
    const double hxx =
        (u64.gradient({p.x + h, p.y}).x - u64.gradient({p.x - h, p.y}).x) /
        (2 * h);
    const double hxy =
        (u64.gradient({p.x, p.y + h}).x - u64.gradient({p.x, p.y - h}).x) /
        (2 * h);
    CHECK(hess.a11 == Approx(hxx).epsilon(1e-4).scale(1.0));
    CHECK(hess.a12 == Approx(hxy).epsilon(1e-4).scale(1.0));
    CHECK(std::abs(hess.trace()) <= 1e-9 * data_sup_norm(g));
  }
}

TEST_CASE("solver linearity and null data") {
  const HoleDomain dom = make_hole_domain(1.0, {{{0.3, 0.0}, 0.2}}, 0.05);
  BoundaryData g1;
  g1.holes.push_back(CircleFourier::constant(1.0));
  g1.outer = CircleFourier::constant(0.2);
  BoundaryData g2;
  CircleFourier hole2;
  hole2.cos_coef = {0.0, 0.6};
  hole2.sin_coef = {0.0, 0.0};
  g2.holes.push_back(hole2);
  g2.outer = CircleFourier{};

  BoundaryData mix;
  CircleFourier mh;
  mh.mean = 1.0;
  mh.cos_coef = {0.0, 1.2};
  mh.sin_coef = {0.0, 0.0};
  mix.holes.push_back(mh);
  mix.outer = CircleFourier::constant(0.2);

  const HarmonicSolution u1 = solve_neumann(dom, g1);
  const HarmonicSolution u2 = solve_neumann(dom, g2);
  const HarmonicSolution um = solve_neumann(dom, mix);
  for (double rho : {0.62, 0.8}) {
    for (double th : {0.4, 2.2, 4.0}) {
      const Vec2 p = unit_dir(th) * rho;
      CHECK(um.value(p) ==
            Approx(u1.value(p) + 2.0 * u2.value(p)).epsilon(1e-9).scale(1.0));
    }
  }

  BoundaryData zero;
  zero.holes.push_back(CircleFourier{});
  zero.outer = CircleFourier{};
  const HarmonicSolution u0 = solve_neumann(dom, zero);
  CHECK(std::abs(u0.value({0.7, 0.1})) <= 1e-12);
  CHECK(u0.gradient({0.7, 0.1}).norm() <= 1e-12);
  CHECK(u0.log_strength(0) == 0.0);
}

TEST_CASE("exterior Poisson operator") {
  const auto ones = [](double) { return 1.0; };
  for (double r : {1.5, 2.0, 3.0})
    for (double phi : {0.0, 0.7, 2.1})
      CHECK(poisson_disk_exterior(ones, unit_dir(phi) * r) ==
            Approx(-1.0).epsilon(1e-10));

  // g = cos tau maps to -cos(phi)/r outside the unit circle
  const auto cosine = [](double tau) { return std::cos(tau); };
  for (double r : {1.5, 2.0, 3.0}) {
    for (double phi : {0.0, 0.7, 2.1}) {
      CHECK(poisson_disk_exterior(cosine, unit_dir(phi) * r) ==
            Approx(-std::cos(phi) / r).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("conjugate boundary kernel") {
  const auto constant = [](double) { return 2.3; };
  CHECK(conjugate_kernel_op(constant, {2.0, 0.0}) ==
        Approx(0.0).scale(1.0).epsilon(1e-11));

  const auto sine = [](double tau) { return std::sin(tau); };
  CHECK(conjugate_kernel_op(sine, {2.0, 0.0}) ==
        Approx(pi / 2.0).epsilon(1e-10));

  // cos(k theta) maps to -pi sin(k phi) r^{-k}
  const int k = 3;
  const double r = 1.5, phi = 0.7;
  const auto g = [&](double tau) { return std::cos(k * tau); };
  CHECK(conjugate_kernel_op(g, unit_dir(phi) * r) ==
        Approx(-pi * std::sin(k * phi) * std::pow(r, -k)).epsilon(1e-10));
}

TEST_CASE("periodic Holder seminorm") {
  // sup of 2 sin(s/2)/sqrt(s) sits at tan(s/2) = s, value 1.20386;
  // sampling approaches it from below
  const double sem = holder_seminorm([](double t) { return std::cos(t); }, 0.5);
  CHECK(sem > 1.19);
  CHECK(sem <= 1.2039);
  CHECK(holder_seminorm([](double) { return 4.0; }, 0.5) == 0.0);
}
