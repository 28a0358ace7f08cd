#pragma once

#include <functional>
#include <vector>

#include "cavflow/geometry.hpp"
#include "cavflow/types.hpp"

namespace cavflow {

// ============================================================
// Quadrature over circular hole domains.
//
// Midpoint rule on a polar tensor grid about z0.  For each angular
// node the radial segment [0, r0] is clipped exactly against every
// hole circle (quadratic formula), so cells never straddle a hole
// boundary and weights are exact sector areas.
// ============================================================

struct QuadratureNode {
  Vec2 x;
  double w = 0.0;
};

struct DomainQuadrature {
  std::vector<QuadratureNode> nodes;
  double total_weight = 0.0;

  double integrate(const std::function<double(const Vec2&)>& f) const {
    double s = 0.0;
    for (const auto& node : nodes) s += node.w * f(node.x);
    return s;
  }
};

DomainQuadrature domain_quadrature(const HoleDomain& domain, int n_r, int n_theta);

// plain annulus about `center` (no holes), same midpoint construction
DomainQuadrature annulus_quadrature(const Vec2& center, double r_in, double r_out,
                                    int n_r, int n_theta);

// periodic trapezoid line integral over the circle, dS = radius dtheta
double circle_integral(const Vec2& center, double radius,
                       const std::function<double(double, const Vec2&)>& f, int n);

// adaptive periodic trapezoid for integrals over [-pi, pi); doubles the node
// count until successive values agree within tol (absolute, relative to
// max(1,|I|)) or the cap is reached
double periodic_integral_adaptive(const std::function<double(double)>& f,
                                  double tol = 1e-12, int n0 = 64,
                                  int n_max = 1 << 21);

}  // namespace cavflow
