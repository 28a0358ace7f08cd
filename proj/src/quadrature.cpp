#include "cavflow/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace cavflow {

namespace {

// sorted intervals of s > 0 where z0 + s e(theta) lies inside the hole;
// roots of |p + s e - c|^2 = R^2 with p = z0
void ray_hole_interval(const Vec2& z0, const Vec2& e, const Hole& hole,
                       std::vector<std::pair<double, double>>& out) {
  const Vec2 rel = z0 - hole.center;
  const double b = rel.dot(e);
  const double c = rel.norm2() - hole.radius * hole.radius;
  const double disc = b * b - c;
  if (disc <= 0.0) return;
  const double sq = std::sqrt(disc);
  const double s0 = -b - sq;
  const double s1 = -b + sq;
  if (s1 <= 0.0) return;
  out.emplace_back(std::max(0.0, s0), s1);
}

void emit_interval(double a, double b, double theta, double dtheta, const Vec2& z0,
                   int n_r, double r0, DomainQuadrature& quad) {
  if (b - a <= 0.0) return;
  const int cells = std::max(1, static_cast<int>(std::ceil(n_r * (b - a) / r0)));
  const double h = (b - a) / cells;
  const Vec2 e = unit_dir(theta);
  for (int i = 0; i < cells; ++i) {
    const double s0 = a + i * h;
    const double s1 = s0 + h;
    QuadratureNode node;
    node.x = z0 + e * (0.5 * (s0 + s1));
    node.w = 0.5 * dtheta * (s1 * s1 - s0 * s0);
    quad.nodes.push_back(node);
    quad.total_weight += node.w;
  }
}

}  // namespace

DomainQuadrature domain_quadrature(const HoleDomain& domain, int n_r, int n_theta) {
  if (n_r < 1 || n_theta < 1)
    throw std::domain_error("domain_quadrature: grid sizes must be positive");
  DomainQuadrature quad;
  quad.nodes.reserve(static_cast<size_t>(n_r) * n_theta);
  const double dtheta = 2.0 * pi / n_theta;
  std::vector<std::pair<double, double>> blocked;
  for (int j = 0; j < n_theta; ++j) {
    const double theta = dtheta * (j + 0.5);
    const Vec2 e = unit_dir(theta);
    blocked.clear();
    for (const auto& hole : domain.holes)
      ray_hole_interval(domain.z0, e, hole, blocked);
    std::sort(blocked.begin(), blocked.end());
    double cursor = 0.0;
    for (const auto& [s0, s1] : blocked) {
      emit_interval(cursor, std::min(s0, domain.r0), theta, dtheta, domain.z0, n_r,
                    domain.r0, quad);
      cursor = std::max(cursor, s1);
      if (cursor >= domain.r0) break;
    }
    emit_interval(cursor, domain.r0, theta, dtheta, domain.z0, n_r, domain.r0, quad);
  }
  return quad;
}

DomainQuadrature annulus_quadrature(const Vec2& center, double r_in, double r_out,
                                    int n_r, int n_theta) {
  if (!(0.0 <= r_in && r_in < r_out))
    throw std::domain_error("annulus_quadrature: need 0 <= r_in < r_out");
  DomainQuadrature quad;
  const double dtheta = 2.0 * pi / n_theta;
  const double h = (r_out - r_in) / n_r;
  for (int j = 0; j < n_theta; ++j) {
    const double theta = dtheta * (j + 0.5);
    const Vec2 e = unit_dir(theta);
    for (int i = 0; i < n_r; ++i) {
      const double s0 = r_in + i * h;
      const double s1 = s0 + h;
      QuadratureNode node;
      node.x = center + e * (0.5 * (s0 + s1));
      node.w = 0.5 * dtheta * (s1 * s1 - s0 * s0);
      quad.nodes.push_back(node);
      quad.total_weight += node.w;
    }
  }
  return quad;
}

double circle_integral(const Vec2& center, double radius,
                       const std::function<double(double, const Vec2&)>& f, int n) {
  double s = 0.0;
  const double dtheta = 2.0 * pi / n;
  for (int j = 0; j < n; ++j) {
    const double theta = dtheta * j;
    s += f(theta, center + radius * unit_dir(theta));
  }
  return s * radius * dtheta;
}

double periodic_integral_adaptive(const std::function<double(double)>& f, double tol,
                                  int n0, int n_max) {
  int n = n0;
  double h = 2.0 * pi / n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += f(-pi + j * h);
  double integral = sum * h;
  while (n < n_max) {
    // refine by adding midpoints of the current nodes
    double add = 0.0;
    for (int j = 0; j < n; ++j) add += f(-pi + (j + 0.5) * h);
    sum += add;
    n *= 2;
    h *= 0.5;
    const double refined = sum * h;
    const double err = std::abs(refined - integral);
    integral = refined;
    if (err <= tol * std::max(1.0, std::abs(refined))) break;
  }
  return integral;
}

}  // namespace cavflow
