#include "cavflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cavflow {

double Configuration::total_area() const {
  double s = 0.0;
  for (double v : areas) s += v;
  return s;
}

void Configuration::validate() const {
  if (!(R0 > 0.0)) throw std::domain_error("configuration: R0 must be positive");
  if (centers.size() != areas.size())
    throw std::domain_error("configuration: centers/areas size mismatch");
  for (int i = 0; i < n(); ++i) {
    if (!(areas[i] > 0.0))
      throw std::domain_error("configuration: cavity areas must be positive");
    if (!(centers[i].norm() < R0))
      throw std::domain_error("configuration: cavitation points must lie inside the disk");
  }
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j)
      if ((centers[i] - centers[j]).norm2() == 0.0)
        throw std::domain_error("configuration: cavitation points must be distinct");
}

double lambda_from_volumes(double R0, std::span<const double> areas) {
  if (!(R0 > 0.0)) throw std::domain_error("lambda_from_volumes: R0 must be positive");
  double total = 0.0;
  for (double v : areas) {
    if (!(v > 0.0)) throw std::domain_error("lambda_from_volumes: areas must be positive");
    total += v;
  }
  return std::sqrt(1.0 + total / (pi * R0 * R0));
}

double sigma(const Configuration& config) {
  config.validate();
  const double V = config.total_area();
  double result = std::numeric_limits<double>::infinity();
  for (int i = 0; i < config.n(); ++i) {
    const double frac = config.areas[i] / V;
    const double boundary = 1.0 - config.centers[i].norm() / config.R0;
    result = std::min(result, boundary * boundary / frac);
  }
  for (int i = 0; i < config.n(); ++i) {
    for (int j = i + 1; j < config.n(); ++j) {
      const double den = config.R0 * (std::sqrt(config.areas[i] / V) +
                                      std::sqrt(config.areas[j] / V));
      const double sep = (config.centers[i] - config.centers[j]).norm();
      result = std::min(result, sep * sep / (den * den));
    }
  }
  return result;
}

bool straight_line_admissible(const Configuration& config) {
  const double lam = lambda_from_volumes(config.R0, config.areas);
  return 1.0 - 1.0 / (lam * lam) < sigma(config);
}

Evolution straight_line_evolution(const Configuration& config) {
  config.validate();
  if (!straight_line_admissible(config)) {
    std::ostringstream msg;
    msg << "straight-line evolution rejected: growth factor lambda="
        << lambda_from_volumes(config.R0, config.areas)
        << " exceeds the placement margin (sigma=" << sigma(config)
        << ", need 1 - lambda^-2 < sigma)";
    throw InfeasibleError(msg.str());
  }
  Evolution e;
  e.R0 = config.R0;
  e.lambda = lambda_from_volumes(config.R0, config.areas);
  const double V = config.total_area();
  for (int i = 0; i < config.n(); ++i) {
    CavityPath p;
    p.a = config.centers[i];
    p.v = config.areas[i];
    const Vec2 a = p.a;
    const double scale = config.areas[i] / V * config.R0 * config.R0;
    p.center = [a](double t) { return a * t; };
    p.center_rate = [a](double) { return a; };
    p.sq_radius = [scale](double t) { return (t * t - 1.0) * scale; };
    p.sq_radius_rate = [scale](double t) { return 2.0 * t * scale; };
    e.cavities.push_back(std::move(p));
  }
  return e;
}

std::vector<double> uniform_time_grid(double lambda, int count) {
  if (count < 2) throw std::domain_error("uniform_time_grid: need at least 2 points");
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i)
    grid[i] = 1.0 + (lambda - 1.0) * i / (count - 1);
  return grid;
}

EvolutionReport validate_evolution(const Evolution& e, double R0,
                                   std::span<const double> grid) {
  EvolutionReport report;
  report.tol = 1e-10 * pi * R0 * R0 * e.lambda * e.lambda;
  report.min_gap = std::numeric_limits<double>::infinity();
  report.min_clearance = std::numeric_limits<double>::infinity();

  for (const auto& c : e.cavities) {
    report.max_endpoint_residual = std::max(report.max_endpoint_residual,
                                            (c.center(1.0) - c.a).norm());
    report.max_endpoint_residual = std::max(report.max_endpoint_residual,
                                            std::sqrt(std::max(0.0, c.sq_radius(1.0))));
    report.max_endpoint_residual = std::max(report.max_endpoint_residual,
                                            std::abs(pi * c.sq_radius(e.lambda) - c.v));
  }

  for (double t : grid) {
    EvolutionCheckRow row;
    row.t = t;
    std::vector<Vec2> z(e.n());
    std::vector<double> L(e.n());
    double area = 0.0;
    for (int i = 0; i < e.n(); ++i) {
      z[i] = e.cavities[i].center(t);
      const double L2 = e.cavities[i].sq_radius(t);
      L[i] = std::sqrt(std::max(0.0, L2));
      area += pi * L2;
    }
    row.area_residual = std::abs(area - (t * t - 1.0) * pi * R0 * R0);
    row.min_gap = std::numeric_limits<double>::infinity();
    row.min_clearance = std::numeric_limits<double>::infinity();
    for (int i = 0; i < e.n(); ++i) {
      row.min_clearance = std::min(row.min_clearance, t * R0 - z[i].norm() - L[i]);
      for (int j = i + 1; j < e.n(); ++j)
        row.min_gap = std::min(row.min_gap, (z[i] - z[j]).norm() - L[i] - L[j]);
    }
    report.max_area_residual = std::max(report.max_area_residual, row.area_residual);
    report.min_gap = std::min(report.min_gap, row.min_gap);
    report.min_clearance = std::min(report.min_clearance, row.min_clearance);
    report.rows.push_back(row);
  }

  report.pass = report.max_area_residual <= report.tol && report.min_gap > 0.0 &&
                report.min_clearance > 0.0 &&
                report.max_endpoint_residual <= report.tol;
  return report;
}

namespace {

// minimal clearance over the grid of the padded disks r_i = sqrt(L_i^2 + rho^2):
// min over times of (pairwise center gaps minus radii, outer clearances)
double pad_clearance(const Evolution& e, double R0, std::span<const double> grid,
                     double rho) {
  double clearance = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    std::vector<Vec2> z(e.n());
    std::vector<double> r(e.n());
    for (int i = 0; i < e.n(); ++i) {
      z[i] = e.cavities[i].center(t);
      r[i] = std::sqrt(std::max(0.0, e.cavities[i].sq_radius(t)) + rho * rho);
    }
    for (int i = 0; i < e.n(); ++i) {
      clearance = std::min(clearance, t * R0 - z[i].norm() - r[i]);
      for (int j = i + 1; j < e.n(); ++j)
        clearance = std::min(clearance, (z[i] - z[j]).norm() - r[i] - r[j]);
    }
  }
  return clearance;
}

}  // namespace

PadRadii choose_pads(const Evolution& e, double R0, std::span<const double> grid) {
  if (e.n() == 0) throw std::domain_error("choose_pads: evolution has no cavities");
  if (!(pad_clearance(e, R0, grid, 0.0) > 0.0))
    throw InfeasibleError("choose_pads: cavity disks already collide with vanishing pads");

  double lo = 0.0;       // feasible
  double hi = R0;        // infeasible: a pad of R0 cannot fit at t=1
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * R0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (pad_clearance(e, R0, grid, mid) > 0.0 ? lo : hi) = mid;
  }

  PadRadii pads;
  const double rho = 0.5 * lo;
  pads.R.assign(e.n(), rho);
  const double clearance = pad_clearance(e, R0, grid, rho);
  pads.d = std::min(0.5 * clearance, rho) * (1.0 - 1e-6);
  pads.delta = pads.d / (2.0 * e.lambda * R0);
  return pads;
}

double HoleDomain::area() const {
  double a = pi * r0 * r0;
  for (const auto& h : holes) a -= pi * h.radius * h.radius;
  return a;
}

double HoleDomain::shape_constant() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n(); ++i) {
    m = std::min(m, holes[i].radius);
    m = std::min(m, r0 - (holes[i].center - z0).norm() - holes[i].radius);
    for (int j = i + 1; j < n(); ++j)
      m = std::min(m, (holes[i].center - holes[j].center).norm() -
                          holes[i].radius - holes[j].radius);
  }
  return m / (2.0 * r0);
}

double HoleDomain::signed_distance(const Vec2& x) const {
  double dist = r0 - (x - z0).norm();
  for (const auto& h : holes)
    dist = std::min(dist, (x - h.center).norm() - h.radius);
  return dist;
}

void HoleDomain::validate() const {
  const double margin = 1e-12 * r0;
  for (int i = 0; i < n(); ++i) {
    if (holes[i].radius < d - margin) {
      std::ostringstream msg;
      msg << "hole domain: hole " << i << " radius " << holes[i].radius
          << " smaller than margin d=" << d;
      throw InfeasibleError(msg.str());
    }
    const double clearance =
        r0 - d - ((holes[i].center - z0).norm() + holes[i].radius + d);
    if (clearance < margin) {
      std::ostringstream msg;
      msg << "hole domain: padded hole " << i
          << " not contained in the shrunk outer disk (clearance " << clearance << ")";
      throw InfeasibleError(msg.str());
    }
    for (int j = i + 1; j < n(); ++j) {
      const double gap = (holes[i].center - holes[j].center).norm() -
                         (holes[i].radius + d) - (holes[j].radius + d);
      if (gap < margin) {
        std::ostringstream msg;
        msg << "hole domain: padded holes " << i << " and " << j
            << " overlap (gap " << gap << ")";
        throw InfeasibleError(msg.str());
      }
    }
  }
  if (shape_constant() < delta - margin) {
    std::ostringstream msg;
    msg << "hole domain: shape constant " << shape_constant()
        << " below the required margin " << delta;
    throw InfeasibleError(msg.str());
  }
}

HoleDomain domain_at(const Evolution& e, const PadRadii& pads, double t) {
  if (pads.R.size() != static_cast<size_t>(e.n()))
    throw std::domain_error("domain_at: pad count does not match evolution");
  HoleDomain dom;
  dom.z0 = {0.0, 0.0};
  dom.r0 = t * e.R0;
  dom.d = pads.d;
  dom.delta = pads.delta;
  for (int i = 0; i < e.n(); ++i) {
    Hole h;
    h.center = e.cavities[i].center(t);
    h.radius = std::sqrt(std::max(0.0, e.cavities[i].sq_radius(t)) +
                         pads.R[i] * pads.R[i]);
    dom.holes.push_back(h);
  }
  dom.validate();
  return dom;
}

HoleDomain make_hole_domain(double r0, std::vector<Hole> holes, double d) {
  HoleDomain dom;
  dom.z0 = {0.0, 0.0};
  dom.r0 = r0;
  dom.holes = std::move(holes);
  dom.d = d;
  dom.delta = d / (2.0 * r0);
  dom.validate();
  return dom;
}

double equal_packing_density_11() {
  const double s = std::sin(pi / 9.0);
  return 11.0 * s * s / ((1.0 + s) * (1.0 + s));
}

double lambda_bound_from_sigma(double sigma_value) {
  if (sigma_value >= 1.0) return std::numeric_limits<double>::infinity();
  if (!(sigma_value > 0.0))
    throw std::domain_error("lambda_bound_from_sigma: sigma must be positive");
  return 1.0 / std::sqrt(1.0 - sigma_value);
}

double pair_volume_slack(const Configuration& config) {
  if (config.n() != 2)
    throw std::domain_error("pair_volume_slack: defined for exactly two cavities");
  return 2.0 * std::sqrt(config.areas[0] * config.areas[1]) -
         pi * config.R0 * config.R0;
}

}  // namespace cavflow
