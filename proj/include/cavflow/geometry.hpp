#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cavflow/types.hpp"

namespace cavflow {

// ============================================================
// Cavity configurations and their admissible evolutions.
//
// A configuration is a disk B(0, R0) together with n distinct
// cavitation points a_i and target cavity areas v_i.  An evolution
// moves cavity disks B(z_i(t), L_i(t)) for t in [1, lambda] with
//   sum_i pi L_i(t)^2 = (t^2 - 1) pi R0^2,
// the disks pairwise disjoint and contained in B(0, t R0).
// ============================================================

struct Configuration {
  double R0 = 1.0;
  std::vector<Vec2> centers;  // a_i, inside B(0, R0), pairwise distinct
  std::vector<double> areas;  // v_i > 0

  int n() const { return static_cast<int>(centers.size()); }
  double total_area() const;
  // throws std::domain_error on malformed input (sizes, signs, placement)
  void validate() const;
};

struct CavityPath {
  Vec2 a;     // initial center
  double v;   // target cavity area
  std::function<Vec2(double)> center;            // z_i(t)
  std::function<Vec2(double)> center_rate;       // dz_i/dt
  std::function<double(double)> sq_radius;       // L_i^2(t)
  std::function<double(double)> sq_radius_rate;  // d/dt L_i^2(t)
};

struct Evolution {
  double R0 = 1.0;
  double lambda = 1.0;
  std::vector<CavityPath> cavities;

  int n() const { return static_cast<int>(cavities.size()); }
};

// lambda = sqrt(1 + sum v_i / (pi R0^2)); empty list gives 1
double lambda_from_volumes(double R0, std::span<const double> areas);

// dimensionless placement margin: min over boundary terms
// (1 - |a_i|/R0)^2 / (v_i/V) and pairwise terms
// |a_i - a_j|^2 / (R0^2 (sqrt(v_i/V) + sqrt(v_j/V))^2), V = sum v_k.
// Single centered cavity: the empty pairwise min is +inf, so sigma = 1.
double sigma(const Configuration& config);

// straight-line evolutions z_i(t) = t a_i are admissible iff
// 1 - lambda^{-2} < sigma (sigma >= 1 admits every lambda)
bool straight_line_admissible(const Configuration& config);

// builds z_i(t) = t a_i, L_i(t) = sqrt((t^2-1) v_i / V) R0;
// throws InfeasibleError when the sigma criterion rejects the configuration
Evolution straight_line_evolution(const Configuration& config);

std::vector<double> uniform_time_grid(double lambda, int count);

struct EvolutionCheckRow {
  double t;
  double area_residual;   // |sum pi L_i^2 - (t^2-1) pi R0^2|
  double min_gap;         // min_{i<j} |z_i - z_j| - L_i - L_j
  double min_clearance;   // min_i t R0 - |z_i| - L_i
};

struct EvolutionReport {
  std::vector<EvolutionCheckRow> rows;
  double max_area_residual = 0.0;
  double min_gap = 0.0;
  double min_clearance = 0.0;
  double max_endpoint_residual = 0.0;  // z(1)=a, L(1)=0, pi L^2(lambda)=v
  double tol = 0.0;
  bool pass = false;
};

EvolutionReport validate_evolution(const Evolution& e, double R0,
                                   std::span<const double> grid);

// ============================================================
// Padded hole geometry.  Pads R_i turn the degenerate t=1 cavities
// into genuine holes: r_i(t) = sqrt(L_i^2(t) + R_i^2).  d is a
// uniform safety margin: the closed disks B(z_i, r_i + d) stay
// pairwise disjoint inside B(0, t R0 - d), and r_i >= d.
// ============================================================

struct PadRadii {
  std::vector<double> R;  // one per cavity, uniform by construction
  double d = 0.0;
  double delta = 0.0;     // d / (2 lambda R0), the shape-class margin
};

// largest-uniform-pad bisection on the time grid; returns rho = rho*/2
// with d from the minimal clearance at that rho.
// throws InfeasibleError when even vanishing pads collide on the grid.
PadRadii choose_pads(const Evolution& e, double R0, std::span<const double> grid);

struct Hole {
  Vec2 center;
  double radius = 0.0;
};

struct HoleDomain {
  Vec2 z0{0.0, 0.0};
  double r0 = 1.0;
  std::vector<Hole> holes;
  double d = 0.0;      // safety margin, see PadRadii
  double delta = 0.0;

  int n() const { return static_cast<int>(holes.size()); }
  double area() const;

  // F(E) = (1/2 r0) min( min boundary-to-boundary distance over all
  // circle pairs including the outer one, min hole radius )
  double shape_constant() const;

  // positive inside E, negative outside; magnitude is the exact
  // distance to the nearest boundary circle
  double signed_distance(const Vec2& x) const;
  bool contains(const Vec2& x, double tol = 0.0) const {
    return signed_distance(x) >= -tol;
  }

  // throws InfeasibleError naming the offending pair when the padded
  // disjointness/containment property or F(E) >= delta fails
  void validate() const;
};

HoleDomain domain_at(const Evolution& e, const PadRadii& pads, double t);

// standalone domain with safety margin d about the origin; delta = d/(2 r0).
// validates before returning.
HoleDomain make_hole_domain(double r0, std::vector<Hole> holes, double d);

// ============================================================
// Closed-form auxiliaries for equal-cavity packings
// ============================================================

// densest 11-disk packing density 11 s^2/(1+s)^2, s = sin(pi/9)
double equal_packing_density_11();

// admissible growth bound 1/sqrt(1 - sigma) for sigma < 1 (inf otherwise)
double lambda_bound_from_sigma(double sigma_value);

// n=2 necessary condition: 2 sqrt(v1 v2) <= pi R0^2; returns lhs - rhs
double pair_volume_slack(const Configuration& config);

}  // namespace cavflow
