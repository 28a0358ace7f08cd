#pragma once

#include <span>
#include <vector>

#include "cavflow/geometry.hpp"
#include "cavflow/harmonic.hpp"
#include "cavflow/types.hpp"

namespace cavflow {

// ============================================================
// Divergence-free velocity fields driving the hole evolution.
//
// Growth field: v = D(phi) + Dperp(psi) with
//   psi(z) = varphi(z) - zeta(2 dist(z, dE)/d) varphi(q(z)),
// phi the Neumann potential for the radial growth data, varphi the
// potential for phi's tangential boundary derivative, q the radial
// projection onto the nearest boundary circle, and zeta a C^2 cutoff
// with zeta(0)=1, zeta(1)=0 and vanishing first/second derivatives
// at both ends.  Dperp f := (d2 f, -d1 f).  On dE this gives
// v . n = g and v . tangent = 0.
//
// Translation field: a stream-function collar field around each hole
// matching the rigid velocity dz_i/dt on the hole boundary and
// vanishing outside |x - z_i| < r_i + d.
// ============================================================

// quintic smoothstep cutoff: value 1 at 0, 0 at 1, C^2 with flat ends
struct SmoothCutoff {
  static double value(double x);
  static double deriv(double x);
  static double deriv2(double x);
};

// per-circle radial growth speeds: outer R0, hole i (d/dt L_i^2)/(2 r_i);
// throws CompatibilityError when the evolution's area bookkeeping is
// inconsistent (fluxes fail to balance)
BoundaryData growth_boundary_data(const Evolution& e, const PadRadii& pads, double t);

class GrowthField {
 public:
  GrowthField(HarmonicSolution phi, HarmonicSolution stream);

  Vec2 velocity(const Vec2& x) const;
  Mat2 jacobian(const Vec2& x) const;
  double stream_value(const Vec2& x) const;  // psi; identically 0 on dE

  const HoleDomain& domain() const { return phi_.domain(); }
  const HarmonicSolution& potential() const { return phi_; }
  const HarmonicSolution& stream_potential() const { return stream_; }

 private:
  struct CollarFrame;  // polar data of the cutoff term
  bool collar_frame(const Vec2& x, CollarFrame& frame) const;

  HarmonicSolution phi_;
  HarmonicSolution stream_;
};

GrowthField build_growth_field(const HoleDomain& domain, const BoundaryData& g,
                               const NeumannOptions& options = {});

class TranslationField {
 public:
  TranslationField(HoleDomain domain, std::vector<Vec2> rates);

  Vec2 velocity(const Vec2& x) const;
  Mat2 jacobian(const Vec2& x) const;

  const HoleDomain& domain() const { return domain_; }

 private:
  HoleDomain domain_;
  std::vector<Vec2> rates_;
};

TranslationField build_translation_field(const HoleDomain& domain,
                                         std::span<const Vec2> rates);

// growth + translation at a fixed time, with domain containment checks
class TotalField {
 public:
  TotalField(GrowthField growth, TranslationField translation);

  // unchecked evaluations (integrator stages may probe a small halo)
  Vec2 velocity(const Vec2& x) const;
  Mat2 jacobian(const Vec2& x) const;

  // checked variant: domain error when x lies outside closure(E) by
  // more than tol
  Vec2 velocity_checked(const Vec2& x, double tol) const;

  const HoleDomain& domain() const { return growth_.domain(); }
  const GrowthField& growth() const { return growth_; }
  const TranslationField& translation() const { return translation_; }

 private:
  GrowthField growth_;
  TranslationField translation_;
};

TotalField build_total_field(const Evolution& e, const PadRadii& pads, double t,
                             const NeumannOptions& options = {});

}  // namespace cavflow
