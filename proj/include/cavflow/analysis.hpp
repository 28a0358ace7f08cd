#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "cavflow/flow.hpp"
#include "cavflow/geometry.hpp"
#include "cavflow/harmonic.hpp"
#include "cavflow/types.hpp"

namespace cavflow {

// first positive zero of J1'; the unit-disk Neumann-Poincare constant is its
// reciprocal
inline constexpr double j1_prime_zero = 1.8411837813406593;

// ============================================================
// Dirichlet energy and the eps-ladder study.  The energy of the full
// deformation splits into the eps-independent flow part plus closed-form
// annulus contributions; the renormalized energy subtracts the expected
// logarithmic growth (total volume) * |log eps|.
// ============================================================

double dirichlet_energy(const FlowState& state, std::span<const double> areas,
                        int offset = 0);

struct EnergyLadderRow {
  double eps = 0.0;
  double annuli_energy = 0.0;
  double total = 0.0;
  double renormalized = 0.0;
};

struct EnergyStudy {
  double flow_energy = 0.0;
  double volume_total = 0.0;  // sum of cavity volumes = expected slope
  std::vector<EnergyLadderRow> rows;
  double slope = 0.0;          // OLS of total vs |log eps|, 4 smallest eps
  double slope_rel_err = 0.0;  // |slope - volume| / volume
  double spread_rel = 0.0;     // renormalized spread / volume, same subset
  bool pass_slope = false;     // within 2 percent
  bool pass_spread = false;    // within 5 percent
};

EnergyStudy energy_ladder(const AssembledMap& map,
                          std::span<const double> eps_values);

// default ladder eps = 2^{-k} R0, k = k_min..k_max
std::vector<double> default_eps_ladder(double R0, int k_min = 7, int k_max = 10);

// ============================================================
// Image geometry of the cavity boundaries
// ============================================================

struct CavityImageRow {
  int cavity = 0;
  double eps = 0.0;
  double area = 0.0;           // shoelace area of the deformed eps-circle
  double expected_area = 0.0;  // v_i + pi eps^2
  double area_rel_err = 0.0;
  int winding = 0;             // around the cavity center, expect 1
  double mean_radius = 0.0;
  double radial_std = 0.0;
};

CavityImageRow cavity_image(const RadialCavityMap& cap, int cavity_index,
                            int samples = 512);

struct AreaBookkeeping {
  double flow_image = 0.0;    // sum of cell areas times det F at t = lambda
  double annuli_area = 0.0;   // exact, incompressible pads
  double cavity_area = 0.0;   // polygon areas of the deformed eps-circles
  double total = 0.0;
  double expected = 0.0;  // pi (lambda R0)^2
  double rel_err = 0.0;
};

AreaBookkeeping area_bookkeeping(const AssembledMap& map);

// ============================================================
// Injectivity of the deformed corner lattice: orientation of each quad
// plus SAT overlap tests between non-adjacent quads (spatial hash pruning)
// ============================================================

struct InjectivityReport {
  long quads = 0;
  long orientation_violations = 0;
  long overlap_violations = 0;
  double min_signed_area = 0.0;
  double worst_penetration = 0.0;
  long violations() const { return orientation_violations + overlap_violations; }
};

InjectivityReport injectivity_check(std::span<const Vec2> corners,
                                    std::span<const std::array<int, 4>> quads,
                                    double scale);

// convenience: run the check on the final state of an assembled map
InjectivityReport map_injectivity(const AssembledMap& map);

// Finite-difference determinant cross-check: each deformed lattice quad's
// shoelace area over its reference area is an independent estimate of det F
// at the quad; disagreement with the integrated value flags under-resolution.
struct FdDetReport {
  long quads = 0;
  double max_residual = 0.0;  // max |area ratio - 1|
};

FdDetReport fd_det_check(const AssembledMap& map);

// ============================================================
// Boundary tracking: ring particles must stay on the moving circles
// (radial deviation, at every stored checkpoint)
// ============================================================

struct TrackingRow {
  double t = 1.0;
  double hole_err = 0.0;   // max | |pos - z_i(t)| - r_i(t) |
  double outer_err = 0.0;  // max | |pos| - t R0 |
};

struct TrackingReport {
  std::vector<TrackingRow> rows;
  double max_hole_err = 0.0;
  double max_outer_err = 0.0;
};

TrackingReport boundary_tracking(const AssembledMap& map, const Evolution& e,
                                 const PadRadii& pads);

// ============================================================
// Neumann-Poincare constant sup ||u|| / ||Du|| over mean-zero H^1 by
// Rayleigh-Ritz on harmonic-style polar monomials.  Estimates increase
// with the order (nested trial spaces) and approach the constant from
// below.
// ============================================================

double poincare_constant(const HoleDomain& dom, int order, int quad_r = 96,
                         int quad_theta = 192);

// ============================================================
// Empirical estimate suite: inequality and identity checks, plus
// constant-tracking across a fixed-shape-margin family of domains.
// ============================================================

struct EstimateRow {
  std::string name;
  double param = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

struct EstimateOptions {
  unsigned seed = 20260817;
  int trace_trials = 50;
  int kernel_trials = 20;
  int poincare_order = 6;
};

std::vector<EstimateRow> estimate_suite(const EstimateOptions& options = {});

bool all_pass(std::span<const EstimateRow> rows);

// the five-domain constant-tracking family (shape margin 0.05 each)
std::vector<HoleDomain> estimate_domain_family();

}  // namespace cavflow
