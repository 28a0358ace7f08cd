#pragma once

#include <array>
#include <span>
#include <vector>

#include "cavflow/fields.hpp"
#include "cavflow/geometry.hpp"
#include "cavflow/types.hpp"

namespace cavflow {

// ============================================================
// Flow-map integration: df/dt = (v_t + v~_t)(f), dF/dt = Dv(f) F,
// f(x,1) = x, F(x,1) = I, by classical fixed-step RK4 with the
// velocity fields rebuilt (and cached) at every stage time.
// ============================================================

struct FlowOptions {
  int steps = 128;
  int checkpoints = 8;  // trimmed to a divisor of steps
  NeumannOptions solver;
  double project_tol_factor = 1e-9;  // * R0: silent radial projection band
  int threads = 1;

  FlowOptions() {
    // additive constants do not influence velocities beyond the cutoff
    // term, so stage solves can use a coarse mean-zero quadrature
    solver.quad_r = 64;
    solver.quad_theta = 64;
  }
};

struct FlowParticle {
  Vec2 ref;
  Vec2 pos;
  Mat2 F = Mat2::identity();
};

struct FlowState {
  double t = 1.0;
  std::vector<FlowParticle> particles;
};

struct FlowResult {
  std::vector<FlowState> checkpoints;  // first at t=1, last at t=lambda
  std::vector<double> checkpoint_det_residual;
  double max_det_residual = 0.0;   // worst checkpoint
  double gronwall_constant = 0.0;  // 2 sup ||Dv+Dv~||_2 over stage evals
  double max_excursion = 0.0;      // worst outside-drift before projection
  long excursion_events = 0;       // drifts beyond the silent band

  const FlowState& final_state() const { return checkpoints.back(); }
};

// throws NumericalError when a particle leaves the domain beyond 0.25 d
FlowResult integrate_flow(const Evolution& e, const PadRadii& pads,
                          std::span<const Vec2> seeds,
                          const FlowOptions& options = {});

// ============================================================
// Closed-form radial cavity map on the annulus eps <= |x-a| <= Rpad:
//   u(a + r e) = image_center + sqrt(L^2 + r^2) e,  |e| = 1
// Incompressible, opens a cavity of area pi L^2 (+ pi eps^2 carried
// by the excised core).
// ============================================================

struct RadialCavityMap {
  Vec2 a;
  Vec2 image_center;
  double L = 0.0;
  double Rpad = 0.0;
  double eps = 0.0;

  Vec2 eval(const Vec2& x) const;
  Mat2 grad(const Vec2& x) const;  // det = 1 identically
};

// Dirichlet energy of the radial map on eps < r < R (closed form):
//   pi (R^2 - eps^2) + pi L^2 [ log(R/eps) - (1/2) log((L^2+R^2)/(L^2+eps^2)) ]
double radial_annulus_energy(double L, double R, double eps);

// ============================================================
// Structured reference grids over E(1) = B(0,R0) \ U B(a_i, R_i)
// ============================================================

struct PolarGrid {
  int n_r = 0, n_theta = 0;
  // midpoint cells with exact sector areas (ray-clipped against holes)
  std::vector<Vec2> cell_centers;
  std::vector<double> cell_areas;
  // corner lattice quads fully inside the domain, for injectivity checks
  std::vector<Vec2> corners;
  std::vector<std::array<int, 4>> quads;  // ccw corner indices
};

PolarGrid reference_grid(const Evolution& e, const PadRadii& pads, int n_r,
                         int n_theta);

// ============================================================
// Full deformation: flow map outside the pads glued to the radial
// cavity maps on the pad annuli.
// ============================================================

struct AssembledMap {
  double R0 = 1.0, lambda = 1.0, eps = 0.0;
  std::vector<RadialCavityMap> caps;
  PolarGrid grid;
  FlowResult flow;
  int ring_samples = 0;
  // seed layout inside flow states: cells, corners, hole rings, outer ring
  int cells_offset = 0, corners_offset = 0, rings_offset = 0, outer_offset = 0;

  double glue_mismatch = 0.0;   // hole rings vs closed-form cap boundary
  double outer_mismatch = 0.0;  // outer ring vs t R0 e^{i theta}
  double flow_energy = 0.0;     // Dirichlet energy over cells at t = lambda
};

// eps must satisfy 0 < eps < min R_i; the flow part is independent of eps.
// throws NumericalError when the glue mismatch exceeds 1e-3 R0.
AssembledMap assemble_full_map(const Evolution& e, const PadRadii& pads, double eps,
                               const PolarGrid& grid, const FlowOptions& options = {});

}  // namespace cavflow
