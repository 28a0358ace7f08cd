#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cavflow/analysis.hpp"

using namespace cavflow;
using doctest::Approx;

namespace {

Evolution single_evolution() {
  Configuration cfg;
  cfg.R0 = 1.0;
  cfg.centers = {{0.0, 0.0}};
  cfg.areas = {3.0 * pi};
  return straight_line_evolution(cfg);
}

AssembledMap assembled_single(int steps, int grid_n) {
  const Evolution e = single_evolution();
  const PadRadii pads = choose_pads(e, 1.0, uniform_time_grid(e.lambda, 64));
  const PolarGrid grid = reference_grid(e, pads, grid_n, 2 * grid_n);
  FlowOptions opt;
  opt.steps = steps;
  opt.checkpoints = 8;
  return assemble_full_map(e, pads, 0.01, grid, opt);
}

}  // namespace

TEST_CASE("dirichlet energy of identity states") {
  FlowState state;
  state.particles.resize(3);
  const std::vector<double> areas{0.5, 1.5};
  // leading particle is excluded via the offset
  state.particles[0].F = Mat2{5.0, 0.0, 0.0, 5.0};
  CHECK(dirichlet_energy(state, areas, 1) == Approx(2.0).epsilon(1e-15));

  // doubling F quadruples the energy
  state.particles[1].F = Mat2{2.0, 0.0, 0.0, 2.0};
  state.particles[2].F = Mat2{2.0, 0.0, 0.0, 2.0};
  CHECK(dirichlet_energy(state, areas, 1) == Approx(8.0).epsilon(1e-15));
}

TEST_CASE("energy ladder recovers the volume slope") {
  const AssembledMap map = assembled_single(64, 24);
  const std::vector<double> ladder = default_eps_ladder(1.0);
  REQUIRE(ladder.size() == 4);
  CHECK(ladder.front() == Approx(1.0 / 128.0).epsilon(1e-15));
  CHECK(ladder.back() == Approx(1.0 / 1024.0).epsilon(1e-15));

  const EnergyStudy study = energy_ladder(map, ladder);
  CHECK(study.volume_total == Approx(3.0 * pi).epsilon(1e-10));
  CHECK(study.rows.size() == 4);
  for (const EnergyLadderRow& row : study.rows) {
    CHECK(row.total ==
          Approx(study.flow_energy + row.annuli_energy).epsilon(1e-15));
    CHECK(row.renormalized ==
          Approx(row.total - study.volume_total * std::abs(std::log(row.eps)))
              .epsilon(1e-12));
  }
  CHECK(study.slope_rel_err <= 0.02);
  CHECK(study.spread_rel <= 0.05);
  CHECK(study.pass_slope);
  CHECK(study.pass_spread);
  CHECK(study.slope == Approx(3.0 * pi).epsilon(0.02));
}

TEST_CASE("cavity image of the closed-form cap") {
  RadialCavityMap cap;
  cap.a = {0.3, -0.2};
  cap.image_center = {0.1, 0.4};
  cap.L = std::sqrt(3.0);
  cap.Rpad = 0.5;
  cap.eps = 1.0 / 128.0;

  const CavityImageRow row = cavity_image(cap, 2);
  CHECK(row.cavity == 2);
  CHECK(row.eps == cap.eps);
  CHECK(row.expected_area ==
        Approx(pi * 3.0 + pi * cap.eps * cap.eps).epsilon(1e-15));
  CHECK(row.area_rel_err <= 1e-8);
  CHECK(row.winding == 1);
  CHECK(row.mean_radius ==
        Approx(std::sqrt(3.0 + cap.eps * cap.eps)).epsilon(1e-12));
  CHECK(row.radial_std <= 1e-12 * cap.L);
}

TEST_CASE("area bookkeeping closes on the expanded disk") {
  const AssembledMap map = assembled_single(64, 24);
  const AreaBookkeeping book = area_bookkeeping(map);
  CHECK(book.expected == Approx(pi * 4.0).epsilon(1e-14));
  CHECK(book.total ==
        Approx(book.flow_image + book.annuli_area + book.cavity_area)
            .epsilon(1e-14));
  CHECK(book.rel_err <= 0.005);

  // pads are incompressible: annuli keep their reference area
  const double pad_r = map.caps[0].Rpad;
  CHECK(book.annuli_area ==
        Approx(pi * (pad_r * pad_r - map.eps * map.eps)).epsilon(1e-12));
}

TEST_CASE("determinant cross-check from deformed quad areas") {
  const AssembledMap map = assembled_single(64, 24);
  const FdDetReport fd = fd_det_check(map);
  CHECK(fd.quads == static_cast<long>(map.grid.quads.size()));
  CHECK(fd.max_residual <= 1e-5);
}

TEST_CASE("injectivity of the deformed lattice") {
  const AssembledMap map = assembled_single(32, 16);
  const InjectivityReport rep = map_injectivity(map);
  CHECK(rep.quads == static_cast<long>(map.grid.quads.size()));
  CHECK(rep.violations() == 0);
  CHECK(rep.min_signed_area > 0.0);
  CHECK(rep.worst_penetration == 0.0);
}

TEST_CASE("folded lattice is caught") {
  std::vector<Vec2> corners;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      corners.push_back({static_cast<double>(i), static_cast<double>(j)});
  const std::vector<std::array<int, 4>> quads{
      {0, 1, 4, 3}, {1, 2, 5, 4}, {3, 4, 7, 6}, {4, 5, 8, 7}};

  const InjectivityReport clean = injectivity_check(corners, quads, 1.0);
  CHECK(clean.violations() == 0);

  corners[4] = {0.5, -1.5};  // fold the center through the bottom edge
  const InjectivityReport folded = injectivity_check(corners, quads, 1.0);
  CHECK(folded.violations() >= 1);
  CHECK(folded.min_signed_area < 0.0);
}

TEST_CASE("ring particles track the moving circles") {
  const Evolution e = single_evolution();
  const PadRadii pads = choose_pads(e, 1.0, uniform_time_grid(e.lambda, 64));
  const PolarGrid grid = reference_grid(e, pads, 24, 48);
  FlowOptions opt;
  opt.steps = 64;
  opt.checkpoints = 8;
  const AssembledMap map = assemble_full_map(e, pads, 0.01, grid, opt);

  const TrackingReport track = boundary_tracking(map, e, pads);
  CHECK(track.rows.size() == map.flow.checkpoints.size());
  CHECK(track.rows.front().t == 1.0);
  CHECK(track.max_hole_err <= 1e-5);
  CHECK(track.max_outer_err <= 1e-6);
}

TEST_CASE("poincare constant by nested trial spaces") {
  const HoleDomain disk = make_hole_domain(1.0, {}, 0.05);
  const double c2 = poincare_constant(disk, 2);
  const double c4 = poincare_constant(disk, 4);
  const double c6 = poincare_constant(disk, 6);
  CHECK(c2 <= c4);
  CHECK(c4 <= c6);
  const double exact = 1.0 / j1_prime_zero;
  CHECK(c6 <= exact * (1.0 + 1e-12));
  CHECK(c6 == Approx(exact).epsilon(0.01));

  // dilation scales the constant linearly, exactly for the trial basis
  const HoleDomain big = make_hole_domain(2.0, {}, 0.1);
  CHECK(poincare_constant(big, 4) ==
        Approx(2.0 * poincare_constant(disk, 4)).epsilon(1e-9));
}

TEST_CASE("estimate suite on the frozen domain family") {
  const std::vector<HoleDomain> family = estimate_domain_family();
  REQUIRE(family.size() == 5);
  CHECK(family[3].r0 == 2.0);
  for (const HoleDomain& dom : family) CHECK_NOTHROW(dom.validate());

  EstimateOptions opt;
  opt.trace_trials = 10;
  opt.kernel_trials = 5;
  const std::vector<EstimateRow> rows = estimate_suite(opt);
  CHECK(all_pass(rows));

  const auto count = [&](const std::string& name) {
    return std::count_if(rows.begin(), rows.end(),
                         [&](const EstimateRow& r) { return r.name == name; });
  };
  CHECK(count("trace_inequality") == 10);
  CHECK(count("conj_kernel") == 15);  // trials x three radii
  CHECK(count("poisson_identity") >= 3);
  CHECK(count("green_neumann") >= 3);
  CHECK(count("green_reflection") >= 1);
  CHECK(count("green_symmetry") >= 1);
  CHECK(count("annulus_sup_l1") == 6);
  CHECK(count("l1_bound_constant") == 5);
  CHECK(count("gradient_bound_constant") == 5);
  CHECK(count("poincare_family") == 5);
  CHECK(count("poincare_scaling") == 1);
  CHECK(count("poincare_disk") == 1);

  // constants stay within a factor of ten across the family
  for (const char* name :
       {"l1_bound_variation", "gradient_bound_variation", "poincare_variation"}) {
    const auto it = std::find_if(rows.begin(), rows.end(),
                                 [&](const EstimateRow& r) { return r.name == name; });
    REQUIRE(it != rows.end());
    CHECK(it->ratio >= 1.0);
    CHECK(it->ratio <= 10.0);
    CHECK(it->pass);
  }
}
