#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "cavflow/analysis.hpp"
#include "cavflow/flow.hpp"
#include "cavflow/geometry.hpp"
#include "cavflow/io.hpp"
#include "cavflow/quadrature.hpp"

namespace fs = std::filesystem;
using namespace cavflow;

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir = "out";
  int steps = 0;  // 0: keep config value
  int modes = 0;
  int grid = 0;
  int threads = 0;
  double alpha = 0.0;
  std::vector<double> eps_ladder;
  bool dry_run = false;
  unsigned seed = 20260817;
  double t_sample = 0.0;
};

void apply_overrides(RunKnobs& knobs, const CliArgs& args) {
  if (args.steps > 0) knobs.steps = args.steps;
  if (args.modes > 0) knobs.modes = args.modes;
  if (args.grid > 0) knobs.grid = args.grid;
  if (args.threads > 0) knobs.threads = args.threads;
  if (args.alpha > 0.0) knobs.alpha = args.alpha;
  if (!args.eps_ladder.empty()) knobs.eps_ladder = args.eps_ladder;
}

std::vector<double> ladder_for(const RunConfig& rc) {
  if (!rc.knobs.eps_ladder.empty()) return rc.knobs.eps_ladder;
  return default_eps_ladder(rc.config.R0);
}

void print_line(const std::string& label, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  " << label << "  " << detail
            << "\n";
}

int cmd_check(const CliArgs& args) {
  RunConfig rc = load_run_config(args.config_path);
  apply_overrides(rc.knobs, args);
  const Configuration& cfg = rc.config;

  std::cout << "configuration: n=" << cfg.n() << " R0=" << cfg.R0
            << " total volume=" << format_g17(cfg.total_area()) << "\n";
  const double lam = lambda_from_volumes(cfg.R0, cfg.areas);
  const double sig = sigma(cfg);
  std::cout << "lambda=" << format_g17(lam) << " sigma=" << format_g17(sig)
            << " lambda bound=" << format_g17(lambda_bound_from_sigma(sig))
            << "\n";
  if (cfg.n() == 2)
    std::cout << "pair volume slack (needs <= 0): "
              << format_g17(pair_volume_slack(cfg)) << "\n";

  if (!straight_line_admissible(cfg)) {
    std::cout << "straight-line evolution: rejected (1 - lambda^-2 >= sigma)\n";
    throw InfeasibleError("configuration rejected by the placement margin");
  }
  std::cout << "straight-line evolution: admissible\n";

  const Evolution evo = straight_line_evolution(cfg);
  const std::vector<double> grid = uniform_time_grid(evo.lambda,
                                                     rc.knobs.time_grid);
  const EvolutionReport report = validate_evolution(evo, cfg.R0, grid);
  std::cout << "evolution check: max area residual "
            << format_g17(report.max_area_residual) << ", min gap "
            << format_g17(report.min_gap) << ", min clearance "
            << format_g17(report.min_clearance) << ", "
            << (report.pass ? "ok" : "violated") << "\n";

  const PadRadii pads = choose_pads(evo, cfg.R0, grid);
  std::cout << "pads: R=" << format_g17(pads.R.front())
            << " d=" << format_g17(pads.d)
            << " delta=" << format_g17(pads.delta) << "\n";
  return 0;
}

int cmd_run(const CliArgs& args) {
  RunConfig rc = load_run_config(args.config_path);
  apply_overrides(rc.knobs, args);
  const Configuration& cfg = rc.config;

  const Evolution evo = straight_line_evolution(cfg);
  const std::vector<double> tgrid = uniform_time_grid(evo.lambda,
                                                      rc.knobs.time_grid);
  const EvolutionReport evrep = validate_evolution(evo, cfg.R0, tgrid);
  if (!evrep.pass)
    throw NumericalError("evolution violates its invariants on the time grid");
  const PadRadii pads = choose_pads(evo, cfg.R0, tgrid);
  std::cout << "lambda=" << format_g17(evo.lambda)
            << " pads R=" << format_g17(pads.R.front())
            << " d=" << format_g17(pads.d) << "\n";
  if (args.dry_run) {
    std::cout << "dry run: stopping after geometry\n";
    return 0;
  }

  fs::create_directories(args.out_dir);
  const auto path = [&](const std::string& name) {
    return (fs::path(args.out_dir) / name).string();
  };

  const PolarGrid grid = reference_grid(evo, pads, rc.knobs.grid,
                                        rc.knobs.grid);
  FlowOptions fopt;
  fopt.steps = rc.knobs.steps;
  fopt.checkpoints = rc.knobs.checkpoints;
  fopt.threads = rc.knobs.threads;
  fopt.solver.modes = rc.knobs.modes;

  const std::vector<double> ladder = ladder_for(rc);
  const double eps0 = *std::min_element(ladder.begin(), ladder.end());
  std::cout << "integrating " << grid.cell_centers.size() << " cells, "
            << grid.corners.size() << " corners, "
            << (evo.n() + 1) * 256 << " ring particles over "
            << rc.knobs.steps << " steps\n";
  const AssembledMap map = assemble_full_map(evo, pads, eps0, grid, fopt);

  const TrackingReport tracking = boundary_tracking(map, evo, pads);
  const EnergyStudy study = energy_ladder(map, ladder);
  const AreaBookkeeping book = area_bookkeeping(map);
  const InjectivityReport inj = map_injectivity(map);
  const FdDetReport fd = fd_det_check(map);

  std::vector<CavityImageRow> images;
  for (std::size_t i = 0; i < map.caps.size(); ++i)
    images.push_back(cavity_image(map.caps[i], static_cast<int>(i)));

  // e^{-Ct}-damped Dirichlet energy must not increase between checkpoints
  bool damped_monotone = true;
  double damped_prev = inf;
  for (const FlowState& st : map.flow.checkpoints) {
    const double damped =
        std::exp(-map.flow.gronwall_constant * (st.t - 1.0)) *
        dirichlet_energy(st, map.grid.cell_areas, map.cells_offset);
    if (damped > damped_prev * (1.0 + 1e-9)) damped_monotone = false;
    damped_prev = damped;
  }

  {
    CsvWriter csv(path("checkpoints.csv"),
                  {"t", "det_residual", "hole_tracking", "outer_tracking"});
    for (std::size_t i = 0; i < map.flow.checkpoints.size(); ++i)
      csv.row({format_g17(map.flow.checkpoints[i].t),
               format_g17(map.flow.checkpoint_det_residual[i]),
               format_g17(tracking.rows[i].hole_err),
               format_g17(tracking.rows[i].outer_err)});
  }
  {
    CsvWriter csv(path("energy.csv"),
                  {"eps", "annuli_energy", "total", "renormalized"});
    for (const EnergyLadderRow& row : study.rows)
      csv.row({format_g17(row.eps), format_g17(row.annuli_energy),
               format_g17(row.total), format_g17(row.renormalized)});
  }
  {
    CsvWriter csv(path("images.csv"),
                  {"cavity", "eps", "area", "expected_area", "rel_err",
                   "winding", "mean_radius", "radial_std"});
    for (std::size_t i = 0; i < map.caps.size(); ++i) {
      for (double eps : ladder) {
        RadialCavityMap cap = map.caps[i];
        cap.eps = eps;
        const CavityImageRow row = cavity_image(cap, static_cast<int>(i));
        csv.row({std::to_string(row.cavity), format_g17(row.eps),
                 format_g17(row.area), format_g17(row.expected_area),
                 format_g17(row.area_rel_err), std::to_string(row.winding),
                 format_g17(row.mean_radius), format_g17(row.radial_std)});
      }
    }
  }
  {
    CsvWriter csv(path("final_map.csv"),
                  {"kind", "ref_x", "ref_y", "x", "y", "f11", "f12", "f21",
                   "f22", "det"});
    const FlowState& fin = map.flow.final_state();
    const auto kind_of = [&](std::size_t i) -> std::string {
      if (static_cast<int>(i) >= map.outer_offset) return "outer";
      if (static_cast<int>(i) >= map.rings_offset) return "ring";
      if (static_cast<int>(i) >= map.corners_offset) return "corner";
      return "cell";
    };
    for (std::size_t i = 0; i < fin.particles.size(); ++i) {
      const FlowParticle& p = fin.particles[i];
      csv.row({kind_of(i), format_g17(p.ref.x), format_g17(p.ref.y),
               format_g17(p.pos.x), format_g17(p.pos.y), format_g17(p.F.a11),
               format_g17(p.F.a12), format_g17(p.F.a21), format_g17(p.F.a22),
               format_g17(p.F.det())});
    }
  }
  {
    CsvWriter csv(path("summary.csv"), {"key", "value"});
    const auto kv = [&](const std::string& k, double v) {
      csv.row({k, format_g17(v)});
    };
    kv("R0", cfg.R0);
    kv("n", cfg.n());
    kv("lambda", evo.lambda);
    kv("sigma", sigma(cfg));
    kv("pad_R", pads.R.front());
    kv("pad_d", pads.d);
    kv("delta", pads.delta);
    kv("steps", rc.knobs.steps);
    kv("modes", rc.knobs.modes);
    kv("grid", rc.knobs.grid);
    kv("flow_energy", map.flow_energy);
    kv("gronwall_constant", map.flow.gronwall_constant);
    kv("max_det_residual", map.flow.max_det_residual);
    kv("max_excursion", map.flow.max_excursion);
    kv("excursion_events", static_cast<double>(map.flow.excursion_events));
    kv("hole_tracking", tracking.max_hole_err);
    kv("outer_tracking", tracking.max_outer_err);
    kv("glue_mismatch", map.glue_mismatch);
    kv("outer_mismatch", map.outer_mismatch);
    kv("energy_slope", study.slope);
    kv("energy_slope_rel_err", study.slope_rel_err);
    kv("renormalized_spread_rel", study.spread_rel);
    kv("area_total", book.total);
    kv("area_expected", book.expected);
    kv("area_rel_err", book.rel_err);
    kv("fd_det_residual", fd.max_residual);
    kv("injectivity_quads", static_cast<double>(inj.quads));
    kv("injectivity_violations", static_cast<double>(inj.violations()));
  }

  bool image_ok = true;
  for (const CavityImageRow& row : images) {
    const double L = map.caps[row.cavity].L;
    if (row.area_rel_err > 0.005 || row.winding != 1 ||
        row.radial_std > 1e-3 * L)
      image_ok = false;
  }

  std::vector<bool> gates;
  const auto gate = [&](const std::string& label, bool ok,
                        const std::string& detail) {
    print_line(label, ok, detail);
    gates.push_back(ok);
  };
  gate("det residual <= 1e-3", map.flow.max_det_residual <= 1e-3,
       format_g17(map.flow.max_det_residual));
  gate("fd det cross-check <= 1e-2", fd.max_residual <= 1e-2,
       format_g17(fd.max_residual));
  gate("hole tracking <= 1e-5 R0", tracking.max_hole_err <= 1e-5 * cfg.R0,
       format_g17(tracking.max_hole_err));
  gate("outer tracking <= 1e-6 R0", tracking.max_outer_err <= 1e-6 * cfg.R0,
       format_g17(tracking.max_outer_err));
  gate("glue mismatch <= 1e-4 R0", map.glue_mismatch <= 1e-4 * cfg.R0,
       format_g17(map.glue_mismatch));
  gate("outer trace <= 1e-6 R0", map.outer_mismatch <= 1e-6 * cfg.R0,
       format_g17(map.outer_mismatch));
  gate("damped energy non-increasing", damped_monotone,
       "C=" + format_g17(map.flow.gronwall_constant));
  gate("energy slope within 2%", study.pass_slope,
       format_g17(study.slope_rel_err));
  gate("renormalized spread within 5%", study.pass_spread,
       format_g17(study.spread_rel));
  gate("image area within 0.5%, circular", image_ok,
       std::to_string(images.size()) + " cavities");
  gate("area bookkeeping within 0.5%", book.rel_err <= 0.005,
       format_g17(book.rel_err));
  gate("injectivity violations == 0", inj.violations() == 0,
       std::to_string(inj.violations()));
  std::cout << "outputs in " << args.out_dir << "\n";
  for (bool ok : gates) {
    if (!ok) {
      std::cout << "run: FAIL (one or more validation checks failed)\n";
      return 4;
    }
  }
  std::cout << "run: PASS\n";
  return 0;
}

int cmd_estimates(const CliArgs& args) {
  EstimateOptions opt;
  opt.seed = args.seed;
  const std::vector<EstimateRow> rows = estimate_suite(opt);

  fs::create_directories(args.out_dir);
  CsvWriter csv((fs::path(args.out_dir) / "estimates.csv").string(),
                {"name", "param", "lhs", "rhs", "ratio", "pass"});
  long fails = 0;
  for (const EstimateRow& row : rows) {
    csv.row({row.name, format_g17(row.param), format_g17(row.lhs),
             format_g17(row.rhs), format_g17(row.ratio),
             row.pass ? "1" : "0"});
    if (!row.pass) {
      ++fails;
      std::cout << "FAIL  " << row.name << " param=" << row.param
                << " ratio=" << format_g17(row.ratio) << "\n";
    }
  }
  std::cout << rows.size() << " estimate rows, " << fails << " failures\n";
  return 0;
}

int cmd_dump_field(const CliArgs& args) {
  RunConfig rc = load_run_config(args.config_path);
  apply_overrides(rc.knobs, args);
  const Evolution evo = straight_line_evolution(rc.config);
  const std::vector<double> tgrid = uniform_time_grid(evo.lambda,
                                                      rc.knobs.time_grid);
  const PadRadii pads = choose_pads(evo, rc.config.R0, tgrid);
  const double t = args.t_sample > 0.0 ? args.t_sample
                                       : 0.5 * (1.0 + evo.lambda);
  if (t < 1.0 || t > evo.lambda)
    throw std::domain_error("sample time outside [1, lambda]");

  NeumannOptions nopt;
  nopt.modes = rc.knobs.modes;
  const TotalField field = build_total_field(evo, pads, t, nopt);
  const HoleDomain& dom = field.domain();

  fs::create_directories(args.out_dir);
  CsvWriter csv((fs::path(args.out_dir) / "field.csv").string(),
                {"x", "y", "vx", "vy", "div"});
  const int g = rc.knobs.grid;
  const DomainQuadrature quad = domain_quadrature(dom, g, 2 * g);
  for (const QuadratureNode& node : quad.nodes) {
    const Vec2 v = field.velocity(node.x);
    const Mat2 J = field.jacobian(node.x);
    csv.row({format_g17(node.x.x), format_g17(node.x.y), format_g17(v.x),
             format_g17(v.y), format_g17(J.trace())});
  }
  std::cout << "field sampled at t=" << format_g17(t) << " on " <<
      quad.nodes.size() << " polar nodes\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"incompressible planar cavity deformations"};
  app.require_subcommand(1);

  CliArgs args;
  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* copt = sub->add_option("--config", args.config_path,
                                 "JSON configuration file");
    if (needs_config) copt->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--steps", args.steps, "RK4 step count");
    sub->add_option("--modes", args.modes, "Fourier truncation order");
    sub->add_option("--grid", args.grid, "grid resolution");
    sub->add_option("--threads", args.threads, "worker threads");
    sub->add_option("--alpha", args.alpha, "Holder exponent");
    sub->add_option("--eps-ladder", args.eps_ladder, "cavity scales")
        ->delimiter(',');
  };

  CLI::App* check = app.add_subcommand(
      "check", "feasibility and placement-margin report");
  add_common(check, true);

  CLI::App* run = app.add_subcommand(
      "run", "construct and validate the full deformation");
  add_common(run, true);
  run->add_flag("--dry-run", args.dry_run, "stop after the geometry stage");

  CLI::App* estimates = app.add_subcommand(
      "estimates", "inequality and constant-tracking suite");
  add_common(estimates, false);
  estimates->add_option("--seed", args.seed, "random seed");

  CLI::App* dump = app.add_subcommand("dump-field",
                                      "sample the velocity field");
  add_common(dump, true);
  dump->add_option("--t", args.t_sample, "sample time in [1, lambda]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(check)) return cmd_check(args);
    if (app.got_subcommand(run)) return cmd_run(args);
    if (app.got_subcommand(estimates)) return cmd_estimates(args);
    if (app.got_subcommand(dump)) return cmd_dump_field(args);
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
