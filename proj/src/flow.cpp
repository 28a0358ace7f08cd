#include "cavflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <thread>

#include "cavflow/quadrature.hpp"

namespace cavflow {

namespace {

// Chunked parallel map over [0, count); each worker owns disjoint slots, so
// results are bitwise identical for every thread count.
template <typename Fn>
void parallel_for(int threads, std::size_t count, Fn&& body) {
  if (threads <= 1 || count < 64) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const int workers = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct StageEval {
  Vec2 v;
  Mat2 J;
};

StageEval eval_stage(const TotalField& field, const Vec2& x) {
  return {field.velocity(x), field.jacobian(x)};
}

// Pull an escaped particle back onto the boundary of the circle it crossed.
double project_into(const HoleDomain& dom, Vec2& x) {
  const double sd = dom.signed_distance(x);
  if (sd >= 0.0) return 0.0;
  const Vec2 rel0 = x - dom.z0;
  const double rho0 = rel0.norm();
  if (rho0 > dom.r0) {
    x = dom.z0 + rel0 * (dom.r0 / rho0);
    return -sd;
  }
  for (const Hole& h : dom.holes) {
    const Vec2 rel = x - h.center;
    const double rho = rel.norm();
    if (rho < h.radius) {
      if (rho < 1e-300) {
        x = h.center + Vec2{h.radius, 0.0};
      } else {
        x = h.center + rel * (h.radius / rho);
      }
      return -sd;
    }
  }
  return -sd;  // outside tolerance of validate(); should not happen
}

}  // namespace

FlowResult integrate_flow(const Evolution& e, const PadRadii& pads,
                          std::span<const Vec2> seeds,
                          const FlowOptions& options) {
  if (options.steps < 1) throw std::invalid_argument("steps must be positive");
  const int steps = options.steps;
  int cps = std::clamp(options.checkpoints, 1, steps);
  while (steps % cps != 0) --cps;  // largest divisor not above the request

  const double h = (e.lambda - 1.0) / steps;
  const double silent_band = options.project_tol_factor * e.R0;
  const double hard_limit = 0.25 * pads.d;

  // velocity fields cached at every half step: t_j = 1 + j h/2
  std::vector<std::unique_ptr<TotalField>> stages(2 * steps + 1);
  for (int j = 0; j <= 2 * steps; ++j) {
    const double t = 1.0 + 0.5 * j * h;
    stages[j] = std::make_unique<TotalField>(
        build_total_field(e, pads, std::min(t, e.lambda), options.solver));
  }

  FlowResult result;
  FlowState state;
  state.t = 1.0;
  state.particles.resize(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    state.particles[i].ref = seeds[i];
    state.particles[i].pos = seeds[i];
  }

  const auto det_residual = [](const FlowState& s) {
    double worst = 0.0;
    for (const FlowParticle& p : s.particles)
      worst = std::max(worst, std::abs(p.F.det() - 1.0));
    return worst;
  };

  result.checkpoints.push_back(state);
  result.checkpoint_det_residual.push_back(0.0);

  const int threads = std::max(1, options.threads);
  std::vector<double> chunk_gron(state.particles.size(), 0.0);
  std::vector<double> chunk_exc(state.particles.size(), 0.0);

  for (int step = 0; step < steps; ++step) {
    const TotalField& f0 = *stages[2 * step];
    const TotalField& fh = *stages[2 * step + 1];
    const TotalField& f1 = *stages[2 * step + 2];
    const HoleDomain& dom_next = f1.domain();

    parallel_for(threads, state.particles.size(), [&](std::size_t i) {
      FlowParticle& p = state.particles[i];
      const StageEval s1 = eval_stage(f0, p.pos);
      const Mat2 k1 = s1.J * p.F;
      const StageEval s2 = eval_stage(fh, p.pos + s1.v * (0.5 * h));
      const Mat2 k2 = s2.J * (p.F + k1 * (0.5 * h));
      const StageEval s3 = eval_stage(fh, p.pos + s2.v * (0.5 * h));
      const Mat2 k3 = s3.J * (p.F + k2 * (0.5 * h));
      const StageEval s4 = eval_stage(f1, p.pos + s3.v * h);
      const Mat2 k4 = s4.J * (p.F + k3 * h);

      p.pos = p.pos + (s1.v + s2.v * 2.0 + s3.v * 2.0 + s4.v) * (h / 6.0);
      p.F = p.F + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);

      double g = std::max(std::max(s1.J.op_norm(), s2.J.op_norm()),
                          std::max(s3.J.op_norm(), s4.J.op_norm()));
      chunk_gron[i] = std::max(chunk_gron[i], 2.0 * g);
      chunk_exc[i] = project_into(dom_next, p.pos);
    });

    state.t = 1.0 + (step + 1) * h;
    for (std::size_t i = 0; i < state.particles.size(); ++i) {
      const double exc = chunk_exc[i];
      if (exc > result.max_excursion) result.max_excursion = exc;
      if (exc > silent_band) ++result.excursion_events;
      if (exc > hard_limit)
        throw NumericalError("flow particle left the domain by " +
                             std::to_string(exc) + " at t=" +
                             std::to_string(state.t));
    }

    if ((step + 1) % (steps / cps) == 0) {
      result.checkpoints.push_back(state);
      result.checkpoint_det_residual.push_back(det_residual(state));
    }
  }

  for (double g : chunk_gron)
    result.gronwall_constant = std::max(result.gronwall_constant, g);
  result.max_det_residual =
      *std::max_element(result.checkpoint_det_residual.begin(),
                        result.checkpoint_det_residual.end());
  return result;
}

// ------------------------------------------------------------
// radial cavity map
// ------------------------------------------------------------

Vec2 RadialCavityMap::eval(const Vec2& x) const {
  const Vec2 rel = x - a;
  const double r = rel.norm();
  if (r < 1e-300) throw std::domain_error("radial map evaluated at the core");
  const double s = std::sqrt(L * L + r * r) / r;
  return image_center + rel * s;
}

Mat2 RadialCavityMap::grad(const Vec2& x) const {
  const Vec2 rel = x - a;
  const double r = rel.norm();
  if (r < 1e-300) throw std::domain_error("radial map evaluated at the core");
  const Vec2 er = rel / r;
  const double rho = std::sqrt(L * L + r * r);
  // principal stretches r/rho (radial) and rho/r (angular); det = 1
  return Mat2::outer(er, er) * (r / rho) +
         (Mat2::identity() - Mat2::outer(er, er)) * (rho / r);
}

double radial_annulus_energy(double L, double R, double eps) {
  if (!(eps > 0.0) || eps >= R) throw std::invalid_argument("need 0 < eps < R");
  const double l2 = L * L;
  return pi * ((R * R - eps * eps) +
               l2 * (std::log(R / eps) -
                     0.5 * std::log((l2 + R * R) / (l2 + eps * eps))));
}

// ------------------------------------------------------------
// reference grid
// ------------------------------------------------------------

PolarGrid reference_grid(const Evolution& e, const PadRadii& pads, int n_r,
                         int n_theta) {
  if (n_r < 2 || n_theta < 4) throw std::invalid_argument("grid too coarse");
  const HoleDomain dom = domain_at(e, pads, 1.0);

  PolarGrid grid;
  grid.n_r = n_r;
  grid.n_theta = n_theta;

  DomainQuadrature quad = domain_quadrature(dom, n_r, n_theta);
  grid.cell_centers.reserve(quad.nodes.size());
  grid.cell_areas.reserve(quad.nodes.size());
  for (const QuadratureNode& node : quad.nodes) {
    grid.cell_centers.push_back(node.x);
    grid.cell_areas.push_back(node.w);
  }

  // corner lattice: origin once, then (i, j) for i = 1..n_r
  grid.corners.push_back(dom.z0);
  const auto corner_index = [n_theta](int i, int j) {
    return 1 + (i - 1) * n_theta + (j % n_theta);
  };
  const double dr = e.R0 / n_r;
  const double dth = 2.0 * pi / n_theta;
  for (int i = 1; i <= n_r; ++i)
    for (int j = 0; j < n_theta; ++j)
      grid.corners.push_back(dom.z0 + unit_dir(j * dth) * (i * dr));

  const double margin = -1e-12 * e.R0;
  const auto inside = [&](const Vec2& x) {
    return dom.signed_distance(x) >= margin;
  };
  for (int i = 0; i < n_r; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      std::array<int, 4> q;
      if (i == 0) {
        q = {0, corner_index(1, j), corner_index(1, j + 1), 0};
      } else {
        q = {corner_index(i, j), corner_index(i + 1, j),
             corner_index(i + 1, j + 1), corner_index(i, j + 1)};
      }
      bool ok = true;
      for (int idx : q)
        if (!inside(grid.corners[idx])) ok = false;
      const Vec2 mid = dom.z0 + unit_dir((j + 0.5) * dth) * ((i + 0.5) * dr);
      if (ok && inside(mid)) grid.quads.push_back(q);
    }
  }

  // keep only corners referenced by some quad: unused lattice points may sit
  // inside a hole where the velocity fields are undefined
  std::vector<int> remap(grid.corners.size(), -1);
  std::vector<Vec2> used;
  for (auto& q : grid.quads) {
    for (int& idx : q) {
      if (remap[idx] < 0) {
        remap[idx] = static_cast<int>(used.size());
        used.push_back(grid.corners[idx]);
      }
      idx = remap[idx];
    }
  }
  grid.corners = std::move(used);
  return grid;
}

// ------------------------------------------------------------
// assembled deformation
// ------------------------------------------------------------

AssembledMap assemble_full_map(const Evolution& e, const PadRadii& pads,
                               double eps, const PolarGrid& grid,
                               const FlowOptions& options) {
  const double min_pad =
      *std::min_element(pads.R.begin(), pads.R.end());
  if (!(eps > 0.0) || eps >= min_pad)
    throw std::invalid_argument("eps must lie in (0, min R_pad)");

  AssembledMap map;
  map.R0 = e.R0;
  map.lambda = e.lambda;
  map.eps = eps;
  map.grid = grid;
  map.ring_samples = 256;

  const std::size_t n = e.cavities.size();
  std::vector<Vec2> seeds;
  map.cells_offset = 0;
  seeds.insert(seeds.end(), grid.cell_centers.begin(), grid.cell_centers.end());
  map.corners_offset = static_cast<int>(seeds.size());
  seeds.insert(seeds.end(), grid.corners.begin(), grid.corners.end());
  map.rings_offset = static_cast<int>(seeds.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = e.cavities[i].a;
    for (int k = 0; k < map.ring_samples; ++k)
      seeds.push_back(a +
                      unit_dir(2.0 * pi * k / map.ring_samples) * pads.R[i]);
  }
  map.outer_offset = static_cast<int>(seeds.size());
  for (int k = 0; k < map.ring_samples; ++k)
    seeds.push_back(unit_dir(2.0 * pi * k / map.ring_samples) * e.R0);

  map.flow = integrate_flow(e, pads, seeds, options);
  const FlowState& fin = map.flow.final_state();

  for (std::size_t i = 0; i < n; ++i) {
    const CavityPath& c = e.cavities[i];
    RadialCavityMap cap;
    cap.a = c.a;
    cap.image_center = c.center(e.lambda);
    cap.L = std::sqrt(std::max(0.0, c.sq_radius(e.lambda)));
    cap.Rpad = pads.R[i];
    cap.eps = eps;
    map.caps.push_back(cap);

    const double r_img = std::sqrt(cap.L * cap.L + pads.R[i] * pads.R[i]);
    for (int k = 0; k < map.ring_samples; ++k) {
      const Vec2 expect =
          cap.image_center + unit_dir(2.0 * pi * k / map.ring_samples) * r_img;
      const Vec2 got = fin.particles[map.rings_offset +
                                     static_cast<int>(i) * map.ring_samples + k]
                           .pos;
      map.glue_mismatch = std::max(map.glue_mismatch, (got - expect).norm());
    }
  }
  for (int k = 0; k < map.ring_samples; ++k) {
    const Vec2 expect =
        unit_dir(2.0 * pi * k / map.ring_samples) * (e.lambda * e.R0);
    const Vec2 got = fin.particles[map.outer_offset + k].pos;
    map.outer_mismatch = std::max(map.outer_mismatch, (got - expect).norm());
  }

  for (std::size_t i = 0; i < grid.cell_centers.size(); ++i) {
    const Mat2& F = fin.particles[map.cells_offset + i].F;
    map.flow_energy += 0.5 * F.frobenius2() * grid.cell_areas[i];
  }

  if (map.glue_mismatch > 1e-3 * e.R0)
    throw NumericalError("pad-circle tracking drifted by " +
                         std::to_string(map.glue_mismatch));
  return map;
}

}  // namespace cavflow
