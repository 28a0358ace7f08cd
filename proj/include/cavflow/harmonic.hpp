#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "cavflow/geometry.hpp"
#include "cavflow/quadrature.hpp"
#include "cavflow/types.hpp"

namespace cavflow {

// ============================================================
// Neumann problems on circular hole domains.
//
// Data convention: on every boundary circle (outer and holes alike)
// the prescribed normal derivative g is taken along the outward
// radial direction of THAT circle's own center.  Compatibility then
// reads flux(outer) = sum_k flux(hole_k).
//
// Solutions are represented spectrally: per hole a log source of
// strength flux/(2 pi) plus decaying multipoles (r_k/|x-z_k|)^m, and
// growing harmonics (|x-z0|/r0)^m about the outer center, fitted by
// least-squares collocation at 8M points per circle.
// ============================================================

struct CircleFourier {
  double mean = 0.0;
  std::vector<double> cos_coef;  // m = 1..order
  std::vector<double> sin_coef;

  static CircleFourier constant(double value) {
    CircleFourier f;
    f.mean = value;
    return f;
  }

  int order() const { return static_cast<int>(cos_coef.size()); }
  double eval(double theta) const;
  double derivative(double theta) const;  // d/dtheta
  double sup_bound() const;               // |mean| + sum sqrt(a^2+b^2)
};

struct BoundaryData {
  CircleFourier outer;
  std::vector<CircleFourier> holes;
};

// flux(outer) - sum flux(hole_k)
double compatibility_residual(const HoleDomain& domain, const BoundaryData& g);
double data_sup_norm(const BoundaryData& g);

struct NeumannOptions {
  int modes = 16;             // multipole truncation order M
  double tol_factor = 1e-9;   // residual gate: tol_factor * ||g||_inf
  int quad_r = 256;           // mean-zero quadrature resolution
  int quad_theta = 256;
  bool normalize_mean = true;
};

class HarmonicSolution {
 public:
  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  Mat2 hessian(const Vec2& x) const;

  const HoleDomain& domain() const { return domain_; }
  double log_strength(int hole) const { return log_q_[hole]; }
  double constant() const { return c0_; }
  double neumann_residual() const { return residual_; }
  double tolerance() const { return tol_; }
  bool conditioning_warning() const { return warning_; }
  double data_scale() const { return scale_; }

  // decaying multipole coefficient magnitudes, for diagnostics/tests
  double hole_coef_norm(int hole) const;
  double outer_coef_norm() const;

 private:
  friend HarmonicSolution solve_neumann(const HoleDomain&, const BoundaryData&,
                                        const NeumannOptions&);
  HoleDomain domain_;
  std::vector<double> log_q_;                          // per hole
  std::vector<std::vector<std::complex<double>>> hole_coef_;  // a + i b, m=1..M
  std::vector<std::complex<double>> outer_coef_;
  double c0_ = 0.0;
  double residual_ = 0.0;
  double tol_ = 0.0;
  double scale_ = 0.0;
  bool warning_ = false;
};

// throws CompatibilityError when circle fluxes do not balance within
// 1e-10 * max(1, ||g||_inf) * r0
HarmonicSolution solve_neumann(const HoleDomain& domain, const BoundaryData& g,
                               const NeumannOptions& options = {});

// ============================================================
// Disk Neumann kernel and boundary operators
// ============================================================

// reflection across the circle |x| = R: x* = R^2 x / |x|^2
Vec2 reflect_point(const Vec2& x, double R);

// phi^x(y) = (1/2pi) ln|y - x*| - |y|^2 / (4 pi R^2)
double disk_green_correction(const Vec2& x, const Vec2& y, double R);

// Phi(y - x) - phi^x(y), Phi(z) = -(1/2pi) log|z|
double green_neumann_disk(const Vec2& x, const Vec2& y, double R);

// u(r e^{i phi}) = (1-r^2)/(2 pi) \int g(tau) / |x - e^{i tau}|^2 dtau, |x| > 1
double poisson_disk_exterior(const std::function<double(double)>& g, const Vec2& x,
                             double tol = 1e-12);

// omega(r e^{i phi}) = \int g(tau + phi) r sin(tau) / (r^2 + 1 - 2 r cos tau) dtau
double conjugate_kernel_op(const std::function<double(double)>& g, const Vec2& x,
                           double tol = 1e-12);

// max over sampled pairs of |g(s)-g(t)| / dist(s,t)^alpha, periodic arc distance
double holder_seminorm(const std::function<double(double)>& g, double alpha = 0.5,
                       int samples = 512);

}  // namespace cavflow
